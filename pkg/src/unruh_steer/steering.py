"""Steering-induced coherence, measurement-induced disturbance, and the
coherence-based steering criteria.

Alice projectively measures her qubit along a unit axis m; Bob's
conditional states form the steered ensemble. The steering-induced
coherence (SIC) is the ensemble-average l1 coherence of Bob's conditional
states, measured in the eigenbasis of his unconditional reduced state,
maximized over m. The one-sided measurement-induced disturbance (MID) is
the trace-norm distance between the state and its B-side dephasing in that
same eigenbasis. The two coincide for two qubits; ``theorem1_residual``
checks the identity numerically.

All optimizations are deterministic: a 64 x 128 spherical grid (uniform in
cos theta and phi, scanned in ascending (theta, phi) order so argmax ties
resolve lexicographically) followed by coordinate-wise golden-section
refinement, never a stochastic search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .coherence import l1_coherence_bloch
from .errors import DegenerateLimit, DenominatorZero, DomainError, NotPositive
from .qmat import FanoState, dephase_b, fano_to_matrix, min_eigenvalue, trace_norm

SQRT6 = math.sqrt(6.0)
DEGENERACY_GATE = 1e-9    # |b| below this: reduced state treated as maximally mixed
PHYSICALITY_TOL = 1e-10   # min-eigenvalue gate on input states
PROB_FLOOR = 1e-15        # outcome probability treated as zero
MEAS_UNIT_TOL = 1e-12
GRID_THETA = 64
GRID_PHI = 128
REFINE_FTOL = 1e-8

_AXIS_INDEX = {"x": 0, "y": 1, "z": 2, 0: 0, 1: 1, 2: 2}
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
# theta rows are uniform in cos, so the refinement bracket must cover the
# widest (polar) row gap; phi rows are uniform
_BRACKET_THETA = 0.3
_BRACKET_PHI = 2.0 * (2.0 * math.pi / GRID_PHI)


def _require_physical(state: FanoState) -> np.ndarray:
    m = fano_to_matrix(state)
    low = min_eigenvalue(m)
    if low < -PHYSICALITY_TOL:
        raise NotPositive(f"state has min eigenvalue {low:.3e}")
    return m


def _require_meas_axis(v) -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(3)
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > MEAS_UNIT_TOL:
        raise DomainError("measurement axis must be a unit 3-vector")
    return v / norm


# ----- steered ensembles -----

@dataclass(frozen=True)
class SteeredEnsemble:
    """Bob's conditional Bloch vectors for Alice outcomes (+1, -1).

    A zero-probability outcome carries Bob's unconditional Bloch vector by
    convention (it never contributes to averages).
    """

    probs: np.ndarray
    blochs: np.ndarray

    def __post_init__(self):
        p = np.array(self.probs, dtype=float).reshape(2)
        r = np.array(self.blochs, dtype=float).reshape(2, 3)
        p.setflags(write=False)
        r.setflags(write=False)
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "blochs", r)


def steer_bob(state: FanoState, m) -> SteeredEnsemble:
    """Conditional ensemble on B after measuring axis m on A.

    p_pm = (1 pm a.m)/2 and r_pm = (b pm T^T m) / (2 p_pm).
    """
    m = _require_meas_axis(m)
    _require_physical(state)
    along = float(state.a_vec @ m)
    tm = state.t_mat.T @ m
    probs = np.array([0.5 * (1.0 + along), 0.5 * (1.0 - along)])
    blochs = np.empty((2, 3))
    for k, sign in enumerate((1.0, -1.0)):
        if probs[k] > PROB_FLOOR:
            blochs[k] = (state.b_vec + sign * tm) / (2.0 * probs[k])
        else:
            blochs[k] = state.b_vec
    return SteeredEnsemble(probs=probs, blochs=blochs)


# ----- deterministic spherical optimizer -----

def _grid_vectors(n_theta: int, n_phi: int):
    """Unit vectors ordered by ascending (theta, phi); uniform cos theta."""
    cos_t = np.linspace(1.0, -1.0, n_theta)
    sin_t = np.sqrt(np.clip(1.0 - cos_t ** 2, 0.0, None))
    theta = np.arccos(cos_t)
    phi = np.linspace(0.0, 2.0 * math.pi, n_phi, endpoint=False)
    ct = np.repeat(cos_t, n_phi)
    st = np.repeat(sin_t, n_phi)
    th = np.repeat(theta, n_phi)
    ph = np.tile(phi, n_theta)
    vecs = np.stack([st * np.cos(ph), st * np.sin(ph), ct], axis=1)
    return th, ph, vecs


def _unit(theta: float, phi: float) -> np.ndarray:
    st = math.sin(theta)
    return np.array([st * math.cos(phi), st * math.sin(phi), math.cos(theta)])


def _sym3_max_eig(m11, m12, m13, m22, m23, m33) -> float:
    """Largest eigenvalue of a symmetric 3x3, trigonometric closed form."""
    q = (m11 + m22 + m33) / 3.0
    a, b, c = m11 - q, m22 - q, m33 - q
    p2 = (a * a + b * b + c * c
          + 2.0 * (m12 * m12 + m13 * m13 + m23 * m23)) / 6.0
    if p2 <= 0.0:
        return q
    p = math.sqrt(p2)
    n11, n22, n33 = a / p, b / p, c / p
    n12, n13, n23 = m12 / p, m13 / p, m23 / p
    det = (n11 * (n22 * n33 - n23 * n23)
           - n12 * (n12 * n33 - n23 * n13)
           + n13 * (n12 * n23 - n22 * n13))
    r = min(1.0, max(-1.0, det / 2.0))
    return q + 2.0 * p * math.cos(math.acos(r) / 3.0)


def _golden(f, lo: float, hi: float, xtol: float = 1e-8):
    """Deterministic golden-section maximization on [lo, hi]."""
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > xtol:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = f(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = f(x1)
    return (x1, f1) if f1 >= f2 else (x2, f2)


def _pick_starts(values: np.ndarray, vecs: np.ndarray, count: int = 3,
                 sep: float = 0.1):
    """Indices of the best grid points, best first, angularly separated.

    A stable descending sort keeps the lexicographic (theta, phi) tie-break
    of the underlying grid ordering.
    """
    order = np.argsort(-values, kind="stable")
    picked = []
    for idx in order:
        if any(np.arccos(np.clip(vecs[idx] @ vecs[j], -1.0, 1.0)) < sep
               for j in picked):
            continue
        picked.append(int(idx))
        if len(picked) == count:
            break
    return picked


def _refine(objective, theta: float, phi: float, best: float,
            ftol: float) -> float:
    """Coordinate-wise golden-section ascent from a grid start.

    A golden probe on a non-unimodal bracket can come back below the
    incumbent, so moves are only accepted on improvement; the returned
    value never drops below the grid value.
    """
    for _ in range(50):
        previous = best
        t, ft = _golden(lambda x: objective(x, phi),
                        max(0.0, theta - _BRACKET_THETA),
                        min(math.pi, theta + _BRACKET_THETA))
        if ft > best:
            theta, best = t, ft
        p, fp = _golden(lambda x: objective(theta, x),
                        phi - _BRACKET_PHI, phi + _BRACKET_PHI)
        if fp > best:
            phi, best = p, fp
        if best - previous < ftol:
            break
    return best


def _search_sphere(batch, one, n_theta: int, n_phi: int, ftol: float,
                   minimize: bool = False) -> float:
    """Grid scan plus multi-start refinement; max by default, min on request.

    `batch` maps an (n, 3) block of unit vectors to values, `one` maps a
    single (theta, phi) pair; the split lets the grid pass vectorize while
    refinement runs on plain floats.
    """
    theta, phi, vecs = _grid_vectors(n_theta, n_phi)
    values = batch(vecs)
    if minimize:
        values = -values
        scalar = lambda t, p: -one(t, p)
    else:
        scalar = one
    best = -math.inf
    for idx in _pick_starts(values, vecs):
        best = max(best, _refine(scalar, theta[idx], phi[idx],
                                 float(values[idx]), ftol))
    return -best if minimize else best


# ----- steering-induced coherence -----

def _sic_objective(b: np.ndarray, t_mat: np.ndarray, e: np.ndarray):
    """Average conditional l1 coherence as a function of Alice's axis.

    The probability weights cancel against the conditional normalization:
    sum_pm p_pm l1(r_pm) = ( |(b + T^T m) perp e| + |(b - T^T m) perp e| ) / 2,
    well defined also for zero-probability outcomes.
    """
    def batch(m_rows: np.ndarray) -> np.ndarray:
        m_rows = np.atleast_2d(m_rows)
        w = m_rows @ t_mat                      # rows are T^T m
        out = np.zeros(len(m_rows))
        for sign in (1.0, -1.0):
            v = b[None, :] + sign * w
            sq = np.einsum("ij,ij->i", v, v) - (v @ e) ** 2
            out += np.sqrt(np.clip(sq, 0.0, None))
        return 0.5 * out

    return batch


def _sic_scalar(b: np.ndarray, t_mat: np.ndarray, e: np.ndarray):
    """Same objective on plain floats, for the golden-section inner loop."""
    b1, b2, b3 = (float(x) for x in b)
    e1, e2, e3 = (float(x) for x in e)
    (t11, t12, t13), (t21, t22, t23), (t31, t32, t33) = t_mat.tolist()

    def value(theta: float, phi: float) -> float:
        st = math.sin(theta)
        m1, m2, m3 = st * math.cos(phi), st * math.sin(phi), math.cos(theta)
        w1 = m1 * t11 + m2 * t21 + m3 * t31
        w2 = m1 * t12 + m2 * t22 + m3 * t32
        w3 = m1 * t13 + m2 * t23 + m3 * t33
        total = 0.0
        for sgn in (1.0, -1.0):
            v1, v2, v3 = b1 + sgn * w1, b2 + sgn * w2, b3 + sgn * w3
            ve = v1 * e1 + v2 * e2 + v3 * e3
            sq = v1 * v1 + v2 * v2 + v3 * v3 - ve * ve
            if sq > 0.0:
                total += math.sqrt(sq)
        return 0.5 * total

    return value


def _max_eig_sym3(mats: np.ndarray) -> np.ndarray:
    """Largest eigenvalue of a batch of symmetric 3x3 matrices, closed form."""
    q = np.trace(mats, axis1=-2, axis2=-1) / 3.0
    m = mats - q[..., None, None] * np.eye(3)
    p = np.sqrt(np.einsum("...ij,...ij->...", m, m) / 6.0)
    safe = np.where(p > 0.0, p, 1.0)
    n = m / safe[..., None, None]
    det = (n[..., 0, 0] * (n[..., 1, 1] * n[..., 2, 2] - n[..., 1, 2] ** 2)
           - n[..., 0, 1] * (n[..., 0, 1] * n[..., 2, 2]
                             - n[..., 1, 2] * n[..., 0, 2])
           + n[..., 0, 2] * (n[..., 0, 1] * n[..., 1, 2]
                             - n[..., 1, 1] * n[..., 0, 2]))
    angle = np.arccos(np.clip(det / 2.0, -1.0, 1.0)) / 3.0
    return q + np.where(p > 0.0, 2.0 * p * np.cos(angle), 0.0)


def _transverse_gain(t_mat: np.ndarray, axes: np.ndarray) -> np.ndarray:
    """sigma_max((I - e e^T) T^T), batched over axes e.

    Computed as the root of the largest eigenvalue of T T^T minus its
    rank-one piece (T e)(T e)^T.
    """
    axes = np.atleast_2d(axes)
    gram = t_mat @ t_mat.T
    u = axes @ t_mat.T
    g = gram[None, :, :] - u[:, :, None] * u[:, None, :]
    return np.sqrt(np.clip(_max_eig_sym3(g), 0.0, None))


def _gain_scalar(t_mat: np.ndarray):
    """Transverse gain on plain floats, for the golden-section inner loop."""
    (t11, t12, t13), (t21, t22, t23), (t31, t32, t33) = t_mat.tolist()
    g11 = t11 * t11 + t12 * t12 + t13 * t13
    g12 = t11 * t21 + t12 * t22 + t13 * t23
    g13 = t11 * t31 + t12 * t32 + t13 * t33
    g22 = t21 * t21 + t22 * t22 + t23 * t23
    g23 = t21 * t31 + t22 * t32 + t23 * t33
    g33 = t31 * t31 + t32 * t32 + t33 * t33

    def value(theta: float, phi: float) -> float:
        st = math.sin(theta)
        e1, e2, e3 = st * math.cos(phi), st * math.sin(phi), math.cos(theta)
        w1 = t11 * e1 + t12 * e2 + t13 * e3
        w2 = t21 * e1 + t22 * e2 + t23 * e3
        w3 = t31 * e1 + t32 * e2 + t33 * e3
        lam = _sym3_max_eig(g11 - w1 * w1, g12 - w1 * w2, g13 - w1 * w3,
                            g22 - w2 * w2, g23 - w2 * w3, g33 - w3 * w3)
        return math.sqrt(lam) if lam > 0.0 else 0.0

    return value


def _degenerate_sic(state: FanoState, n_theta: int, n_phi: int,
                    ftol: float) -> float:
    """Infimum over reference axes when the reduced state is maximally mixed.

    Below the degeneracy gate b is dropped (error bounded by |b|); the
    inner maximum over Alice's axis is then exactly the largest singular
    value of the transverse correlation block, and the grid plus
    refinement runs over the reference axis. The infimum lands on the
    middle singular value of T.
    """
    batch = lambda axes: _transverse_gain(state.t_mat, axes)
    return _search_sphere(batch, _gain_scalar(state.t_mat),
                          n_theta, n_phi, ftol, minimize=True)


def steering_induced_coherence(state: FanoState, n_theta: int = GRID_THETA,
                               n_phi: int = GRID_PHI,
                               ftol: float = REFINE_FTOL) -> float:
    """Maximal average conditional l1 coherence in Bob's eigenbasis.

    For a nondegenerate reduced state the reference basis is fixed by Bob's
    Bloch axis; below the degeneracy gate |b| < 1e-9 the basis is resolved
    as the infimum over reference axes.
    """
    _require_physical(state)
    b = state.b_vec
    blen = float(np.linalg.norm(b))
    if blen < DEGENERACY_GATE:
        return _degenerate_sic(state, n_theta, n_phi, ftol)
    e_hat = b / blen
    return _search_sphere(_sic_objective(b, state.t_mat, e_hat),
                          _sic_scalar(b, state.t_mat, e_hat),
                          n_theta, n_phi, ftol)


def sic_closed_form_free(tau: float, ratio: float) -> float:
    """|tau - ratio^2| / (3 + ratio^2), the SIC of the equilibrium family."""
    return abs(tau - ratio * ratio) / (3.0 + ratio * ratio)


# ----- one-sided measurement-induced disturbance -----

def _mid_for_axis(m: np.ndarray, axis: np.ndarray) -> float:
    return trace_norm(m - dephase_b(m, axis))


def _degenerate_mid(m: np.ndarray, n_theta: int, n_phi: int,
                    ftol: float) -> float:
    def batch(axes: np.ndarray) -> np.ndarray:
        # B-side dephasing difference (m - (I x u) m (I x u)) / 2
        # with u = e . sigma, batched over axes e
        axes = np.atleast_2d(axes)
        u = np.zeros((len(axes), 2, 2), dtype=complex)
        u[:, 0, 0] = axes[:, 2]
        u[:, 1, 1] = -axes[:, 2]
        u[:, 0, 1] = axes[:, 0] - 1.0j * axes[:, 1]
        u[:, 1, 0] = axes[:, 0] + 1.0j * axes[:, 1]
        big = np.zeros((len(axes), 4, 4), dtype=complex)
        big[:, :2, :2] = u
        big[:, 2:, 2:] = u
        delta = 0.5 * (m[None, :, :] - big @ m @ big)
        return np.abs(np.linalg.eigvalsh(delta)).sum(axis=1)

    return _search_sphere(batch, lambda t, p: _mid_for_axis(m, _unit(t, p)),
                          n_theta, n_phi, ftol, minimize=True)


def one_sided_mid(state: FanoState, n_theta: int = GRID_THETA,
                  n_phi: int = GRID_PHI, ftol: float = REFINE_FTOL) -> float:
    """Trace-norm disturbance under B-side eigenbasis dephasing.

    Infimum over eigenbases of Bob's reduced state: a single evaluation
    along the Bloch axis when that state is nondegenerate, a grid plus
    refinement infimum below the degeneracy gate.
    """
    m = _require_physical(state)
    b = state.b_vec
    blen = float(np.linalg.norm(b))
    if blen < DEGENERACY_GATE:
        return _degenerate_mid(m, n_theta, n_phi, ftol)
    return _mid_for_axis(m, b / blen)


def theorem1_residual(state: FanoState, n_theta: int = GRID_THETA,
                      n_phi: int = GRID_PHI, ftol: float = REFINE_FTOL) -> float:
    """|SIC - MID|; zero up to optimizer tolerance for physical states."""
    sic = steering_induced_coherence(state, n_theta, n_phi, ftol)
    mid = one_sided_mid(state, n_theta, n_phi, ftol)
    return abs(sic - mid)


# ----- conditional-coherence steering criteria -----

def alpha_matrix(state: FanoState) -> np.ndarray:
    """Matrix alpha_ij = b_i + T_ji of steered-coherence building blocks."""
    return state.b_vec[:, None] + state.t_mat.T


class ConditionalCoherence(NamedTuple):
    """Closed-form (primary) and first-principles values of one term."""

    closed_form: float
    direct: float


def conditional_coherence(state: FanoState, meas_axis, coh_axis,
                          outcome: int = +1) -> ConditionalCoherence:
    """l1 coherence of Bob's conditional state for one Alice outcome.

    Measuring axis k with outcome s gives Bob the Bloch vector
    (b_j + s T_kj) / (1 + s a_k); its coherence in the basis of axis w is
    the root-sum-square of the other two components:

        sqrt( sum_{j != w} (b_j + s T_kj)^2 ) / (1 + s a_k),

    which for s = +1 reads sqrt(sum_{j != w} alpha_jk^2) / (1 + a_k). The
    closed form is the primary value; ``direct`` recomputes it through the
    steered ensemble. Raises DenominatorZero when |1 + s a_k| <= 1e-12 and
    DomainError when the two axes coincide.
    """
    k = _AXIS_INDEX.get(meas_axis)
    w = _AXIS_INDEX.get(coh_axis)
    if k is None or w is None:
        raise DomainError("axes must be 'x', 'y', 'z' or 0, 1, 2")
    if k == w:
        raise DomainError("measurement and coherence axes must differ")
    if outcome not in (+1, -1):
        raise DomainError("outcome must be +1 or -1")
    denom = 1.0 + outcome * float(state.a_vec[k])
    if abs(denom) <= 1e-12:
        raise DenominatorZero(f"1 + outcome * a[{k}] = {denom:.3e}")
    numer = state.b_vec + outcome * state.t_mat[k]
    others = [j for j in range(3) if j != w]
    closed = math.hypot(numer[others[0]], numer[others[1]]) / denom

    axis_vec = np.zeros(3)
    axis_vec[k] = 1.0
    ensemble = steer_bob(state, axis_vec)
    basis = np.zeros(3)
    basis[w] = 1.0
    direct = l1_coherence_bloch(ensemble.blochs[0 if outcome == +1 else 1],
                                basis)
    return ConditionalCoherence(closed_form=closed, direct=direct)


class SteerabilityFree(NamedTuple):
    """Both readings of the equilibrium-family coherence-sum criterion."""

    literal: float
    absolute: float
    exceeds_literal: bool
    exceeds_absolute: bool
    singular: bool


def steerability_functional_free(tau: float, ratio: float) -> SteerabilityFree:
    """Coherence-sum steering functional of the equilibrium family.

    literal = 2 (tau - ratio^2) / (3 + ratio^2)
              + [ratio^2 (tau+2) - ratio (tau+3) + tau]
                / [ratio^2 - ratio (tau+3) + 3]

    in the printed signed reading; ``absolute`` applies |.| to each of the
    (by definition non-negative) coherence terms. Each total is compared
    against the sqrt(6) threshold. At (tau, ratio) = (1, 1) numerator and
    denominator of the second term vanish together; that point comes back
    flagged singular with NaN values instead of raising.
    """
    if not -3.0 - 1e-12 <= tau <= 1.0 + 1e-12:
        raise DomainError(f"tau = {tau} outside [-3, 1]")
    if not -1e-12 <= ratio <= 1.0 + 1e-12:
        raise DomainError(f"ratio = {ratio} outside [0, 1]")
    denom1 = 3.0 + ratio * ratio
    denom2 = ratio * ratio - ratio * (tau + 3.0) + 3.0
    if abs(denom2) <= 1e-12:
        return SteerabilityFree(math.nan, math.nan, False, False, True)
    term1 = 2.0 * (tau - ratio * ratio) / denom1
    num2 = ratio * ratio * (tau + 2.0) - ratio * (tau + 3.0) + tau
    literal = term1 + num2 / denom2
    absolute = abs(term1) + abs(num2) / denom2
    return SteerabilityFree(literal=literal, absolute=absolute,
                            exceeds_literal=literal > SQRT6,
                            exceeds_absolute=absolute > SQRT6,
                            singular=False)


class CyclicPairings(NamedTuple):
    """The two cyclic measurement/coherence pairings of the criterion sum.

    first  = C_x(B|y) + C_y(B|z) + C_z(B|x)
    second = C_x(B|z) + C_y(B|x) + C_z(B|y)

    Unlike the signed functional these keep the full root-sum-square
    coherences, cross terms included.
    """

    first: float
    second: float


def steerability_pairings_free(tau: float, ratio: float) -> CyclicPairings:
    """Evaluate both cyclic pairings on the equilibrium state (outcome +1)."""
    from .model import equilibrium_free

    state = equilibrium_free(tau, ratio)

    def coh(meas, basis):
        return conditional_coherence(state, meas, basis).closed_form

    first = coh("y", "x") + coh("z", "y") + coh("x", "z")
    second = coh("z", "x") + coh("x", "y") + coh("y", "z")
    return CyclicPairings(first=first, second=second)


class BoundaryVerdict(NamedTuple):
    """Boundary-case criterion pieces x1 (= x2), x3, their ratio, verdict."""

    x1: float
    x3: float
    value: float
    satisfied: bool


def steerability_verdict_boundary(coeffs) -> BoundaryVerdict:
    """Coherence-sum steering criterion for the boundary equilibrium.

    x1 = -(A1-A2) B1 (2A1+A2) / D and x3 = (A1-A2) B1 (2B1+B2-2A1-A2) / D
    share the denominator D of the boundary equilibrium; the criterion
    compares x3 / (1 + x1) against sqrt(6). Raises DegenerateLimit when D
    underflows and DenominatorZero when 1 + x1 <= 1e-9 (the ratio
    saturation regime near zero acceleration, where cancellation noise
    dominates the denominator).
    """
    a1, a2, b1, b2 = coeffs.A1, coeffs.A2, coeffs.B1, coeffs.B2
    d = 2.0 * a1 ** 3 - a1 ** 2 * a2 - a2 * b1 * b2 + a1 * (b2 ** 2 - a2 ** 2)
    scale = max(abs(a1), abs(a2), abs(b1), abs(b2), 1e-300) ** 3
    if abs(d) <= 1e-14 * scale:
        raise DegenerateLimit(f"|D| = {abs(d):.3e} underflows")
    x1 = -(a1 - a2) * b1 * (2.0 * a1 + a2) / d
    x3 = (a1 - a2) * b1 * (2.0 * b1 + b2 - 2.0 * a1 - a2) / d
    # analytically 1 + x1 = 1 - ratio > 0; rounding noise in x1 is ~5e-12,
    # so anything at or below 1e-9 is saturation, not signal (the quotient's
    # sign can even flip there)
    denom = 1.0 + x1
    if denom <= 1e-9:
        raise DenominatorZero(f"1 + x1 = {denom:.3e}")
    value = x3 / denom
    return BoundaryVerdict(x1=x1, x3=x3, value=value, satisfied=value > SQRT6)
