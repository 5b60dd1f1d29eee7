"""Dissipative model of two uniformly accelerated two-level atoms.

A pair of identical atoms with level splitting ``omega`` moves with common
proper acceleration ``accel`` through the scalar vacuum; tracing out the
field leaves a Lindblad semigroup on the two-qubit state whose Kossakowski
matrix is

    a_ij = A delta_ij - i B eps_ijk n_k + C n_i n_j

built from the field correlations at the Unruh temperature accel / (2 pi).
This module computes the coefficients (free space and in the presence of a
reflecting boundary at distance ``z``, atom separation ``sep``), the
asymptotic equilibrium states, the coefficient-space equation of motion,
and a fixed-step integrator for it.

Conventions: natural units, n is a unit vector (the equation of motion is
only supported for n = (0, 0, 1)), and ``ratio`` denotes the dissipative
asymmetry B / A = tanh(pi omega / accel) in [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateLimit,
    DomainError,
    UnphysicalDrift,
    UnsupportedDirection,
)
from .qmat import FanoState, min_eigenvalue

Z_AXIS = np.array([0.0, 0.0, 1.0])

AXIS_TOL = 1e-9            # unit-vector validation
RANGE_SLACK = 1e-12        # slack on closed parameter ranges
SINC_SERIES_CUTOFF = 1e-4  # |x| below which sin(x)/x uses its series
CSERIES_CUTOFF = 1e-2      # x below which the C coefficient uses its series
DEGENERATE_D_REL = 1e-14   # |D| underflow gate, relative to coefficient scale
CAUCHY_TOL = 1e-12         # equilibrium detection: coefficient change per window
DRIFT_TOL = -1e-6          # sampled min eigenvalue below this aborts evolve


def _unit_axis(axis) -> np.ndarray:
    axis = np.asarray(axis, dtype=float).reshape(3)
    if abs(np.linalg.norm(axis) - 1.0) > AXIS_TOL:
        raise DomainError("axis must be a unit 3-vector")
    return axis


def sinc(x: float) -> float:
    """sin(x)/x with the small-argument series 1 - x^2/6 + x^4/120."""
    x = abs(float(x))
    if x < SINC_SERIES_CUTOFF:
        x2 = x * x
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0
    return math.sin(x) / x


def _thermal_factor(x: float) -> float:
    # (1 + e^-x) / (1 - e^-x); expm1 keeps full precision for small x
    return (1.0 + math.exp(-x)) / (-math.expm1(-x))


@dataclass(frozen=True)
class UnruhParams:
    """Atom frequency, proper acceleration, and dissipator direction.

    ``accel = inf`` is accepted as the inertial limit flag (ratio -> 0).
    """

    omega: float
    accel: float
    axis: np.ndarray = None

    def __post_init__(self):
        if not (self.omega > 0.0 and math.isfinite(self.omega)):
            raise DomainError("omega must be positive and finite")
        if not self.accel > 0.0:
            raise DomainError("accel must be positive (inf allowed)")
        axis = Z_AXIS if self.axis is None else _unit_axis(self.axis)
        axis = axis.copy()
        axis.setflags(write=False)
        object.__setattr__(self, "axis", axis)

    @property
    def temperature(self) -> float:
        """Unruh temperature accel / (2 pi)."""
        return self.accel / (2.0 * math.pi)

    @property
    def beta(self) -> float:
        return 2.0 * math.pi / self.accel


@dataclass(frozen=True)
class KossakowskiFree:
    """Free-space Kossakowski coefficients and derived quantities."""

    A: float
    B: float
    C: float
    ratio: float        # B / A, equals tanh(pi omega / accel)
    temperature: float
    omega: float
    accel: float


@dataclass(frozen=True)
class KossakowskiBoundary:
    """Coefficient pairs with a reflecting boundary.

    The 1-pair multiplies delta_ij / eps / n n for each atom with itself,
    the 2-pair the cross-atom blocks. C1 = -A1 and C2 = -A2 identically.
    """

    A1: float
    A2: float
    B1: float
    B2: float
    C1: float
    C2: float
    z: float
    sep: float
    ratio: float
    omega: float
    accel: float


def kossakowski_free(params: UnruhParams) -> KossakowskiFree:
    """Free-space coefficients at the Unruh temperature.

    A = (omega/4pi) (1 + e^-x)/(1 - e^-x) with x = 2 pi omega / accel,
    B = omega/4pi, C = (omega/4pi) (2/x - (1+e^-x)/(1-e^-x)). The ratio
    B/A is cross-checked against tanh(x/2) to 1e-12.
    """
    pref = params.omega / (4.0 * math.pi)
    if math.isinf(params.accel):
        return KossakowskiFree(A=math.inf, B=pref, C=0.0, ratio=0.0,
                               temperature=math.inf, omega=params.omega,
                               accel=params.accel)
    x = params.beta * params.omega
    th = _thermal_factor(x)
    a_coef = pref * th
    if x < CSERIES_CUTOFF:
        # 2/x - coth(x/2) = -(x/6 - x^3/360 + ...), avoids the cancellation
        c_coef = pref * (-(x / 6.0) + x ** 3 / 360.0)
    else:
        c_coef = pref * (2.0 / x - th)
    ratio = pref / a_coef
    assert abs(ratio - math.tanh(x / 2.0)) <= 1e-12
    return KossakowskiFree(A=a_coef, B=pref, C=c_coef, ratio=ratio,
                           temperature=params.temperature,
                           omega=params.omega, accel=params.accel)


def kossakowski_boundary(params: UnruhParams, z: float, sep: float) -> KossakowskiBoundary:
    """Coefficient pairs for atoms at distance z from a reflecting boundary.

    Both atoms sit at the same z; sep is their separation parallel to the
    boundary. The boundary enters through image-point sinc factors:

        A1, B1 ~ 1 - sinc(2 z omega)
        A2, B2 ~ sinc(sep omega) - sinc(sqrt(sep^2 + 4 z^2) omega)

    with the thermal factor multiplying the A pair, and C1 = -A1,
    C2 = -A2 (asserted to 1e-12).
    """
    if not (z > 0.0 and math.isfinite(z)):
        raise DomainError("z must be positive and finite")
    if not (sep > 0.0 and math.isfinite(sep)):
        raise DomainError("sep must be positive and finite")
    if math.isinf(params.accel):
        raise DomainError("boundary coefficients need a finite acceleration")
    omega = params.omega
    pref = omega / (4.0 * math.pi)
    th = _thermal_factor(params.beta * omega)
    same = 1.0 - sinc(2.0 * z * omega)
    cross = sinc(sep * omega) - sinc(math.sqrt(sep * sep + 4.0 * z * z) * omega)
    a1 = pref * th * same
    a2 = pref * th * cross
    b1 = pref * same
    b2 = pref * cross
    c1 = pref * th * (sinc(2.0 * z * omega) - 1.0)
    c2 = pref * th * (-sinc(sep * omega) + sinc(math.sqrt(sep * sep + 4.0 * z * z) * omega))
    scale = max(abs(a1), abs(a2), abs(b1), abs(b2), 1e-300)
    assert abs(c1 + a1) <= 1e-12 * scale and abs(c2 + a2) <= 1e-12 * scale
    return KossakowskiBoundary(A1=a1, A2=a2, B1=b1, B2=b2, C1=c1, C2=c2,
                               z=z, sep=sep, ratio=b1 / a1 if a1 != 0.0 else 0.0,
                               omega=omega, accel=params.accel)


# ----- equilibrium states -----

def equilibrium_free(tau: float, ratio: float, axis=None) -> FanoState:
    """Asymptotic state of the free-space semigroup on the tau leaf.

    tau is the conserved correlation trace sum_i T_ii in [-3, 1], ratio the
    asymmetry B/A in [0, 1]. Both Bloch vectors equal
    -ratio (tau+3) n / (3 + ratio^2) and

        T = [ (tau - ratio^2) I + ratio^2 (tau+3) n n ] / (3 + ratio^2).

    At tau = -3 this is the singlet for every ratio.
    """
    if not -3.0 - RANGE_SLACK <= tau <= 1.0 + RANGE_SLACK:
        raise DomainError(f"tau = {tau!r} outside [-3, 1]")
    if not -RANGE_SLACK <= ratio <= 1.0 + RANGE_SLACK:
        raise DomainError(f"ratio = {ratio!r} outside [0, 1]")
    n = Z_AXIS if axis is None else _unit_axis(axis)
    denom = 3.0 + ratio * ratio
    c = -ratio * (tau + 3.0) / denom
    t_mat = ((tau - ratio * ratio) * np.eye(3)
             + ratio * ratio * (tau + 3.0) * np.outer(n, n)) / denom
    return FanoState(c * n, c * n, t_mat)


@dataclass(frozen=True)
class BoundaryEquilibrium:
    """Boundary-case asymptotic state plus its printed-formula diagnostics.

    tau_eq is the closed-form equilibrium trace; trace_mismatch records
    |tau_eq - sum_i T_ii| of the returned state (a pure rounding residual:
    the two expressions agree identically whenever A1 B2 = A2 B1, which the
    coefficient construction guarantees). is_limit marks a degenerate-D
    fallback to the free-space family.
    """

    state: FanoState
    tau_eq: float
    trace_mismatch: float
    is_limit: bool


def equilibrium_boundary(coeffs: KossakowskiBoundary, axis=None,
                         fallback_tau: float | None = None) -> BoundaryEquilibrium:
    """Asymptotic state in the boundary case.

    Uses the closed forms with denominator

        D = 2 A1^3 - A1^2 A2 - A2 B1 B2 + A1 (B2^2 - A2^2),

    Bloch coefficient -(A1-A2) B1 (2A1+A2) n / D and correlation block
    (A1-A2) B1 (2B1+B2) n n / D. When |D| underflows below 1e-14 of the
    coefficient-scale cube (z -> 0 and/or sep -> 0 regimes) the formula
    degenerates: with ``fallback_tau`` supplied the free-space equilibrium
    on that leaf is returned flagged ``is_limit=True``, otherwise
    DegenerateLimit is raised.
    """
    n = Z_AXIS if axis is None else _unit_axis(axis)
    a1, a2, b1, b2 = coeffs.A1, coeffs.A2, coeffs.B1, coeffs.B2
    d = 2.0 * a1 ** 3 - a1 ** 2 * a2 - a2 * b1 * b2 + a1 * (b2 ** 2 - a2 ** 2)
    scale = max(abs(a1), abs(a2), abs(b1), abs(b2), 1e-300) ** 3
    if abs(d) <= DEGENERATE_D_REL * scale:
        if fallback_tau is None:
            raise DegenerateLimit(
                f"|D| = {abs(d):.3e} underflows at z={coeffs.z}, sep={coeffs.sep}; "
                "supply fallback_tau for the free-space limit")
        state = equilibrium_free(fallback_tau, coeffs.ratio, n)
        return BoundaryEquilibrium(state=state, tau_eq=float(fallback_tau),
                                   trace_mismatch=math.nan, is_limit=True)
    c = -(a1 - a2) * b1 * (2.0 * a1 + a2) / d
    s = (a1 - a2) * b1 * (2.0 * b1 + b2) / d
    tau_eq = (2.0 * a1 + a2) * b1 * (b1 - b2) / d
    state = FanoState(c * n, c * n, s * np.outer(n, n))
    return BoundaryEquilibrium(state=state, tau_eq=tau_eq,
                               trace_mismatch=abs(tau_eq - state.trace_sum),
                               is_limit=False)


# ----- equation of motion and integrator -----

def ode_rhs(state: FanoState, coeffs: KossakowskiFree, axis=None,
            tau: float | None = None) -> FanoState:
    """Time derivative of the Pauli coefficients under the free dissipator.

    Only the direction n = (0, 0, 1) is supported (UnsupportedDirection
    otherwise); there the C coefficient drops out of every asymptotic
    quantity and is omitted. tau defaults to the state's own correlation
    trace; the derivative of sum_i T_ii is -12 A (sum_i T_ii - tau), so the
    trace is conserved on its own leaf.

    The Bloch-vector equations contract the correlation block on opposite
    sides (n_k T_ki for the A side, n_k T_ik for the B side). The signs of
    the B couplings in the correlation-block equation are fixed by
    requiring that the semigroup generated here is trace preserving and
    completely positive, with :func:`equilibrium_free` its exact stationary
    family; a common transcription of these equations flips them.
    """
    n = Z_AXIS if axis is None else np.asarray(axis, dtype=float).reshape(3)
    if np.abs(n - Z_AXIS).max() > 1e-12:
        raise UnsupportedDirection("only axis = (0, 0, 1) is supported")
    n = Z_AXIS
    if not math.isfinite(coeffs.A):
        raise DomainError("ode_rhs needs finite coefficients")
    a_coef, b_coef = coeffs.A, coeffs.B
    av, bv, t = state.a_vec, state.b_vec, state.t_mat
    if tau is None:
        tau = state.trace_sum
    da = -4.0 * a_coef * av - 2.0 * b_coef * (2.0 + tau) * n + 2.0 * b_coef * (n @ t)
    db = -4.0 * a_coef * bv - 2.0 * b_coef * (2.0 + tau) * n + 2.0 * b_coef * (t @ n)
    dt = (-4.0 * a_coef * (2.0 * t + t.T - tau * np.eye(3))
          - 4.0 * b_coef * (np.outer(n, bv) + np.outer(av, n))
          - 2.0 * b_coef * (np.outer(n, av) + np.outer(bv, n))
          + 2.0 * b_coef * np.eye(3) * (n @ (av + bv)))
    return FanoState(da, db, dt)


def relaxation_horizon(coeffs: KossakowskiFree) -> float:
    """Hard equilibration horizon 20 / (4 A)."""
    return 5.0 / coeffs.A


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution of :func:`evolve` plus convergence diagnostics."""

    times: np.ndarray
    states: list
    tau: float
    converged: bool
    t_converged: float
    step: float

    @property
    def final_state(self) -> FanoState:
        return self.states[-1]


def _rhs_vector(y: np.ndarray, coeffs: KossakowskiFree, tau: float) -> np.ndarray:
    return ode_rhs(FanoState.from_vector(y), coeffs, tau=tau).to_vector()


def evolve(state: FanoState, coeffs: KossakowskiFree, t_end: float | None = None,
           sample_times=None, axis=None, tau: float | None = None) -> Trajectory:
    """Integrate the coefficient equations with classic fixed-step RK4.

    The base step is h = min(0.05 / (12 A), t_end / 1000); each interval
    between consecutive sample times is split into equal substeps no larger
    than h, so samples are hit exactly. Default sampling is 201 uniform
    points on [0, t_end] with t_end the relaxation horizon 20 / (4 A).

    Equilibrium detection combines the hard horizon with a Cauchy test:
    the trajectory is flagged converged at the first step whose
    coefficients changed by less than 1e-12 over the trailing window
    1 / (4 A). Raises UnphysicalDrift if any sampled state has minimum
    eigenvalue below -1e-6.
    """
    if axis is not None:
        _ = _unit_axis(axis)
        if np.abs(np.asarray(axis, float) - Z_AXIS).max() > 1e-12:
            raise UnsupportedDirection("only axis = (0, 0, 1) is supported")
    if not math.isfinite(coeffs.A):
        raise DomainError("evolve needs finite coefficients")
    if t_end is None:
        t_end = relaxation_horizon(coeffs)
    if not (t_end > 0.0 and math.isfinite(t_end)):
        raise DomainError("t_end must be positive and finite")
    if sample_times is None:
        sample_times = np.linspace(0.0, t_end, 201)
    samples = np.asarray(sample_times, dtype=float)
    if samples.ndim != 1 or samples.size == 0:
        raise DomainError("sample_times must be a nonempty 1-d sequence")
    if np.any(np.diff(samples) < 0.0) or samples[0] < 0.0 or samples[-1] > t_end * (1 + 1e-12):
        raise DomainError("sample_times must be ascending within [0, t_end]")

    if tau is None:
        tau = state.trace_sum
    h = min(0.05 / (12.0 * coeffs.A), t_end / 1000.0)
    window = 1.0 / (4.0 * coeffs.A)

    y = state.to_vector()
    t_now = 0.0
    recent = [(0.0, y.copy())]   # trailing window for the Cauchy test
    converged = False
    t_converged = math.nan
    out_states = []
    out_times = []

    def record(ts, ys):
        st = FanoState.from_vector(ys)
        low = min_eigenvalue(st.to_matrix())
        if low < DRIFT_TOL:
            raise UnphysicalDrift(
                f"min eigenvalue {low:.3e} at t = {ts:.6g} (below {DRIFT_TOL})")
        out_times.append(ts)
        out_states.append(st)

    for target in samples:
        span = target - t_now
        if span > 1e-15 * max(1.0, target):
            nsub = max(1, int(math.ceil(span / h)))
            sub = span / nsub
            for _ in range(nsub):
                k1 = _rhs_vector(y, coeffs, tau)
                k2 = _rhs_vector(y + 0.5 * sub * k1, coeffs, tau)
                k3 = _rhs_vector(y + 0.5 * sub * k2, coeffs, tau)
                k4 = _rhs_vector(y + sub * k3, coeffs, tau)
                y = y + (sub / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
                t_now += sub
                if not converged:
                    cut = t_now - window
                    anchor = None
                    for told, yold in recent:
                        if told <= cut:
                            anchor = yold
                        else:
                            break
                    if anchor is not None and np.abs(y - anchor).max() < CAUCHY_TOL:
                        converged = True
                        t_converged = t_now
                    recent.append((t_now, y.copy()))
                    while len(recent) > 2 and recent[1][0] <= t_now - window:
                        recent.pop(0)
            t_now = target
        record(t_now, y)

    return Trajectory(times=np.array(out_times), states=out_states, tau=float(tau),
                      converged=converged, t_converged=t_converged, step=h)


def steering_node_acceleration(tau: float, omega: float) -> float | None:
    """Acceleration at which the equilibrium loses its steered coherence.

    The equilibrium coherence vanishes where ratio^2 = tau, i.e. at
    a* = pi omega / artanh(sqrt(tau)) for tau in (0, 1). Returns None for
    tau <= 0 (no finite node) and 0.0 for tau = 1 as the a -> 0 boundary
    marker.
    """
    if not (omega > 0.0 and math.isfinite(omega)):
        raise DomainError("omega must be positive and finite")
    if not -3.0 - RANGE_SLACK <= tau <= 1.0 + RANGE_SLACK:
        raise DomainError(f"tau = {tau!r} outside [-3, 1]")
    if tau <= 0.0:
        return None
    if tau >= 1.0:
        return 0.0
    return math.pi * omega / math.atanh(math.sqrt(tau))
