"""Two-qubit state algebra on the Pauli (Fano) decomposition.

A two-qubit density matrix is carried as

    rho = (1/4) [ I4 + sum_i a_i s_i x s_0 + sum_i b_i s_0 x s_i
                  + sum_ij T_ij s_i x s_j ]

with qubit A the left tensor factor and the computational basis ordered
|00>, |01>, |10>, |11>. ``a`` and ``b`` are the local Bloch vectors of A
and B, ``T`` the 3x3 correlation block. Hermiticity is automatic for real
coefficients; positivity is not, and is checked only where an operation
requires it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateBasis, DomainError, NonHermitian, NotPositive

HERMITICITY_TOL = 1e-9
BASIS_ORTHO_TOL = 1e-10
POSITIVITY_TOL = 1e-8   # concurrence input gate

SIGMA_0 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
PAULI = (SIGMA_0, SIGMA_X, SIGMA_Y, SIGMA_Z)

# sigma_y x sigma_y, used by the spin flip in the concurrence
_YY = np.kron(SIGMA_Y, SIGMA_Y)


@dataclass(frozen=True)
class FanoState:
    """Pauli coefficients of a two-qubit operator with unit trace.

    Fields are copied and frozen read-only on construction. Any finite real
    coefficients are accepted; use :meth:`is_physical` before operations
    that need an actual density matrix.
    """

    a_vec: np.ndarray
    b_vec: np.ndarray
    t_mat: np.ndarray

    def __post_init__(self):
        a = np.array(self.a_vec, dtype=float).reshape(3)
        b = np.array(self.b_vec, dtype=float).reshape(3)
        t = np.array(self.t_mat, dtype=float).reshape(3, 3)
        if not (np.isfinite(a).all() and np.isfinite(b).all() and np.isfinite(t).all()):
            raise DomainError("FanoState coefficients must be finite")
        for arr in (a, b, t):
            arr.setflags(write=False)
        object.__setattr__(self, "a_vec", a)
        object.__setattr__(self, "b_vec", b)
        object.__setattr__(self, "t_mat", t)

    @property
    def trace_sum(self) -> float:
        """sum_i T_ii, the conserved quantity of the free dissipator."""
        return float(np.trace(self.t_mat))

    def to_matrix(self) -> np.ndarray:
        return fano_to_matrix(self)

    def to_vector(self) -> np.ndarray:
        """Flatten to the 15-vector (a, b, T rows) used by the integrator."""
        return np.concatenate([self.a_vec, self.b_vec, self.t_mat.ravel()])

    @staticmethod
    def from_vector(y: np.ndarray) -> "FanoState":
        y = np.asarray(y, dtype=float).reshape(15)
        return FanoState(y[0:3], y[3:6], y[6:15].reshape(3, 3))

    def is_physical(self, tol: float = 1e-10) -> bool:
        return min_eigenvalue(self.to_matrix()) >= -tol

    def isclose(self, other: "FanoState", atol: float = 1e-12) -> bool:
        return (np.allclose(self.a_vec, other.a_vec, rtol=0.0, atol=atol)
                and np.allclose(self.b_vec, other.b_vec, rtol=0.0, atol=atol)
                and np.allclose(self.t_mat, other.t_mat, rtol=0.0, atol=atol))


def fano_to_matrix(state: FanoState) -> np.ndarray:
    """Assemble the 4x4 matrix of a :class:`FanoState`.

    The result is Hermitian by construction and has unit trace; positivity
    depends on the coefficients.
    """
    m = np.eye(4, dtype=complex)
    for i in range(3):
        m += state.a_vec[i] * np.kron(PAULI[i + 1], SIGMA_0)
        m += state.b_vec[i] * np.kron(SIGMA_0, PAULI[i + 1])
        for j in range(3):
            m += state.t_mat[i, j] * np.kron(PAULI[i + 1], PAULI[j + 1])
    return 0.25 * m


def matrix_to_fano(m: np.ndarray) -> FanoState:
    """Project a Hermitian unit-trace 4x4 matrix onto Pauli coefficients.

    Raises NonHermitian / DomainError when the input violates the
    Hermiticity or unit-trace precondition beyond 1e-9.
    """
    m = np.asarray(m, dtype=complex).reshape(4, 4)
    _require_hermitian(m)
    tr = np.trace(m).real
    if abs(tr - 1.0) > HERMITICITY_TOL:
        raise DomainError(f"trace {tr!r} is not 1 within {HERMITICITY_TOL}")
    a = np.empty(3)
    b = np.empty(3)
    t = np.empty((3, 3))
    for i in range(3):
        a[i] = np.trace(m @ np.kron(PAULI[i + 1], SIGMA_0)).real
        b[i] = np.trace(m @ np.kron(SIGMA_0, PAULI[i + 1])).real
        for j in range(3):
            t[i, j] = np.trace(m @ np.kron(PAULI[i + 1], PAULI[j + 1])).real
    return FanoState(a, b, t)


def _require_hermitian(m: np.ndarray, tol: float = HERMITICITY_TOL) -> None:
    dev = np.abs(m - m.conj().T).max()
    if dev > tol:
        raise NonHermitian(f"max |m - m^dag| = {dev:.3e} exceeds {tol}")


# ----- reductions and basic functionals -----

def partial_trace(m: np.ndarray, keep: str) -> np.ndarray:
    """Bloch vector of the reduced state of one qubit.

    keep: 'A' keeps the left factor, 'B' the right one.
    """
    m = np.asarray(m, dtype=complex).reshape(2, 2, 2, 2)
    if keep == "A":
        red = np.einsum("ikjk->ij", m)
    elif keep == "B":
        red = np.einsum("kikj->ij", m)
    else:
        raise DomainError("keep must be 'A' or 'B'")
    return np.array([np.trace(red @ PAULI[i]).real for i in (1, 2, 3)])


def trace_norm(m: np.ndarray) -> float:
    """Tr|m| = sum of absolute eigenvalues, for Hermitian m (no 1/2 factor)."""
    m = np.asarray(m, dtype=complex)
    _require_hermitian(m)
    return float(np.abs(np.linalg.eigvalsh(m)).sum())


def min_eigenvalue(m: np.ndarray) -> float:
    m = np.asarray(m, dtype=complex)
    _require_hermitian(m)
    return float(np.linalg.eigvalsh(m)[0])


def eigen_descending(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and matching eigenvector columns."""
    m = np.asarray(m, dtype=complex)
    _require_hermitian(m)
    vals, vecs = np.linalg.eigh(m)
    return vals[::-1], vecs[:, ::-1]


# ----- dephasing of the B side -----

def basis_from_axis(axis: np.ndarray) -> np.ndarray:
    """Columns are the +/- eigenkets of axis . sigma for a unit axis."""
    axis = np.asarray(axis, dtype=float).reshape(3)
    norm = np.linalg.norm(axis)
    if not np.isfinite(norm) or norm < 1e-12:
        raise DomainError("basis axis must be a nonzero finite 3-vector")
    n = axis / norm
    # explicit eigenvectors of n.sigma, stable also near the poles
    if n[2] >= 0.0:
        plus = np.array([1.0 + n[2], n[0] + 1.0j * n[1]], dtype=complex)
    else:
        plus = np.array([n[0] - 1.0j * n[1], 1.0 - n[2]], dtype=complex)
    plus /= np.linalg.norm(plus)
    minus = np.array([-plus[1].conj(), plus[0].conj()], dtype=complex)
    return np.column_stack([plus, minus])


def dephase_b(m: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Kill B-side coherences: sum_k (I x P_k) m (I x P_k).

    ``basis`` is either a unit Bloch axis (shape (3,)) or an explicit 2x2
    matrix whose columns are the basis kets; the latter is validated to be
    orthonormal within 1e-10 (DegenerateBasis otherwise).
    """
    m = np.asarray(m, dtype=complex).reshape(4, 4)
    basis = np.asarray(basis)
    if basis.shape == (3,):
        u = basis_from_axis(basis.astype(float))
    elif basis.shape == (2, 2):
        u = basis.astype(complex)
        gram = u.conj().T @ u
        if np.abs(gram - np.eye(2)).max() > BASIS_ORTHO_TOL:
            raise DegenerateBasis("basis kets are not orthonormal within 1e-10")
    else:
        raise DomainError("basis must have shape (3,) or (2, 2)")
    out = np.zeros((4, 4), dtype=complex)
    for k in range(2):
        p = np.outer(u[:, k], u[:, k].conj())
        pk = np.kron(SIGMA_0, p)
        out += pk @ m @ pk
    return out


# ----- entanglement -----

def concurrence(m: np.ndarray) -> float:
    """Wootters concurrence max(0, l1 - l2 - l3 - l4) of a physical state.

    The l_k are the descending square roots of the eigenvalues of
    m (yy) m* (yy). Raises NotPositive when the input dips below -1e-8.
    """
    m = np.asarray(m, dtype=complex).reshape(4, 4)
    low = min_eigenvalue(m)
    if low < -POSITIVITY_TOL:
        raise NotPositive(f"min eigenvalue {low:.3e} < -{POSITIVITY_TOL}")
    flipped = _YY @ m.conj() @ _YY
    vals = np.linalg.eigvals(m @ flipped)
    # abs() guards the sqrt against tiny negative rounding of real spectra
    lam = np.sort(np.sqrt(np.abs(vals.real)))[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


# ----- reproducible random states -----

def random_density_matrix(rng: np.random.Generator, n_pure: int = 4) -> np.ndarray:
    """Mixture of n_pure Haar-ish random pure states with Dirichlet weights.

    This is the documented generator behind ``theorem-check`` and the
    randomized acceptance checks: complex standard-normal 4-vectors,
    normalized, combined with flat Dirichlet weights.
    """
    psi = rng.normal(size=(n_pure, 4)) + 1.0j * rng.normal(size=(n_pure, 4))
    w = rng.dirichlet(np.ones(n_pure))
    m = np.zeros((4, 4), dtype=complex)
    for k in range(n_pure):
        v = psi[k] / np.linalg.norm(psi[k])
        m += w[k] * np.outer(v, v.conj())
    return m


def random_fano_state(rng: np.random.Generator, n_pure: int = 4) -> FanoState:
    return matrix_to_fano(random_density_matrix(rng, n_pure))
