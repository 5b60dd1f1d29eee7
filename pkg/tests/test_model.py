"""Dissipator coefficients, equilibria, coefficient ODE, node inversion.

The ODE cross-check below rebuilds the generator from scratch at the matrix
level: both detectors couple to the same bath, so the dissipator carries all
four operator-pair sectors with one shared coefficient matrix
A delta_ij - i B eps_ijk n_k (the n n^T part damps nothing along n = z and is
not part of the coefficient equations).
"""

import dataclasses
import math

import numpy as np
import pytest

from unruh_steer.errors import DegenerateLimit, DomainError, UnsupportedDirection
from unruh_steer.model import (UnruhParams, equilibrium_boundary,
                               equilibrium_free, evolve, kossakowski_boundary,
                               kossakowski_free, ode_rhs, relaxation_horizon,
                               steering_node_acceleration)
from unruh_steer.qmat import FanoState, fano_to_matrix, random_fano_state

REF = UnruhParams(1.0, 2.0 * math.pi)  # beta * omega = 1

_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]])
_SZ = np.diag([1.0, -1.0]).astype(complex)
_PAULIS = (_SX, _SY, _SZ)
_I2 = np.eye(2)


def test_unruh_temperature():
    assert abs(REF.temperature - 1.0) < 1e-15
    assert abs(REF.beta * REF.temperature - 1.0) < 1e-15
    assert UnruhParams(1.0, math.inf).temperature == math.inf


def test_kossakowski_reference_point():
    k = kossakowski_free(REF)
    assert k.A == pytest.approx(0.17220194120854398, abs=1e-16)
    assert k.B == pytest.approx(0.07957747154594767, abs=1e-16)
    assert k.C == pytest.approx(-0.013046998116648638, abs=1e-16)
    assert k.ratio == pytest.approx(math.tanh(0.5), abs=1e-15)
    assert k.B == pytest.approx(1.0 / (4.0 * math.pi), abs=1e-16)


def test_ratio_identity_over_decades():
    for a in np.geomspace(1e-3, 1e6, 40):
        k = kossakowski_free(UnruhParams(1.0, float(a)))
        assert abs(k.ratio - math.tanh(math.pi / a)) <= 1e-12
        assert abs(k.B - 1.0 / (4.0 * math.pi)) < 1e-16


def test_infinite_acceleration_limit():
    k = kossakowski_free(UnruhParams(1.0, math.inf))
    assert math.isinf(k.A)
    assert k.B == pytest.approx(1.0 / (4.0 * math.pi), abs=1e-16)
    assert k.C == 0.0
    assert k.ratio == 0.0


def test_c_series_crossover():
    # the small-argument branch must agree with the direct difference form
    # where both are trustworthy (x ~ 1e-2 keeps the cancellation mild)
    for a in (2.0 * math.pi / 0.02, 2.0 * math.pi / 0.009, 2.0 * math.pi / 0.005):
        k = kossakowski_free(UnruhParams(1.0, a))
        x = 2.0 * math.pi / a
        direct = (1.0 / (4.0 * math.pi)) * (2.0 / x - 1.0 / math.tanh(x / 2.0))
        assert k.C == pytest.approx(direct, rel=5e-10)


def test_kossakowski_scales_linearly_in_omega():
    k1 = kossakowski_free(UnruhParams(1.0, 4.0))
    k2 = kossakowski_free(UnruhParams(2.0, 8.0))
    assert k2.A == pytest.approx(2.0 * k1.A, rel=1e-15)
    assert k2.B == pytest.approx(2.0 * k1.B, rel=1e-15)
    assert k2.C == pytest.approx(2.0 * k1.C, rel=1e-15)
    assert k2.ratio == pytest.approx(k1.ratio, rel=1e-15)


def test_equilibrium_reference_point():
    eq = equilibrium_free(0.0, 1.0)
    assert np.allclose(eq.a_vec, [0.0, 0.0, -0.75], atol=1e-15)
    assert np.allclose(eq.b_vec, [0.0, 0.0, -0.75], atol=1e-15)
    assert np.allclose(eq.t_mat, np.diag([-0.25, -0.25, 0.5]), atol=1e-15)
    m = fano_to_matrix(eq)
    assert np.allclose(np.diag(m).real, [0.0, 0.125, 0.125, 0.75], atol=1e-15)
    assert m[1, 2] == pytest.approx(-0.125, abs=1e-15)


def test_equilibrium_family_physical():
    for tau in np.linspace(-3.0, 1.0, 9):
        for ratio in np.linspace(0.0, 1.0, 5):
            eq = equilibrium_free(float(tau), float(ratio))
            assert eq.is_physical()
            assert eq.trace_sum == pytest.approx(tau, abs=1e-12)
            assert np.allclose(eq.a_vec, eq.b_vec, atol=1e-15)


def test_equilibrium_domain_checks():
    with pytest.raises(DomainError):
        equilibrium_free(1.5, 0.5)
    with pytest.raises(DomainError):
        equilibrium_free(0.0, -0.1)


def test_equilibrium_is_ode_fixed_point():
    for tau in (-3.0, -1.0, 0.0, 0.5, 1.0):
        for a in (1.0, 2.0 * math.pi, 50.0):
            k = kossakowski_free(UnruhParams(1.0, a))
            d = ode_rhs(equilibrium_free(tau, k.ratio), k)
            assert np.abs(d.to_vector()).max() < 1e-13


def _two_detector_rhs(rho, A, B):
    ops = ([np.kron(p, _I2) for p in _PAULIS],
           [np.kron(_I2, p) for p in _PAULIS])
    eps_n = np.array([[0, 1, 0], [-1, 0, 0], [0, 0, 0]], dtype=complex)
    a = A * np.eye(3, dtype=complex) - 1j * B * eps_n
    out = np.zeros((4, 4), dtype=complex)
    for left in range(2):
        for right in range(2):
            for i in range(3):
                for j in range(3):
                    si, sj = ops[left][i], ops[right][j]
                    out += a[i, j] * (sj @ rho @ si
                                      - 0.5 * (si @ sj @ rho + rho @ si @ sj))
    return out


def _coefficients_to_matrix(d: FanoState) -> np.ndarray:
    m = np.zeros((4, 4), dtype=complex)
    for i in range(3):
        m += d.a_vec[i] * np.kron(_PAULIS[i], _I2)
        m += d.b_vec[i] * np.kron(_I2, _PAULIS[i])
        for j in range(3):
            m += d.t_mat[i, j] * np.kron(_PAULIS[i], _PAULIS[j])
    return m / 4.0


def test_ode_matches_matrix_dissipator():
    k = kossakowski_free(REF)
    rng = np.random.default_rng(3)
    for _ in range(10):
        st = random_fano_state(rng)
        got = _coefficients_to_matrix(ode_rhs(st, k))
        want = _two_detector_rhs(fano_to_matrix(st), k.A, k.B)
        assert np.abs(got - want).max() < 1e-14


def test_ode_conserves_correlation_trace():
    k = kossakowski_free(REF)
    rng = np.random.default_rng(31)
    for _ in range(10):
        d = ode_rhs(random_fano_state(rng), k)
        assert abs(np.trace(d.t_mat)) < 1e-13


def test_ode_explicit_tau_pull():
    # with an explicit target the correlation trace relaxes at rate 12 A
    k = kossakowski_free(REF)
    st = random_fano_state(np.random.default_rng(8))
    d = ode_rhs(st, k, tau=0.3)
    assert np.trace(d.t_mat) == pytest.approx(
        -12.0 * k.A * (st.trace_sum - 0.3), rel=1e-12)


def test_ode_axis_restriction():
    k = kossakowski_free(REF)
    st = random_fano_state(np.random.default_rng(1))
    with pytest.raises(UnsupportedDirection):
        ode_rhs(st, k, axis=np.array([1.0, 0.0, 0.0]))


def test_evolve_singlet_is_stationary():
    k = kossakowski_free(REF)
    singlet = FanoState(a_vec=np.zeros(3), b_vec=np.zeros(3), t_mat=-np.eye(3))
    traj = evolve(singlet, k, t_end=5.0)
    assert traj.converged
    assert traj.tau == -3.0
    assert np.abs(traj.final_state.to_vector() - singlet.to_vector()).max() < 1e-12


def test_evolve_ground_state_relaxes():
    k = kossakowski_free(REF)
    ground = FanoState(a_vec=np.array([0, 0, 1.0]), b_vec=np.array([0, 0, 1.0]),
                       t_mat=np.diag([0.0, 0.0, 1.0]))
    traj = evolve(ground, k)
    assert traj.times[-1] == pytest.approx(relaxation_horizon(k), rel=1e-12)
    assert traj.step == pytest.approx(0.05 / (12.0 * k.A), rel=1e-12)
    eq = equilibrium_free(1.0, k.ratio)
    assert np.abs(traj.final_state.to_vector() - eq.to_vector()).max() < 1e-8
    assert abs(traj.tau - 1.0) < 1e-12
    for st in traj.states[:: len(traj.states) // 7]:
        assert st.is_physical(tol=1e-8)


def test_evolve_hits_requested_samples():
    k = kossakowski_free(REF)
    st = random_fano_state(np.random.default_rng(12))
    wanted = np.array([0.0, 0.7, 1.9, 4.3])
    traj = evolve(st, k, sample_times=wanted)
    assert np.allclose(traj.times, wanted, atol=0.0)
    assert len(traj.states) == len(wanted)
    assert traj.states[0].isclose(st, atol=0.0)


def test_node_reference_value():
    a_star = steering_node_acceleration(0.25, 1.0)
    assert a_star == pytest.approx(5.719201734760255, abs=1e-12)
    assert a_star == pytest.approx(math.pi / math.atanh(0.5), rel=1e-15)
    # the ratio at the node squares back to tau
    k = kossakowski_free(UnruhParams(1.0, a_star))
    assert k.ratio ** 2 == pytest.approx(0.25, rel=1e-12)


def test_node_branches():
    assert steering_node_acceleration(-0.5, 1.0) is None
    assert steering_node_acceleration(0.0, 1.0) is None
    assert steering_node_acceleration(1.0, 1.0) == 0.0
    with pytest.raises(DomainError):
        steering_node_acceleration(1.5, 1.0)


def test_node_scales_with_omega():
    assert steering_node_acceleration(0.25, 2.0) == pytest.approx(
        2.0 * 5.719201734760255, rel=1e-14)


def test_boundary_reference_point():
    kb = kossakowski_boundary(REF, 1.0, 1.0)
    assert kb.A1 == pytest.approx(0.0939105501908858, abs=1e-15)
    assert kb.A2 == pytest.approx(0.08431456091404832, abs=1e-15)
    assert kb.B1 == pytest.approx(0.043397676490935615, abs=1e-15)
    assert kb.B2 == pytest.approx(0.03896320520522594, abs=1e-15)
    assert kb.C1 == -kb.A1 and kb.C2 == -kb.A2
    assert kb.ratio == pytest.approx(kossakowski_free(REF).ratio, rel=1e-14)


def test_boundary_detailed_balance_identity():
    # both coefficient pairs share one thermal factor: A1 B2 = A2 B1
    for z in (0.2, 1.0, 7.0):
        for sep in (0.05, 0.5, 3.0):
            kb = kossakowski_boundary(UnruhParams(1.0, 3.0), z, sep)
            assert kb.A1 * kb.B2 == pytest.approx(kb.A2 * kb.B1, rel=1e-12)


def test_boundary_recovers_free_space():
    kf = kossakowski_free(UnruhParams(1.0, 2.0))
    kb = kossakowski_boundary(UnruhParams(1.0, 2.0), 1e5, 1e-3)
    assert kb.A1 / kf.A == pytest.approx(1.0, abs=1e-5)
    assert kb.B1 / kf.B == pytest.approx(1.0, abs=1e-5)
    assert kb.ratio == pytest.approx(kf.ratio, abs=1e-12)


def test_equilibrium_boundary_thermal_product():
    for z, sep in ((0.5, 0.2), (1.0, 1.0), (4.0, 0.7)):
        kb = kossakowski_boundary(REF, z, sep)
        eq = equilibrium_boundary(kb)
        r = kb.ratio
        assert not eq.is_limit
        assert eq.tau_eq == pytest.approx(r * r, abs=1e-11)
        assert eq.trace_mismatch < 1e-10
        assert np.allclose(eq.state.b_vec, [0.0, 0.0, -r], atol=1e-11)
        assert np.allclose(eq.state.a_vec, eq.state.b_vec, atol=1e-11)
        assert np.allclose(eq.state.t_mat, np.diag([0.0, 0.0, r * r]),
                           atol=1e-11)
        assert eq.state.is_physical()


def test_equilibrium_boundary_degenerate_limit():
    kb = kossakowski_boundary(REF, 1.0, 1.0)
    flat = dataclasses.replace(kb, A2=kb.A1, B2=kb.B1)
    eq = equilibrium_boundary(flat, fallback_tau=0.25)
    assert eq.is_limit
    assert eq.tau_eq == pytest.approx(0.25, abs=0.0)
