from fractions import Fraction

import numpy as np
import pytest

from udwzw.currentalg import JE, JH, L, R
from udwzw.errors import CutoffError, DomainError, ResolutionError, TruncationError
from udwzw.liealg import UOperator, build_algebra
from udwzw.loops import spectral_derivative
from udwzw.numlab import (PhasePoint, TangentVector, assemble, closedness_residual, currents, d_currents,
                          derivative_convergence, flow_check, flow_point, hamiltonian_value,
                          identity_point, omega_u, random_loop, random_point, verify_current_brackets,
                          verify_loop_group_bracket, verify_symmetry_relations)
from udwzw.numlab.lattice import dagger
from udwzw.numlab.relations import CurrentObservable, GHarmonic, loop_bracket_sides

A1 = build_algebra("A", 1)
A2 = build_algebra("A", 2)
U2 = UOperator.rotation(2, Fraction(1, 4))


def rand_point(data, seed, M=64):
    return random_point(data, M, np.random.default_rng(seed))


def rand_tangent(data, seed, M=64, amp=1.0):
    rng = np.random.default_rng(seed)
    return TangentVector(random_loop(data, M, rng, amp), random_loop(data, M, rng, amp))


# ---- lattice and currents -----------------------------------------------------


def test_point_validation():
    with pytest.raises(DomainError, match="power of two"):
        identity_point(A1, 48)
    p = identity_point(A1, 32)
    p.validate()
    bad = PhasePoint(A1, p.chi, 2 * p.g)
    with pytest.raises(DomainError):
        bad.validate()
    rough = p.copy()
    rough.chi[::2] += np.array([[1j, 0], [0, -1j]])
    with pytest.raises(ResolutionError):
        rough.validate()


def test_variation_without_xi():
    p = rand_point(A2, 0)
    v = rand_tangent(A2, 1)
    v.xi[:] = 0
    dL, dR = d_currents(p, v, 3)
    ginv = np.linalg.inv(p.g)
    assert np.allclose(dL, v.delta_chi)
    assert np.allclose(dR, -ginv @ v.delta_chi @ p.g)


def test_variation_at_zero_chi():
    p = rand_point(A2, 0)
    p.chi[:] = 0
    v = rand_tangent(A2, 1)
    ginv = np.linalg.inv(p.g)
    _, dR = d_currents(p, v, 3)
    assert np.allclose(dR, ginv @ (-v.delta_chi + 3 * spectral_derivative(v.xi)) @ p.g)


def test_derivative_matches_finite_difference():
    p, v, h = rand_point(A2, 2), rand_tangent(A2, 3), 1e-5
    exact = np.concatenate(d_currents(p, v, 3))
    fd = (np.concatenate(currents(flow_point(p, v, h), 3))
          - np.concatenate(currents(flow_point(p, v, -h), 3))) / (2 * h)
    assert np.max(np.abs(fd - exact)) / np.max(np.abs(exact)) <= 1e-7


def test_derivative_convergence_slope():
    fit = derivative_convergence(rand_point(A1, 4), rand_tangent(A1, 5, amp=10.0), 2)
    assert abs(fit.slope - 2) <= 0.1
    assert np.all(np.diff(fit.errors) < 0)


def test_currents_anti_hermitean():
    J_L, J_R = currents(rand_point(A2, 6), 3, check=True)
    for J in (J_L, J_R):
        assert np.allclose(J, -dagger(J), atol=1e-12)


# ---- the symplectic form -------------------------------------------------------


def test_omega_antisymmetric():
    p, v, w = rand_point(A2, 7), rand_tangent(A2, 8), rand_tangent(A2, 9)
    U = U2.numeric()
    assert abs(omega_u(p, v, v, U, 3)) <= 1e-13
    assert omega_u(p, v, w, U, 3) == pytest.approx(-omega_u(p, w, v, U, 3), abs=1e-13)


def test_u_terms_need_cartan_zero_modes():
    # at chi = 0, g = 1 the variations dJ carry no Cartan zero mode if delta_chi and xi have none
    p = identity_point(A2, 32)
    rng = np.random.default_rng(0)
    v = TangentVector(random_loop(A2, 32, rng, 1.0, constant=False), random_loop(A2, 32, rng, 1.0, constant=False))
    w = TangentVector(random_loop(A2, 32, rng, 1.0, constant=False), random_loop(A2, 32, rng, 1.0, constant=False))
    assert omega_u(p, v, w, U2.numeric(), 3) == pytest.approx(omega_u(p, v, w, 0 * U2.numeric(), 3), abs=1e-13)


@pytest.mark.parametrize("U", [U2, UOperator.zero(2)])
def test_closedness(U):
    p = rand_point(A2, 10, M=32)
    vs = [rand_tangent(A2, s, M=32) for s in (11, 12, 13)]
    assert closedness_residual(p, *vs, U.numeric(), 3) <= 1e-6


def test_closedness_detects_non_closed_form():
    def tilted(q, v, w, U, k):
        # omega_u times a point-dependent factor is not closed
        return (1 + np.real(np.trace(q.chi[0] @ q.chi[0]))) * omega_u(q, v, w, U, k)

    p = rand_point(A2, 10, M=32)
    p.chi *= 10
    vs = [rand_tangent(A2, s, M=32) for s in (11, 12, 13)]
    assert closedness_residual(p, *vs, U2.numeric(), 3, form2=tilted) >= 1e-3


# ---- brackets --------------------------------------------------------------------


def test_cartan_central_term_a1():
    p = rand_point(A1, 14)
    sd = assemble(p, np.zeros((1, 1)), 2, 8)
    b = sd.bracket(sd.covector_current(L, ("H", 0), 1), sd.covector_current(L, ("H", 0), -1))
    assert b == pytest.approx(-2j, abs=1e-6)
    b = sd.bracket(sd.covector_current(R, ("H", 0), 1), sd.covector_current(R, ("H", 0), -1))
    assert b == pytest.approx(2j, abs=1e-6)


def test_left_right_commute():
    p = rand_point(A2, 15)
    sd = assemble(p, U2.numeric(), 3, 8)
    for la in A2.basis:
        for lb in A2.basis:
            b = sd.bracket(sd.covector_current(L, la, 1), sd.covector_current(R, lb, 0))
            assert abs(b) <= 1e-6


def test_quadratic_coefficient_two_point_solve():
    # {J^{a1,0}, J^{a2,0}} = c J^{a1+a2,0} + w J^{a1,0} J^{a2,0}; solve for (c, w) from two points
    rows, rhs = [], []
    for seed in (16, 17):
        p = rand_point(A2, seed)
        p.chi *= 20
        sd = assemble(p, U2.numeric(), 3, 8)
        J = {a: CurrentObservable(L, ("E", a), 0).value(p, 3) for a in range(3)}
        rows.append([J[2], J[0] * J[1]])
        rhs.append(sd.bracket(sd.covector_current(L, ("E", 0), 0), sd.covector_current(L, ("E", 1), 0)))
    c, w = np.linalg.solve(np.array(rows), np.array(rhs))
    assert c == pytest.approx(1.0, abs=1e-5)
    assert w == pytest.approx(3 ** 0.5 / 4, abs=1e-5)    # -omega_U(a1, a2)


def test_ill_conditioned_truncation():
    with pytest.raises(TruncationError):
        assemble(rand_point(A1, 18, M=32), np.zeros((1, 1)), 2, 4, cond_limit=1.0)


def test_bracket_cutoff_margin():
    with pytest.raises(CutoffError):
        verify_current_brackets(rand_point(A2, 19), U2, 3, 4, n_max=3)


@pytest.mark.parametrize("N_t", [8, 10])
def test_current_brackets_a2(N_t):
    rep = verify_current_brackets(rand_point(A2, 20), U2, 3, N_t)
    assert rep.passed, rep.summary_table()


# ---- symmetry relations ------------------------------------------------------------


def test_symmetry_relations_deformed():
    rep = verify_symmetry_relations(rand_point(A2, 21, M=32), U2, 3, 6)
    assert rep.passed, rep.summary_table()
    assert rep["left_non_hamiltonian_detected"].max_residual >= 1e-3


def test_symmetry_relations_undeformed():
    rep = verify_symmetry_relations(rand_point(A2, 22, M=32), UOperator.zero(2), 3, 6)
    assert rep.passed, rep.summary_table()
    assert rep["left_hamiltonian_at_u0"].max_residual <= 1e-6


def test_loop_group_functions_commute_at_u0():
    p = rand_point(A2, 23, M=32)
    rep = verify_loop_group_bracket(p, UOperator.zero(2), 3, 6)
    assert rep["loop_group_bracket"].max_residual <= 1e-6


class TorusInvariant:
    """Harmonic of ``|g_12|^2 = g_12 (g^-1)_21``, invariant under torus multiplication on both sides."""

    def __init__(self, mode):
        self.mode = mode

    def _phase(self, p):
        return np.exp(1j * self.mode * p.sigma) / p.M

    def value(self, p, k, J=None):
        ginv = np.linalg.inv(p.g)
        return complex(np.sum(self._phase(p) * p.g[:, 0, 1] * ginv[:, 1, 0]))

    def covector(self, sd):
        p = sd.point
        g, ginv = p.g, np.linalg.inv(p.g)

        def d(v):
            dg = (v.xi @ g)[:, 0, 1] * ginv[:, 1, 0] - g[:, 0, 1] * (ginv @ v.xi)[:, 1, 0]
            return np.sum(self._phase(p) * dg)

        return sd.covector(d)


def test_torus_invariant_observable_brackets_to_zero():
    p = rand_point(A2, 24, M=32)
    sd = assemble(p, U2.numeric(), 3, 6)
    phi = TorusInvariant(1)
    for psi in (GHarmonic(np.eye(3, dtype=complex), 1), GHarmonic(np.arange(9.0).reshape(3, 3) + 0j, 0)):
        lhs, lt, rt = loop_bracket_sides(p, U2, 3, phi, psi, sd)
        assert abs(lt) <= 1e-8 and abs(rt) <= 1e-8
        assert abs(lhs) <= 1e-8


# ---- flow ----------------------------------------------------------------------------


def test_flow_short():
    rep = flow_check(rand_point(A1, 25, M=32), UOperator.zero(1), 2, 6, T=0.02, dt=1e-3)
    assert rep.passed, rep.summary_table()


def test_energy_is_nonnegative():
    p = rand_point(A2, 26)
    assert hamiltonian_value(p, 3) >= 0.0
