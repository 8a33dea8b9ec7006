from fractions import Fraction

import numpy as np
import pytest

from udwzw.currentalg import CARTAN, ROOT
from udwzw.errors import DomainError
from udwzw.liealg import UOperator, build_algebra
from udwzw.numlab.lattice import TangentVector, expm_antihermitian, random_loop
from udwzw.reduction import (GaugeSubalgebraSpec, block_upsilon, check_subalgebra, check_u_compatibility,
                             constraint_loop, dconstraint, first_class_check, gauge_action,
                             locus_residual, locus_tangent, make_constraints, s_basis, sample_locus)

A3 = build_algebra("A", 3)
K = 2
U0 = UOperator.zero(3)
UC = UOperator.rotation(3, Fraction(1, 3), (0, 1))
UI = UOperator.rotation(3, Fraction(1, 3), (1, 2))


@pytest.fixture(scope="module")
def block():
    return GaugeSubalgebraSpec(A3, block_upsilon(A3, 3))


@pytest.fixture(scope="module")
def on_locus(block):
    return sample_locus(block, UC, K, 64, seed=5)


def test_block_subalgebra(block):
    assert [A3.root(g) for g in block.upsilon] == [(1, 0, 0), (0, 1, 0), (1, 1, 0)]
    assert len(block.cartan_S) == 2 and len(block.cartan_S_perp) == 1
    P = block.projector_S()
    assert np.allclose(P @ P, P) and np.trace(P) == pytest.approx(2)
    assert check_subalgebra(block).passed


def test_non_closed_upsilon_rejected():
    spec = GaugeSubalgebraSpec(A3, (0, 1))
    rep = check_subalgebra(spec)
    assert not rep.passed
    assert "(1, 1, 0)" in rep["closure"].details[0]


def test_bad_upsilon_index():
    with pytest.raises(DomainError):
        GaugeSubalgebraSpec(A3, (7,))


@pytest.mark.parametrize("U, ok", [(U0, True), (UC, True), (UI, False)])
def test_compatibility(block, U, ok):
    assert check_u_compatibility(block, U).passed is ok


def test_incompatible_u_refused(block):
    with pytest.raises(DomainError, match="gamma="):
        make_constraints(block, UI, 1)
    assert len(make_constraints(block, UI, 1, allow_incompatible=True)) == 24


def test_constraint_count_and_shape(block):
    cs = make_constraints(block, UC, 2)
    assert len(cs) == 40
    kinds = [c.kind for c in cs.constraints]
    assert kinds.count(ROOT) == 30 and kinds.count(CARTAN) == 10


@pytest.mark.parametrize("U", [U0, UC])
def test_first_class(block, U):
    rep = first_class_check(make_constraints(block, U, 1))
    assert rep.passed, rep.summary_table()


def test_locus_sample(block, on_locus):
    assert on_locus.residual <= 1e-10
    assert np.max(np.abs(constraint_loop(block, UC, K, on_locus.point))) <= 1e-10
    on_locus.point.validate()


def test_sampler_refuses_incompatible(block):
    with pytest.raises(DomainError):
        sample_locus(block, UI, K, 32, seed=0)


def _smooth_s(basis, sigma, scale=0.4):
    sg = sigma[:, None, None]
    return expm_antihermitian(scale * np.sin(sg) * basis[2]) @ expm_antihermitian(scale * np.cos(sg) * basis[3]
                                                                                   + 0.5 * basis[0])


def test_gauge_action_preserves_locus(block, on_locus):
    p = on_locus.point
    s = _smooth_s(s_basis(block), p.sigma)
    q = gauge_action(block, UC, K, s, p)
    assert locus_residual(block, UC, K, q) <= 1e-9


def test_gauge_action_composes(block, on_locus):
    p = on_locus.point
    basis = s_basis(block)
    s1 = _smooth_s(basis, p.sigma)
    s2 = expm_antihermitian(0.2 * np.cos(p.sigma)[:, None, None] * basis[1] + 0.1 * basis[5])
    a = gauge_action(block, UC, K, s2, gauge_action(block, UC, K, s1, p))
    b = gauge_action(block, UC, K, s2 @ s1, p)
    assert np.allclose(a.chi, b.chi, atol=1e-10) and np.allclose(a.g, b.g, atol=1e-10)


def test_wrong_level_breaks_locus(block, on_locus):
    p = on_locus.point
    s = _smooth_s(s_basis(block), p.sigma, scale=0.8)
    q = gauge_action(block, UC, K, s, p, kappa=K + 0.5)
    assert locus_residual(block, UC, K, q) >= 1e-3


def test_gauge_parameter_must_lie_in_s(block, on_locus):
    p = on_locus.point
    H3 = 1j * np.diag([1, 1, 1, -3]) / np.sqrt(12)
    s = expm_antihermitian(0.3 * np.broadcast_to(H3, p.chi.shape).copy())
    with pytest.raises(DomainError):
        gauge_action(block, UC, K, s, p)


def test_locus_tangent(block, on_locus):
    p = on_locus.point
    rng = np.random.default_rng(1)
    xi = random_loop(A3, p.M, rng, 1.0)
    v = locus_tangent(block, UC.numeric(), K, p, xi, np.zeros_like(p.chi))
    assert isinstance(v, TangentVector)
    assert np.max(np.abs(dconstraint(block, UC.numeric(), K, p, v))) <= 1e-9
