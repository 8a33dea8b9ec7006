from fractions import Fraction

import numpy as np
import pytest

from udwzw.errors import DomainError, UnsupportedAlgebraError
from udwzw.liealg import UOperator, build_algebra, check_cartan_weyl, coroot


@pytest.mark.parametrize("rank", [1, 2, 3, 4])
def test_cartan_weyl_exact(rank):
    d = build_algebra("A", rank)
    rep = check_cartan_weyl(d)
    assert rep.passed, rep.summary_table()
    assert d.n_pos == rank * (rank + 1) // 2
    assert d.n_roots == 2 * d.n_pos


def test_a2_root_order_and_sign():
    d = build_algebra("A", 2)
    assert [d.root(i) for i in range(d.n_pos)] == [(1, 0), (0, 1), (1, 1)]
    assert d.c(0, 1) == 1
    assert d.add(0, 1) == 2
    with pytest.raises(DomainError):
        d.c(0, 2)


@pytest.mark.parametrize("rank", [2, 3])
def test_root_coords_against_matrices(rank):
    # oracle: [H^mu, E^a] = <a, H^mu> E^a in the defining representation
    d = build_algebra("A", rank)
    mats = d.matrices
    H = mats.numeric_basis[:rank]
    for a in range(d.n_roots):
        E = mats.numeric(("E", a))
        for mu in range(rank):
            lhs = H[mu] @ E - E @ H[mu]
            assert np.allclose(lhs, d.coord(a, mu).evaluate().real * E, atol=1e-14)


def test_cartan_basis_orthonormal():
    d = build_algebra("A", 3)
    H = d.matrices.numeric_basis[:3]
    gram = np.einsum("aij,bji->ab", H, H)
    assert np.allclose(gram, np.eye(3), atol=1e-14)


def test_coroot_has_norm_four_over_root_norm():
    d = build_algebra("A", 2)
    v = np.array([x.evaluate().real for x in coroot(d, 2)])
    assert v @ v == pytest.approx(4 / float(d.norm2(2)))


def test_unsupported_series():
    with pytest.raises(UnsupportedAlgebraError):
        build_algebra("E", 8)


def test_u_must_be_skew():
    with pytest.raises(DomainError, match=r"\(0,1\)"):
        UOperator([[0, 1], [1, 0]])


def test_rotation_convention():
    U = UOperator.rotation(3, Fraction(1, 3), (1, 2))
    m = U.numeric()
    assert m[1, 2] == pytest.approx(-1 / 3)
    assert m[2, 1] == pytest.approx(1 / 3)
    assert not m[0].any()


def test_u_pairing_against_numpy():
    # omega_U(a, b) = a^T U b on the vectors of root coordinates
    d = build_algebra("A", 2)
    U = UOperator.rotation(2, Fraction(1, 4))
    m = U.numeric()
    vec = [np.array([d.coord(a, mu).evaluate().real for mu in range(2)]) for a in range(d.n_roots)]
    for a in range(d.n_roots):
        for b in range(d.n_roots):
            assert U.u_pairing(d, a, b).evaluate().real == pytest.approx(vec[a] @ m @ vec[b], abs=1e-14)
    assert U.u_pairing(d, 0, 1).evaluate().real == pytest.approx(-3 ** 0.5 / 4)


def test_symbolic_u_substitution():
    U = UOperator.symbolic(3)
    assert U.n_params == 3
    V = U.substitute([Fraction(1), Fraction(2), Fraction(3)])
    assert not V.is_symbolic
    assert np.allclose(V.numeric(), -V.numeric().T)
