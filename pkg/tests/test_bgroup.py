from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from udwzw.bgroup import (BElement, b_from_currents, b_inv, b_mul, check_group_axioms,
                          check_lattice_product, random_element)
from udwzw.errors import DomainError
from udwzw.liealg import UOperator, build_algebra

A2 = build_algebra("A", 2)
A3 = build_algebra("A", 3)
U2 = UOperator.rotation(2, Fraction(1, 4))
U3 = UOperator.rotation(3, Fraction(1, 3))


@pytest.mark.parametrize("data, U", [(A2, U2), (A3, U3), (A2, UOperator.symbolic(2))])
def test_group_axioms(data, U):
    rep = check_group_axioms(data, U, N=2, samples=5, seed=1)
    assert rep.passed, rep.summary_table()


@pytest.mark.parametrize("data, U", [(A2, U2), (A3, U3)])
def test_product_matches_matrix_conjugation(data, U):
    assert check_lattice_product(data, U, N=2, samples=4, seed=2).passed


def test_u_zero_is_abelian():
    rng = np.random.default_rng(0)
    a, b = random_element(A2, 2, rng), random_element(A2, 2, rng)
    U0 = UOperator.zero(2)
    assert b_mul(a, b, U0) == b_mul(b, a, U0)
    assert b_inv(a, U0) == b_mul(BElement.zero(A2, 2), b_inv(a, U0), U0)


def test_nonabelian_when_deformed():
    rng = np.random.default_rng(5)
    a, b = random_element(A2, 2, rng), random_element(A2, 2, rng)
    assert b_mul(a, b, U2) != b_mul(b, a, U2)


def test_constraint_component_literal():
    # (J_L . J_R | E^{g,n}) = J_L^{g,n} + exp(-<g, U(H^nu)> J_L^{nu,0}) J_R^{g,n}
    rng = np.random.default_rng(3)
    jl, jr = random_element(A2, 1, rng), random_element(A2, 1, rng)
    prod = b_from_currents(jl, jr, U2).numeric_components()
    left, right = jl.numeric_components(), jr.numeric_components()
    zero = [complex(jl.cartan(nu, 0).evaluate()) for nu in range(2)]
    for g in range(A2.n_roots):
        shift = sum(U2.alpha_U_H(A2, g, nu).evaluate().real * zero[nu] for nu in range(2))
        for n in (-1, 0, 1):
            key = (("E", g), n)
            want = left.get(key, 0) + np.exp(-shift) * right.get(key, 0)
            assert prod.get(key, 0) == pytest.approx(want, abs=1e-13)


def test_truncation_mismatch():
    rng = np.random.default_rng(0)
    with pytest.raises(DomainError):
        b_mul(random_element(A2, 1, rng), random_element(A2, 2, rng), U2)


def test_reality():
    rng = np.random.default_rng(4)
    a = random_element(A3, 2, rng)
    assert a.is_real()
    assert b_inv(a, U3).is_real()
    X = a.to_lattice(16)
    assert np.allclose(X, -np.conj(np.swapaxes(X, -1, -2)), atol=1e-14)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_inverse_roundtrip(seed):
    rng = np.random.default_rng(seed)
    a = random_element(A2, 2, rng, density=0.6)
    e = BElement.zero(A2, 2)
    assert b_mul(a, b_inv(a, U2), U2) == e
    assert b_inv(b_inv(a, U2), U2) == a
