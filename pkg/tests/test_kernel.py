from fractions import Fraction

import numpy as np
import pytest

from udwzw.errors import DomainError
from udwzw.liealg import UOperator, build_algebra
from udwzw.numlab.kernel import mode_profiles, orbit_vector, perp_basis, verify_orbit_kernel
from udwzw.numlab.lattice import TangentVector, identity_point, omega_u, random_loop, real_basis
from udwzw.reduction import (GaugeSubalgebraSpec, block_upsilon, dconstraint, locus_residual,
                             locus_tangent, s_basis)


def test_trivial_point_full_gauge_group():
    # at chi = 0, g = 1 with S = K the locus tangents are (any delta_chi, constant xi)
    d = build_algebra("A", 2)
    spec = GaugeSubalgebraSpec(d, tuple(range(d.n_pos)))
    assert len(perp_basis(spec)) == 0
    p = identity_point(d, 32)
    U, k = np.zeros((2, 2)), 2
    assert locus_residual(spec, U, k, p) == 0.0
    rng = np.random.default_rng(0)
    tangents = [TangentVector(random_loop(d, 32, rng, 1.0), np.broadcast_to(x, p.chi.shape).copy())
                for x in real_basis(d)]
    for w in tangents:
        assert np.max(np.abs(dconstraint(spec, U, k, p, w))) <= 1e-12
    for prof in mode_profiles(p.sigma, 1):
        for z in s_basis(spec):
            v = orbit_vector(spec, U, k, p, prof[:, None, None] * z[None])
            assert np.max(np.abs(dconstraint(spec, U, k, p, v))) <= 1e-7
            for w in tangents:
                assert abs(omega_u(p, v, w, U, k)) <= 1e-6


def test_locus_tangent_refused_at_identity():
    d = build_algebra("A", 2)
    spec = GaugeSubalgebraSpec(d, (0,))
    p = identity_point(d, 16)
    with pytest.raises(DomainError, match="pointwise"):
        locus_tangent(spec, np.zeros((2, 2)), 2, p, p.chi, p.chi)


def test_mode_profiles():
    s = np.linspace(-np.pi, np.pi, 8, endpoint=False)
    prof = mode_profiles(s, 2)
    assert len(prof) == 5
    assert np.allclose(prof[3], np.cos(2 * s))


@pytest.mark.slow
def test_a3_block_compatible():
    d = build_algebra("A", 3)
    spec = GaugeSubalgebraSpec(d, block_upsilon(d, 3))
    rep = verify_orbit_kernel(spec, UOperator.rotation(3, Fraction(1, 3)), 2, M=32, n_orbit=1, n_tangent=1)
    assert rep.passed, rep.summary_table()
