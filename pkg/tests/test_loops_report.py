import json

import numpy as np
import pytest

from udwzw.liealg import build_algebra
from udwzw.loops import components, is_power_of_two, pair, sigma_grid, spectral_derivative, spectral_tail, synthesize
from udwzw.numlab.lattice import random_loop
from udwzw.report import FAIL, PASS, SKIPPED, VerificationReport


@pytest.mark.parametrize("M", [16, 32, 64])
def test_spectral_derivative_exact_for_band_limited(M):
    s = sigma_grid(M)
    f = np.sin(3 * s) + np.cos(s)
    assert np.allclose(spectral_derivative(f), 3 * np.cos(3 * s) - np.sin(s), atol=1e-12)


def test_grid_and_power_of_two():
    s = sigma_grid(8)
    assert s[0] == -np.pi and s[-1] < np.pi
    assert [is_power_of_two(m) for m in (1, 2, 48, 64)] == [True, True, False, True]


def test_components_roundtrip():
    d = build_algebra("A", 2)
    X = random_loop(d, 32, np.random.default_rng(0), 1.0, band=3)
    assert np.allclose(synthesize(d, components(d, X, 3), 32), X, atol=1e-13)


def test_pair_and_tail():
    d = build_algebra("A", 1)
    X = random_loop(d, 32, np.random.default_rng(1), 1.0)
    assert pair(X, X).real < 0
    assert spectral_tail(X) <= 1e-20
    rough = X.copy()
    rough[::2] *= -1
    assert spectral_tail(rough) > 1e-2


def test_report_bookkeeping():
    rep = VerificationReport("demo")
    rep.add("small", 1e-9, 1e-6)
    rep.add("large", 1.0, 1e-6)
    rep.add_exact("exact", [])
    rep.skip("later", "not configured")
    assert [r.status for r in rep.results] == [PASS, FAIL, PASS, SKIPPED]
    assert not rep.passed
    assert rep["large"].max_residual == 1.0
    rep.stamp({"seed": 1})
    rows = json.loads(rep.to_json())
    assert len({r["params_hash"] for r in rows}) == 1
    assert "later" in rep.summary_table()
