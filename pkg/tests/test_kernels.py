import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cumbreak import _backend, _pykernels

import oracles

try:
    from cumbreak import _ckernels
except ImportError:
    _ckernels = None

needs_c = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")


def sample(seed, n=49):
    rng = np.random.default_rng(seed)
    x = 0.02 + 0.01 * rng.standard_normal(n)
    y = 2.0 * x + 0.01 + 0.005 * rng.standard_normal(n)
    return x, y


@pytest.mark.parametrize("brk", [0, 3, 20, 46])
def test_python_matches_oracle(brk):
    x, y = sample(brk)
    coef, ssr, status = _pykernels.cumfit(x, y, brk)
    ref, ref_ssr = oracles.cumulative_fit(x, y, brk)
    assert status == _pykernels.OK
    np.testing.assert_allclose(coef, ref, rtol=1e-8, atol=1e-12)
    assert ssr == pytest.approx(ref_ssr, rel=1e-7, abs=1e-18)


def test_degenerate_flag():
    coef, ssr, status = _pykernels.cumfit(np.zeros(20), np.full(20, 0.05), 0)
    assert status == _pykernels.DEGENERATE and np.isnan(ssr)


def test_bartlett_matches_oracle():
    e = np.random.default_rng(9).standard_normal(60)
    for q in (0, 1, 4, 59):
        assert _pykernels.bartlett_lrv(e, q) == pytest.approx(oracles.bartlett(e, q), rel=1e-12)
    assert _pykernels.bartlett_lrv(e, 0) == pytest.approx(float(e @ e) / 60, rel=1e-15)


@needs_c
class TestCythonAgreement:
    @settings(max_examples=50)
    @given(st.integers(0, 10_000), st.integers(0, 40))
    def test_cumfit(self, seed, brk):
        x, y = sample(seed)
        brk = 0 if brk < 3 else brk
        c = _ckernels.cumfit(x, y, brk)
        p = _pykernels.cumfit(x, y, brk)
        assert c[2] == p[2]
        np.testing.assert_allclose(c[0], p[0], rtol=1e-9, atol=1e-12)
        assert c[1] == pytest.approx(p[1], rel=1e-7, abs=1e-18)

    def test_grid(self):
        rng = np.random.default_rng(5)
        xs = 0.02 + 0.01 * rng.standard_normal((6, 49))
        y = 2.0 * xs[1] + 0.01 + 0.005 * rng.standard_normal(49)
        breaks = np.arange(20, 30)
        np.testing.assert_allclose(
            _ckernels.cumfit_grid(xs, y, breaks), _pykernels.cumfit_grid(xs, y, breaks), rtol=1e-7, atol=1e-18
        )

    def test_degenerate_matches(self):
        c = _ckernels.cumfit(np.zeros(20), np.full(20, 0.05), 0)
        assert c[2] == _pykernels.DEGENERATE and np.isnan(c[1])
        grid = _ckernels.cumfit_grid(np.zeros((2, 20)), np.ones(20), np.array([5, 10]))
        assert np.isnan(grid).all()

    @settings(max_examples=30)
    @given(st.integers(0, 10_000), st.integers(0, 30))
    def test_bartlett(self, seed, q):
        e = np.random.default_rng(seed).standard_normal(25)
        assert _ckernels.bartlett_lrv(e, q) == pytest.approx(_pykernels.bartlett_lrv(e, q), rel=1e-12)

    def test_selected_by_default(self):
        if os.environ.get("CUMBREAK_PURE_PYTHON", "").strip() not in ("", "0"):
            pytest.skip("pure-python backend forced")
        assert _backend.BACKEND == "cython"


def test_pure_python_switch():
    code = "import cumbreak; print(cumbreak.BACKEND)"
    env = dict(os.environ, CUMBREAK_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
