import math

import mpmath
import numpy as np
import pytest

from fplab.kernels import BACKEND, _fallback

try:
    from fplab.kernels import _ext
except ImportError:
    _ext = None

BACKENDS = [("numpy", _fallback)] + ([("cython", _ext)] if _ext else [])


def reference_phase_sum(v, w, alpha, prec=200):
    with mpmath.workprec(prec):
        a = mpmath.mpf(alpha)
        total = mpmath.fsum(
            (mpmath.mpf(wi) * mpmath.e ** (2j * mpmath.pi * (vi * a - mpmath.floor(vi * a)))
             for vi, wi in zip(v.tolist(), w.tolist())),
            absolute=False,
        )
        return complex(total)


def random_case(n, v_hi, seed):
    rng = np.random.default_rng(seed)
    v = np.sort(rng.integers(1, v_hi, n)).astype(np.int64)
    w = rng.uniform(0.1, 3.0, n)
    return v, w


def test_backend_selected():
    assert BACKEND in ("cython", "numpy")


@pytest.mark.parametrize("name,mod", BACKENDS)
def test_zero_alpha_sums_weights(name, mod):
    v, w = random_case(500, 10**6, 1)
    assert mod.phase_sum(v, w, 0.0) == pytest.approx(w.sum(), rel=1e-12)


@pytest.mark.parametrize("name,mod", BACKENDS)
def test_against_high_precision(name, mod):
    for v_hi, seed in ((10**4, 2), (10**8, 3), (10**12, 4)):
        v, w = random_case(300, v_hi, seed)
        for alpha in (0.1234567, 0.5, 0.9876543219):
            ref = reference_phase_sum(v, w, alpha)
            got = mod.phase_sum(v, w, alpha)
            assert got == pytest.approx(ref, abs=5e-9 * len(v))


@pytest.mark.parametrize("name,mod", BACKENDS)
def test_grid_matches_scalar(name, mod):
    v, w = random_case(200, 10**7, 5)
    alphas = np.linspace(0.001, 0.499, 57)
    grid = mod.phase_sum_grid(v, w, alphas)
    for a, g in zip(alphas, grid):
        assert g == pytest.approx(mod.phase_sum(v, w, float(a)), abs=1e-10)


@pytest.mark.skipif(_ext is None, reason="compiled kernel not built")
def test_backends_agree():
    v, w = random_case(2000, 10**10, 6)
    alphas = np.linspace(0.0, 0.5, 101)
    a = _fallback.phase_sum_grid(v, w, alphas)
    b = _ext.phase_sum_grid(v, w, alphas)
    assert np.abs(a - b).max() < 1e-9 * w.sum()


@pytest.mark.skipif(_ext is None, reason="compiled kernel not built")
def test_large_values_keep_phase_accuracy():
    # v * alpha ~ 1e11: naive double reduction would lose ~6e-5 of
    # phase; both backends must stay far below that
    v = np.array([10**12 + 7, 10**12 + 9], dtype=np.int64)
    w = np.array([1.0, 1.0])
    alpha = 0.1234567891234
    ref = reference_phase_sum(v, w, alpha)
    assert _ext.phase_sum(v, w, alpha) == pytest.approx(ref, abs=1e-9)
    assert _fallback.phase_sum(v, w, alpha) == pytest.approx(ref, abs=1e-7)


def test_kahan_compensation_beats_naive():
    # adversarial magnitudes: one huge weight among many small ones at
    # alpha = 0 must not lose the small contributions
    if _ext is None:
        pytest.skip("compiled kernel not built")
    n = 10**5
    v = np.arange(1, n + 1, dtype=np.int64)
    w = np.full(n, 1e-8)
    w[0] = 1e8
    got = _ext.phase_sum(v, w, 0.0)
    assert got.real == pytest.approx(1e8 + (n - 1) * 1e-8, rel=1e-15)
