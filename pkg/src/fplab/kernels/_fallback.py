"""Pure numpy phase-summation kernels.

Phase reduction computes frac(v * alpha) in long double (64-bit
mantissa on x86-64) before scaling by 2*pi, keeping the reduced phase
accurate to ~v*alpha*2^-63; summation relies on numpy's pairwise
scheme, whose error growth is O(eps * log n).
"""

import numpy as np

BACKEND = "numpy"

_TWO_PI = 2.0 * np.pi


def phase_sum(v: np.ndarray, w: np.ndarray, alpha: float) -> complex:
    """sum of w[i] * e(v[i] * alpha) with e(x) = exp(2*pi*i*x)."""
    t = v.astype(np.longdouble) * np.longdouble(alpha)
    frac = (t - np.floor(t)).astype(np.float64)
    ph = _TWO_PI * frac
    return complex(np.dot(w, np.cos(ph)), np.dot(w, np.sin(ph)))


def phase_sum_grid(
    v: np.ndarray, w: np.ndarray, alphas: np.ndarray, chunk: int = 256
) -> np.ndarray:
    """phase_sum evaluated at every alpha, chunked to bound memory."""
    out = np.empty(len(alphas), dtype=np.complex128)
    vl = v.astype(np.longdouble)
    for lo in range(0, len(alphas), chunk):
        hi = min(lo + chunk, len(alphas))
        t = np.outer(alphas[lo:hi].astype(np.longdouble), vl)
        t -= np.floor(t)
        ph = _TWO_PI * t.astype(np.float64)
        out[lo:hi] = np.cos(ph) @ w + 1j * (np.sin(ph) @ w)
    return out
