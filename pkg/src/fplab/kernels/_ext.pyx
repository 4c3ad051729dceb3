# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled phase-summation kernels.

Phase reduction splits v * alpha into a rounded product and its exact
fma residual, so frac(v * alpha) is computed to full double precision
for any |v| < 2^53; both components are accumulated with Kahan
compensation.
"""

from libc.math cimport cos, fabs, floor, fma, sin

import numpy as np

cdef double TWO_PI = 6.283185307179586476925286766559


cdef inline double _frac_prod(double vd, double alpha) nogil:
    # v*alpha = p + e exactly (p rounded product, e the fma residual);
    # p - floor(p) is exact, so only the final wrap can round.
    cdef double p = vd * alpha
    cdef double e = fma(vd, alpha, -p)
    cdef double r = (p - floor(p)) + e
    r -= floor(r)
    return r


def phase_sum(long long[::1] v, double[::1] w, double alpha):
    """sum of w[i] * e(v[i] * alpha) with e(x) = exp(2*pi*i*x)."""
    cdef Py_ssize_t i, n = v.shape[0]
    cdef double ph, term
    cdef double sr = 0.0, cr = 0.0      # real accumulator + compensation
    cdef double si = 0.0, ci = 0.0      # imag accumulator + compensation
    cdef double y, t
    for i in range(n):
        ph = TWO_PI * _frac_prod(<double> v[i], alpha)
        term = w[i] * cos(ph)
        y = term - cr
        t = sr + y
        cr = (t - sr) - y
        sr = t
        term = w[i] * sin(ph)
        y = term - ci
        t = si + y
        ci = (t - si) - y
        si = t
    return complex(sr, si)


def phase_sum_grid(long long[::1] v, double[::1] w, double[::1] alphas, chunk=None):
    """phase_sum evaluated at every alpha.  ``chunk`` ignored (API parity)."""
    cdef Py_ssize_t j, m = alphas.shape[0]
    out = np.empty(m, dtype=np.complex128)
    cdef double complex[::1] mv = out
    cdef Py_ssize_t i, n = v.shape[0]
    cdef double ph, term, alpha
    cdef double sr, cr, si, ci, y, t
    for j in range(m):
        alpha = alphas[j]
        sr = cr = si = ci = 0.0
        for i in range(n):
            ph = TWO_PI * _frac_prod(<double> v[i], alpha)
            term = w[i] * cos(ph)
            y = term - cr
            t = sr + y
            cr = (t - sr) - y
            sr = t
            term = w[i] * sin(ph)
            y = term - ci
            t = si + y
            ci = (t - si) - y
            si = t
        mv[j] = sr + 1j * si
    return out
