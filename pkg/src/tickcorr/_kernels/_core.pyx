# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the pure NumPy kernels in ``_fallback``.

Same algorithms, scalar loops instead of vectorised ones. Kept in
lockstep with the fallback; the test suite asserts agreement.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin, sqrt

cnp.import_array()

BACKEND = "compiled"

DEF REFRESH = 512


def mm_coeffs(tau, delta, int n_coeffs):
    """Fourier coefficients c+_k = sum_j exp(i*k*tau_j) * delta_j, k = 1..N."""
    cdef const cnp.float64_t[::1] t = np.ascontiguousarray(tau, dtype=np.float64)
    cdef const cnp.float64_t[::1] d = np.ascontiguousarray(delta, dtype=np.float64)
    cdef Py_ssize_t n = t.shape[0]
    out = np.empty(n_coeffs, dtype=np.complex128)
    cdef cnp.complex128_t[::1] o = out
    if n == 0:
        out[:] = 0.0
        return out

    cdef cnp.float64_t[::1] wr = np.empty(n, dtype=np.float64)
    cdef cnp.float64_t[::1] wi = np.empty(n, dtype=np.float64)
    cdef cnp.float64_t[::1] ar = np.empty(n, dtype=np.float64)
    cdef cnp.float64_t[::1] ai = np.empty(n, dtype=np.float64)

    cdef Py_ssize_t j
    cdef int k
    cdef double sr, si, tr, kt
    for j in range(n):
        wr[j] = cos(t[j])
        wi[j] = sin(t[j])
        ar[j] = d[j]
        ai[j] = 0.0

    for k in range(1, n_coeffs + 1):
        if (k - 1) % REFRESH == 0 and k > 1:
            for j in range(n):
                kt = k * t[j]
                ar[j] = cos(kt) * d[j]
                ai[j] = sin(kt) * d[j]
        else:
            for j in range(n):
                tr = ar[j] * wr[j] - ai[j] * wi[j]
                ai[j] = ar[j] * wi[j] + ai[j] * wr[j]
                ar[j] = tr
        sr = 0.0
        si = 0.0
        for j in range(n):
            sr += ar[j]
            si += ai[j]
        o[k - 1] = sr + 1j * si
    return out


def hy_pair(times_i, delta_i, times_j, delta_j):
    """Hayashi-Yoshida pairwise sum via a two-pointer interval sweep."""
    cdef const cnp.float64_t[::1] ti = np.ascontiguousarray(times_i, dtype=np.float64)
    cdef const cnp.float64_t[::1] di = np.ascontiguousarray(delta_i, dtype=np.float64)
    cdef const cnp.float64_t[::1] tj = np.ascontiguousarray(times_j, dtype=np.float64)
    cdef const cnp.float64_t[::1] dj = np.ascontiguousarray(delta_j, dtype=np.float64)
    cdef Py_ssize_t ni = di.shape[0]
    cdef Py_ssize_t nj = dj.shape[0]

    # prefix sums of delta_j, accumulated sequentially like np.cumsum
    cdef cnp.float64_t[::1] prefix = np.empty(nj + 1, dtype=np.float64)
    cdef Py_ssize_t l
    prefix[0] = 0.0
    for l in range(nj):
        prefix[l + 1] = prefix[l] + dj[l]

    cdef double total = 0.0
    cdef Py_ssize_t k, lo = 0, hi = 0
    for k in range(ni):
        # lo: first l with end_j[l] > start_i[k]
        while lo < nj and tj[lo + 1] <= ti[k]:
            lo += 1
        if hi < lo:
            hi = lo
        # hi: first l with start_j[l] >= end_i[k]
        while hi < nj and tj[hi] < ti[k + 1]:
            hi += 1
        total += di[k] * (prefix[hi] - prefix[lo])
    return total


def garch_variance_scan(double sig2_0, double theta, double w, double lam,
                        double dt, z, bint reno, double floor=1e-12):
    """Euler recursion for the squared-volatility path (see fallback)."""
    cdef const cnp.float64_t[::1] zv = np.ascontiguousarray(z, dtype=np.float64)
    cdef Py_ssize_t n = zv.shape[0]
    out = np.empty(n + 1, dtype=np.float64)
    cdef cnp.float64_t[::1] o = out
    cdef double coeff = sqrt(2.0 * lam * theta * dt)
    cdef double sig2 = sig2_0
    cdef double shock
    cdef int floored = 0
    cdef Py_ssize_t k
    o[0] = sig2_0
    for k in range(n):
        if reno:
            shock = coeff * sqrt(sig2) * zv[k]
        else:
            shock = coeff * sig2 * zv[k]
        sig2 = sig2 + theta * (w - sig2) * dt + shock
        if sig2 < floor:
            sig2 = floor
            floored += 1
        o[k + 1] = sig2
    return out, floored
