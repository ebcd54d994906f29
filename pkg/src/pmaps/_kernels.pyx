# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops. Signatures and results mirror ``_kernels_py``."""

import numpy as np
from libc.math cimport INFINITY, fabs
from libc.stdint cimport int64_t


def affine_orbit_float(double x0, Py_ssize_t n, const double[::1] crit,
                       const double[::1] slopes, const double[::1] intercepts,
                       double eps):
    cdef Py_ssize_t N = slopes.shape[0]
    points = np.empty(n + 1, dtype=np.float64)
    word = np.empty(n, dtype=np.int64)
    cdef double[::1] pv = points
    cdef int64_t[::1] wv = word
    cdef double x = x0
    cdef double d, mind = INFINITY
    cdef Py_ssize_t s, lo, hi, mid

    pv[0] = x
    for s in range(n):
        lo = 0
        hi = N
        while hi - lo > 1:
            mid = (lo + hi) >> 1
            if crit[mid] <= x:
                lo = mid
            else:
                hi = mid
        d = x - crit[lo]
        if crit[lo + 1] - x < d:
            d = crit[lo + 1] - x
        if d < mind:
            mind = d
        if d <= eps:
            return points[:s + 1], word[:s], mind, s
        wv[s] = lo
        x = slopes[lo] * x + intercepts[lo]
        pv[s + 1] = x

    lo = 0
    hi = N
    while hi - lo > 1:
        mid = (lo + hi) >> 1
        if crit[mid] <= x:
            lo = mid
        else:
            hi = mid
    d = x - crit[lo]
    if crit[lo + 1] - x < d:
        d = crit[lo + 1] - x
    if d < mind:
        mind = d
    return points, word, mind, -1


def affine_orbit_int(int64_t a0, int64_t q, Py_ssize_t n, const int64_t[::1] thr,
                     const unsigned char[::1] thr_exact, const int64_t[::1] slopes,
                     const int64_t[::1] offsets):
    cdef Py_ssize_t M = thr.shape[0]
    nums = np.empty(n + 1, dtype=np.int64)
    word = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] av = nums
    cdef int64_t[::1] wv = word
    cdef int64_t a = a0
    cdef Py_ssize_t s, lo, hi, mid

    av[0] = a
    for s in range(n):
        if a <= 0 or a >= q:
            return nums[:s + 1], word[:s], s
        lo = 0
        hi = M
        while lo < hi:
            mid = (lo + hi) >> 1
            if thr[mid] < a:
                lo = mid + 1
            else:
                hi = mid
        if lo < M and thr_exact[lo] and thr[lo] == a:
            return nums[:s + 1], word[:s], s
        wv[s] = lo
        a = slopes[lo] * a + offsets[lo]
        av[s + 1] = a
    return nums, word, -1


def block_codes(const int64_t[::1] word, Py_ssize_t n, int64_t base):
    cdef Py_ssize_t L = word.shape[0]
    cdef Py_ssize_t m = L - n + 1
    cdef Py_ssize_t t
    cdef int64_t code = 0, top = 1
    if n == 0:
        return np.zeros(L + 1, dtype=np.int64)
    codes = np.empty(m, dtype=np.int64)
    cdef int64_t[::1] cv = codes
    for t in range(n - 1):
        top *= base
    for t in range(n):
        code = code * base + word[t]
    cv[0] = code
    for t in range(n, L):
        code = (code - word[t - n] * top) * base + word[t]
        cv[t - n + 1] = code
    return codes


def w1_sorted(const double[::1] xa, const double[::1] wa,
              const double[::1] xb, const double[::1] wb):
    cdef Py_ssize_t na = xa.shape[0], nb = xb.shape[0]
    cdef Py_ssize_t i = 0, j = 0
    cdef double fa = 0.0, fb = 0.0, total = 0.0, prev, cur
    if na == 0 or nb == 0:
        return 0.0
    if xa[0] <= xb[0]:
        prev = xa[0]
    else:
        prev = xb[0]
    while i < na or j < nb:
        if j >= nb or (i < na and xa[i] < xb[j]):
            cur = xa[i]
        else:
            cur = xb[j]
        total += fabs(fa - fb) * (cur - prev)
        while i < na and xa[i] == cur:
            fa += wa[i]
            i += 1
        while j < nb and xb[j] == cur:
            fb += wb[j]
            j += 1
        prev = cur
    return total
