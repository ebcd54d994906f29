"""Pure-Python/numpy versions of the compiled kernels in ``_kernels.pyx``.

Orbit kernels perform the same floating-point operations in the same order as
the compiled versions, so both produce bit-identical orbits.
"""

import numpy as np


def affine_orbit_float(x0, n, crit, slopes, intercepts, eps):
    crit = [float(c) for c in crit]
    slopes = [float(s) for s in slopes]
    intercepts = [float(b) for b in intercepts]
    N = len(slopes)
    points = np.empty(n + 1, dtype=np.float64)
    word = np.empty(n, dtype=np.int64)
    x = float(x0)
    mind = np.inf
    points[0] = x

    def locate(x):
        lo, hi = 0, N
        while hi - lo > 1:
            mid = (lo + hi) >> 1
            if crit[mid] <= x:
                lo = mid
            else:
                hi = mid
        return lo

    for s in range(n):
        lo = locate(x)
        d = min(x - crit[lo], crit[lo + 1] - x)
        mind = min(mind, d)
        if d <= eps:
            return points[: s + 1], word[:s], mind, s
        word[s] = lo
        x = slopes[lo] * x + intercepts[lo]
        points[s + 1] = x

    lo = locate(x)
    d = min(x - crit[lo], crit[lo + 1] - x)
    return points, word, min(mind, d), -1


def affine_orbit_int(a0, q, n, thr, thr_exact, slopes, offsets):
    thr = [int(t) for t in thr]
    thr_exact = [bool(e) for e in thr_exact]
    slopes = [int(s) for s in slopes]
    offsets = [int(o) for o in offsets]
    M = len(thr)
    nums = np.empty(n + 1, dtype=np.int64)
    word = np.empty(n, dtype=np.int64)
    a = int(a0)
    nums[0] = a
    for s in range(n):
        if a <= 0 or a >= q:
            return nums[: s + 1], word[:s], s
        lo, hi = 0, M
        while lo < hi:
            mid = (lo + hi) >> 1
            if thr[mid] < a:
                lo = mid + 1
            else:
                hi = mid
        if lo < M and thr_exact[lo] and thr[lo] == a:
            return nums[: s + 1], word[:s], s
        word[s] = lo
        a = slopes[lo] * a + offsets[lo]
        nums[s + 1] = a
    return nums, word, -1


def block_codes(word, n, base):
    word = np.asarray(word, dtype=np.int64)
    L = word.shape[0]
    if n == 0:
        return np.zeros(L + 1, dtype=np.int64)
    m = L - n + 1
    codes = np.zeros(m, dtype=np.int64)
    for j in range(n):
        codes = codes * base + word[j : j + m]
    return codes


def w1_sorted(xa, wa, xb, wb):
    xa = np.asarray(xa, dtype=np.float64)
    xb = np.asarray(xb, dtype=np.float64)
    if xa.size == 0 or xb.size == 0:
        return 0.0
    grid = np.union1d(xa, xb)
    ca = np.concatenate(([0.0], np.cumsum(wa)))
    cb = np.concatenate(([0.0], np.cumsum(wb)))
    fa = ca[np.searchsorted(xa, grid, side="right")]
    fb = cb[np.searchsorted(xb, grid, side="right")]
    return float(np.sum(np.abs(fa - fb)[:-1] * np.diff(grid)))
