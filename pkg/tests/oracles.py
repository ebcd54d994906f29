"""Independent brute-force oracles written straight from the map formulas."""

from fractions import Fraction

import numpy as np

from pmaps.zoo import GOLDEN


def tent_step(x):
    sym = (x > 0.5).astype(np.int64)
    return np.where(sym == 0, 2 * x, 2 - 2 * x), sym


def golden_step(x):
    y = GOLDEN * x
    sym = (y >= 1).astype(np.int64)
    return y - sym, sym


def grid_codes(step, k, n_points=10**6, base=2):
    """Midpoint grid with each point's first-k itinerary packed into an integer."""
    h = 1.0 / n_points
    x0 = (np.arange(n_points) + 0.5) * h
    x = x0.copy()
    code = np.zeros(n_points, dtype=np.int64)
    for _ in range(k):
        x, sym = step(x)
        code = code * base + sym
    return x0, code, h


def grid_cylinders(step, k, n_points=10**6):
    """{word: (min, max)} over grid points sharing that k-itinerary."""
    x0, code, h = grid_codes(step, k, n_points)
    order = np.argsort(code, kind="stable")
    code_s, x_s = code[order], x0[order]
    starts = np.flatnonzero(np.r_[True, code_s[1:] != code_s[:-1]])
    ends = np.r_[starts[1:], len(code_s)]
    out = {}
    for a, b in zip(starts, ends):
        c = int(code_s[a])
        word = tuple((c >> (k - 1 - j)) & 1 for j in range(k))
        out[word] = (float(x_s[a:b].min()), float(x_s[a:b].max()))
    return out, h


def w1_exact(atoms1, atoms2):
    """W1 of two finite atomic measures as the exact integral of |F1 - F2|.

    Atoms are (position, weight) pairs of Fractions.
    """
    pts = sorted({p for p, _ in atoms1} | {p for p, _ in atoms2})
    total = Fraction(0)
    f1 = f2 = Fraction(0)
    m1, m2 = dict(), dict()
    for p, w in atoms1:
        m1[p] = m1.get(p, 0) + w
    for p, w in atoms2:
        m2[p] = m2.get(p, 0) + w
    for a, b in zip(pts, pts[1:]):
        f1 += m1.get(a, 0)
        f2 += m2.get(a, 0)
        total += abs(f1 - f2) * (b - a)
    return total


def w1_to_uniform(atoms):
    """Exact integral of |F(x) - x| over [0, 1] for a finite atomic F."""
    pts = [Fraction(0)] + sorted(p for p, _ in atoms) + [Fraction(1)]
    mass = dict()
    for p, w in atoms:
        mass[p] = mass.get(p, 0) + w
    total = Fraction(0)
    F = Fraction(0)
    for a, b in zip(pts, pts[1:]):
        F += mass.get(a, 0)
        # integral of |F - x| on [a, b] with F constant
        if F <= a:
            total += ((b - F) ** 2 - (a - F) ** 2) / 2
        elif F >= b:
            total += ((F - a) ** 2 - (F - b) ** 2) / 2
        else:
            total += ((F - a) ** 2 + (b - F) ** 2) / 2
    return total


def grid_cylinders_upto(step, k_max, n_points=10**6):
    """{k: {word: (min, max)}} for k = 1..k_max from one pass over the grid."""
    x0, code, h = grid_codes(step, k_max, n_points)
    out = {}
    for k in range(1, k_max + 1):
        ck = code >> (k_max - k)
        order = np.argsort(ck, kind="stable")
        cs, xs = ck[order], x0[order]
        starts = np.flatnonzero(np.r_[True, cs[1:] != cs[:-1]])
        lo = np.minimum.reduceat(xs, starts)
        hi = np.maximum.reduceat(xs, starts)
        level = {}
        for c, a, b in zip(cs[starts].tolist(), lo.tolist(), hi.tolist()):
            level[tuple((c >> (k - 1 - j)) & 1 for j in range(k))] = (a, b)
        out[k] = level
    return out, h
