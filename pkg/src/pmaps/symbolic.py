"""Cylinders of the refined partitions by itinerary words.

A k-cylinder is the set of points whose first k branch symbols equal a given
word. Branches are monotone homeomorphisms onto their images, so every
nonempty cylinder is a single open interval, computed by pulling the last
branch domain back through the inverses of the earlier symbols.
"""

from __future__ import annotations

from dataclasses import dataclass

from pmaps.errors import DepthCapExceeded
from pmaps.maps import Interval, PiecewiseMonotonicMap

DEPTH_CAP = 20
DEGENERATE_WIDTH = 1e-15


@dataclass(frozen=True)
class Cylinder:
    word: tuple
    interval: Interval | None
    degenerate: bool = False

    @property
    def empty(self) -> bool:
        return self.interval is None

    @property
    def lo(self):
        return None if self.interval is None else self.interval.lo

    @property
    def hi(self):
        return None if self.interval is None else self.interval.hi

    @property
    def diameter(self):
        return 0 if self.interval is None else self.interval.hi - self.interval.lo

    def __len__(self):
        return len(self.word)


def preimage(T: PiecewiseMonotonicMap, i: int, J: Interval | None) -> Interval | None:
    """``(branch i)^{-1}(J)``, a subinterval of the branch domain, or None if empty.

    Endpoints falling outside the branch image map to the domain endpoints
    exactly, so no inverse is evaluated there.
    """
    if J is None:
        return None
    b = T.branches[i]
    img = b.image
    u, v = max(J.lo, img.lo), min(J.hi, img.hi)
    if u >= v:
        return None
    dom = b.domain
    if b.increasing:
        lo = dom.lo if u == img.lo else b.inverse(u)
        hi = dom.hi if v == img.hi else b.inverse(v)
    else:
        lo = dom.lo if v == img.hi else b.inverse(v)
        hi = dom.hi if u == img.lo else b.inverse(u)
    lo, hi = max(lo, dom.lo), min(hi, dom.hi)
    if lo >= hi:
        return None
    return Interval(lo, hi)


def forward_image(T: PiecewiseMonotonicMap, i: int, J: Interval) -> Interval:
    """Image of a subinterval ``J`` of branch ``i``'s domain, orientation-aware."""
    b = T.branches[i]
    dom, img = b.domain, b.image
    if b.increasing:
        lo = img.lo if J.lo == dom.lo else b(J.lo)
        hi = img.hi if J.hi == dom.hi else b(J.hi)
    else:
        lo = img.lo if J.hi == dom.hi else b(J.hi)
        hi = img.hi if J.lo == dom.lo else b(J.lo)
    return Interval(lo, hi)


def _finish(T, word, J) -> Cylinder:
    if J is not None and not T.exact and J.hi - J.lo <= DEGENERATE_WIDTH:
        return Cylinder(tuple(word), None, degenerate=True)
    return Cylinder(tuple(word), J)


def pull_back(T: PiecewiseMonotonicMap, word, J: Interval | None) -> Interval | None:
    """Points whose itinerary starts with ``word`` and whose ``len(word)``-th iterate lies in J."""
    for i in reversed(word):
        J = preimage(T, i, J)
        if J is None:
            return None
    return J


def cylinder_of_word(T: PiecewiseMonotonicMap, word) -> Cylinder:
    word = tuple(int(w) for w in word)
    if not word:
        return Cylinder((), Interval(T.coerce(0), T.coerce(1)))
    J = T.branches[word[-1]].domain
    return _finish(T, word, pull_back(T, word[:-1], J))


def cylinder_of_point(T: PiecewiseMonotonicMap, x, k: int) -> Cylinder:
    trace = T.iterate(x, k)
    return cylinder_of_word(T, trace.word)


def enumerate_cylinders(T: PiecewiseMonotonicMap, k: int, depth_cap: int = DEPTH_CAP):
    """All nonempty k-cylinders, in lexicographic order of their words."""
    if k > depth_cap:
        raise DepthCapExceeded(f"depth {k} exceeds cap {depth_cap}")
    if k <= 0:
        return [cylinder_of_word(T, ())]
    level = [((i,), b.domain) for i, b in enumerate(T.branches)]
    for _ in range(k - 1):
        nxt = []
        for i in range(T.n_branches):
            for w, J in level:
                P = preimage(T, i, J)
                if P is not None:
                    nxt.append(((i,) + w, P))
        level = nxt
    out = []
    for w, J in level:
        cyl = _finish(T, w, J)
        if not cyl.empty:
            out.append(cyl)
    return out


def shrinking_report(T: PiecewiseMonotonicMap, x, k_max: int):
    """``[(k, diam xi_k(x)) for k = 0..k_max]``."""
    trace = T.iterate(x, k_max)
    return [(k, cylinder_of_word(T, trace.word[:k]).diameter) for k in range(k_max + 1)]
