"""Periodic points from covering cylinders.

If the closure of an l-cylinder ``C`` lies inside its image ``T^l C``, then
``g(p) = T^l(p) - p`` changes sign across ``C`` and has a root there. The root
is located by bisection on the composition of the cylinder's branch formulas.
For affine branches the root can also be solved exactly from the composed
affine form ``S p + B = p``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from pmaps.errors import CriticalPoint, NoCovering, NoSignChange, ToleranceNotMet
from pmaps.maps import Interval, PiecewiseMonotonicMap
from pmaps.measure import DiscreteMeasure
from pmaps.symbolic import Cylinder, forward_image

DEFAULT_TOL = 1e-9
METHODS = ("auto", "bisect", "exact")


@dataclass(frozen=True)
class PeriodicOrbit:
    p: object
    period: int
    minimal_period: int
    orbit: tuple
    residual: object
    word: tuple
    method: str
    # True when the fixed point of T^l in the cylinder is provably unique
    # (affine compositions); None when not certified.
    unique: bool | None = None


def cylinder_image(T: PiecewiseMonotonicMap, cyl: Cylinder) -> Interval:
    J = cyl.interval
    for i in cyl.word:
        J = forward_image(T, i, J)
    return J


def _orientation(T, word):
    sign = 1
    for i in word:
        sign *= 1 if T.branches[i].increasing else -1
    return sign


def _brackets(C, D, orientation, margin):
    """Whether ``T^l(x) - x`` changes sign across C (with ``margin`` to spare).

    Increasing compositions need the closure of C inside D. Decreasing ones
    only need D to reach past both ends of C, which covering implies.
    """
    if orientation > 0:
        return D.lo < C.lo and C.hi < D.hi and D.lo + margin <= C.lo and C.hi <= D.hi - margin
    return D.lo < C.hi and C.lo < D.hi and D.lo + margin <= C.hi and C.lo <= D.hi - margin


def _bisect(T, word, C, orientation):
    def g(x):
        return T.evaluate_along(word, x) - x

    lo, hi = C.lo, C.hi
    g_lo, g_hi = g(lo), g(hi)
    if orientation < 0:
        g_lo, g_hi = -g_lo, -g_hi
    # increasing composition: g < 0 at the left end, g > 0 at the right end
    if not (g_lo < 0 < g_hi):
        raise NoSignChange(
            f"g has no sign change across the cylinder (g(lo)={float(g_lo):.3g}, "
            f"g(hi)={float(g_hi):.3g}); the covering margin is too small"
        )
    for _ in range(200):
        mid = lo + (hi - lo) / 2
        if not lo < mid < hi:
            break
        gm = g(mid) * orientation
        if gm == 0:
            return mid
        if gm < 0:
            lo = mid
        else:
            hi = mid
    return min((lo, hi), key=lambda x: abs(g(x)))


def _exact_orbit(T, p: Fraction, l):
    pts = [p]
    word = []
    x = p
    for s in range(l):
        try:
            x, i = T.evaluate_exact(x)
        except CriticalPoint:
            raise CriticalPoint(x, s, 0) from None
        word.append(i)
        pts.append(x)
    return pts, tuple(word)


def _solve_exact(T, word, l):
    S, B = T.composed_affine(word, exact=True)
    if S == 1:
        raise NoSignChange("composed slope is 1; the fixed point is not isolated")
    p = B / (1 - S)
    pts, w = _exact_orbit(T, p, l)
    return p, pts, w, abs(pts[l] - p)


def _check(T, p, l):
    trace = T.iterate(p, l)
    pts = list(trace.points) if T.exact else [float(v) for v in trace.points]
    return pts, tuple(int(i) for i in trace.word), abs(pts[l] - pts[0])


def find_periodic_point(
    T: PiecewiseMonotonicMap,
    cyl: Cylinder,
    tol=DEFAULT_TOL,
    margin=0.0,
    method="auto",
    image: Interval | None = None,
) -> PeriodicOrbit:
    """Periodic point of period ``len(cyl.word)`` inside a covering cylinder.

    Raises NoCovering unless ``T^l(x) - x`` is forced to change sign across
    the cylinder; ``image`` may pass a precomputed ``T^l`` image of it.

    ``method`` is ``"bisect"`` (sign-change bisection in backend arithmetic),
    ``"exact"`` (affine maps: exact rational solve, with float coefficients
    read as the dyadic rationals they are), or ``"auto"``: exact under the
    rational backend, otherwise bisection with an exact fallback for affine
    maps when the double-precision root misses ``tol``. Chaotic expansion
    makes that fallback necessary for long periods: a double lies up to half
    an ulp from the true root, and ``T^l`` stretches that by ``|(T^l)'|``.
    """
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}")
    word = tuple(int(i) for i in cyl.word)
    l = len(word)
    if l == 0 or cyl.empty:
        raise NoCovering("empty cylinder")
    C = cyl.interval
    D = image if image is not None else cylinder_image(T, cyl)
    orientation = _orientation(T, word)
    if not _brackets(C, D, orientation, margin):
        raise NoCovering(
            f"image ({float(D.lo):.17g}, {float(D.hi):.17g}) does not cover the cylinder "
            f"({float(C.lo):.17g}, {float(C.hi):.17g}) with margin {margin:g}"
        )
    if method == "exact" or (method == "auto" and T.exact):
        if not T.is_affine:
            raise ValueError("exact solve needs affine branches")
        p, pts, w, residual = _solve_exact(T, word, l)
        used = "exact"
    else:
        used = "bisect"
        p = _bisect(T, word, C, orientation)
        try:
            pts, w, residual = _check(T, p, l)
            ok = residual <= tol and w == word
        except CriticalPoint:
            ok = False
        if not ok:
            if method == "auto" and T.is_affine:
                p, pts, w, residual = _solve_exact(T, word, l)
                used = "exact"
            else:
                raise ToleranceNotMet(
                    f"bisection root at l={l} misses tolerance {tol:g} or the cylinder word"
                )
    if w != word:
        raise ToleranceNotMet(f"periodic point itinerary {w} differs from cylinder word {word}")
    if residual > tol:
        raise ToleranceNotMet(f"residual {float(residual):.3g} exceeds tolerance {tol:g}")
    mp = _minimal_period_from(pts, l, tol)
    return PeriodicOrbit(
        p=p,
        period=l,
        minimal_period=mp,
        orbit=tuple(pts[:l]),
        residual=residual,
        word=word,
        method=used,
        unique=True if T.is_affine else None,
    )


def _divisors(l):
    return [d for d in range(1, l + 1) if l % d == 0]


def _minimal_period_from(pts, l, tol):
    p = pts[0]
    for d in _divisors(l):
        if abs(pts[d] - p) <= tol:
            return d
    return l


def minimal_period(T: PiecewiseMonotonicMap, p, l: int, tol=DEFAULT_TOL) -> int:
    """Smallest divisor d of l with ``|T^d p - p| <= tol``."""
    trace = T.iterate(p, l)
    return _minimal_period_from(list(trace.points), l, tol)


def periodic_measure(T: PiecewiseMonotonicMap, orbit: PeriodicOrbit) -> DiscreteMeasure:
    """Uniform measure on the orbit points (coinciding points merged)."""
    return DiscreteMeasure.from_points(list(orbit.orbit))
