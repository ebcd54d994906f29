"""Piecewise monotonic maps of the unit interval.

A map is given by critical points ``0 = c_0 < c_1 < ... < c_N = 1`` and one
strictly monotone continuous branch on each open interval ``(c_{i-1}, c_i)``.
Branches are affine (exact coefficients) or general (a forward evaluator whose
inverse is found by bisection).

Two numeric backends are supported. ``"float"`` works in IEEE doubles and treats
points within ``EPS_CRIT`` of the critical set as hitting it. ``"rational"``
requires affine branches with rational coefficients and works in exact
:class:`fractions.Fraction` arithmetic, where only exact hits count.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, NamedTuple, Sequence

import numpy as np

from pmaps import kernels
from pmaps.errors import CriticalPoint, NotInBranchImage, OutOfDomain, ValidationError

EPS_CRIT = 1e-12
EPS_INV = 1e-15
IMAGE_SLACK = 1e-12
DIRECTION_SAMPLES = 33
BACKENDS = ("float", "rational")

_INT64_MAX = 2**63 - 1


class Interval(NamedTuple):
    """Open interval ``(lo, hi)``."""

    lo: object
    hi: object

    @property
    def width(self):
        return self.hi - self.lo

    def contains(self, x) -> bool:
        return self.lo < x < self.hi

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def intersect(self, other: "Interval") -> "Interval | None":
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo >= hi:
            return None
        return Interval(lo, hi)

    def as_float(self) -> "Interval":
        return Interval(float(self.lo), float(self.hi))


UNIT = Interval(0, 1)


@dataclass(frozen=True, eq=False)
class BranchSpec:
    """One monotone branch.

    Affine branches carry ``slope`` and ``intercept``; general branches carry
    ``func``, which must be continuous on the closed domain. ``domain`` and
    ``image`` are filled in when the branch is attached to a map.
    """

    increasing: bool
    slope: object = None
    intercept: object = None
    func: Callable[[float], float] | None = None
    domain: Interval | None = None
    image: Interval | None = None

    @property
    def kind(self) -> str:
        return "affine" if self.func is None else "general"

    @property
    def is_affine(self) -> bool:
        return self.func is None

    def __call__(self, x):
        """Branch formula at ``x``; no domain checks."""
        if self.func is None:
            return self.slope * x + self.intercept
        lo, hi = float(self.domain.lo), float(self.domain.hi)
        return float(self.func(min(max(float(x), lo), hi)))

    def inverse(self, y):
        """Preimage of ``y`` under the branch; no image checks."""
        if self.func is None:
            return (y - self.intercept) / self.slope
        y = float(y)
        lo, hi = float(self.domain.lo), float(self.domain.hi)
        sign = 1.0 if self.increasing else -1.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi or hi - lo <= EPS_INV:
                break
            if sign * (float(self.func(mid)) - y) < 0:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)


def affine(slope, intercept) -> BranchSpec:
    if slope == 0:
        raise ValidationError("affine branch slope must be nonzero")
    return BranchSpec(increasing=slope > 0, slope=slope, intercept=intercept)


def general(func: Callable[[float], float], increasing: bool) -> BranchSpec:
    return BranchSpec(increasing=bool(increasing), func=func)


class RationalPoints(Sequence):
    """Orbit points ``numerators[s] / denominator`` stored as int64 numerators."""

    def __init__(self, numerators: np.ndarray, denominator: int):
        self.numerators = numerators
        self.denominator = int(denominator)

    def __len__(self):
        return len(self.numerators)

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return RationalPoints(self.numerators[idx], self.denominator)
        return Fraction(int(self.numerators[idx]), self.denominator)

    def to_floats(self) -> np.ndarray:
        return self.numerators / self.denominator

    def __repr__(self):
        return f"RationalPoints(n={len(self)}, denominator={self.denominator})"


@dataclass(frozen=True)
class OrbitTrace:
    points: Sequence
    word: np.ndarray
    min_critical_distance: float

    @property
    def n(self) -> int:
        return len(self.word)

    def as_floats(self) -> np.ndarray:
        if isinstance(self.points, RationalPoints):
            return self.points.to_floats()
        return np.array([float(p) for p in self.points], dtype=np.float64)

    def __len__(self):
        return len(self.points)


class PiecewiseMonotonicMap:
    """A piecewise monotonic map ``T`` of ``[0, 1]``.

    Parameters
    ----------
    critical_points : sequence
        ``0 = c_0 < ... < c_N = 1`` with ``N > 1``.
    branches : sequence of BranchSpec
        ``N`` branches; branch ``i`` lives on ``(c_i, c_{i+1})`` (0-based).
    backend : {"float", "rational"}
    name : str, optional

    Instances are immutable and can be shared between threads and processes.
    """

    def __init__(self, critical_points, branches, backend="float", name=None):
        if backend not in BACKENDS:
            raise ValidationError(f"unknown backend {backend!r}")
        self.backend = backend
        self.name = name
        self.exact = backend == "rational"
        self.eps_crit = 0 if self.exact else EPS_CRIT

        crit = [self.coerce_number(c, "critical point") for c in critical_points]
        branches = list(branches)
        if len(crit) < 3:
            raise ValidationError("need N > 1 branches (at least 3 critical points)")
        if crit[0] != 0 or crit[-1] != 1:
            raise ValidationError("critical points must start at 0 and end at 1")
        if any(a >= b for a, b in zip(crit, crit[1:])):
            raise ValidationError("critical points must be strictly increasing")
        if len(branches) != len(crit) - 1:
            raise ValidationError(
                f"{len(crit) - 1} branch domains but {len(branches)} branches given"
            )
        self.critical_points = tuple(crit)
        self._crit_float = np.array([float(c) for c in crit], dtype=np.float64)
        self.branches = tuple(
            self._attach(i, b, Interval(crit[i], crit[i + 1])) for i, b in enumerate(branches)
        )
        self.is_affine = all(b.is_affine for b in self.branches)
        if self.is_affine and not self.exact:
            self._slopes = np.array([float(b.slope) for b in self.branches])
            self._intercepts = np.array([float(b.intercept) for b in self.branches])
        self._int_kernel = self._int_kernel_data() if self.exact else None

    # construction helpers

    def coerce_number(self, v, what="value"):
        if self.exact:
            if isinstance(v, (Fraction, int)):
                return Fraction(v)
            if isinstance(v, float):
                raise ValidationError(
                    f"{what} {v!r} is a float; the rational backend needs exact rationals"
                )
            raise ValidationError(f"{what} {v!r} is not rational")
        return float(v)

    def _attach(self, i, spec: BranchSpec, dom: Interval) -> BranchSpec:
        where = f"branch {i} on ({float(dom.lo):.6g}, {float(dom.hi):.6g})"
        if spec.is_affine:
            slope = self.coerce_number(spec.slope, f"{where} slope")
            intercept = self.coerce_number(spec.intercept, f"{where} intercept")
            if slope == 0:
                raise ValidationError(f"{where}: slope must be nonzero")
            if (slope > 0) != spec.increasing:
                raise ValidationError(f"{where}: slope sign contradicts declared direction")
            spec = replace(spec, slope=slope, intercept=intercept, domain=dom)
            a, b = spec(dom.lo), spec(dom.hi)
        else:
            if self.exact:
                raise ValidationError(f"{where}: general branches need the float backend")
            spec = replace(spec, domain=dom)
            lo, hi = float(dom.lo), float(dom.hi)
            ts = [lo + (hi - lo) * k / (DIRECTION_SAMPLES - 1) for k in range(DIRECTION_SAMPLES)]
            ts[-1] = hi
            vals = [float(spec.func(t)) for t in ts]
            if not all(math.isfinite(v) for v in vals):
                raise ValidationError(f"{where}: evaluator returned a non-finite value")
            steps = [v2 - v1 for v1, v2 in zip(vals, vals[1:])]
            ok = all(s > 0 for s in steps) if spec.increasing else all(s < 0 for s in steps)
            if not ok:
                raise ValidationError(f"{where}: not strictly monotone in the declared direction")
            a, b = vals[0], vals[-1]
        lo, hi = (a, b) if spec.increasing else (b, a)
        slack = 0 if self.exact else IMAGE_SLACK
        if lo < -slack or hi > 1 + slack:
            raise ValidationError(
                f"{where}: image ({float(lo):.6g}, {float(hi):.6g}) leaves [0, 1]"
            )
        if not self.exact:
            lo, hi = min(max(lo, 0.0), 1.0), min(max(hi, 0.0), 1.0)
        return replace(spec, image=Interval(lo, hi))

    def _int_kernel_data(self):
        if not self.is_affine:
            return None
        if any(b.slope.denominator != 1 or b.intercept.denominator != 1 for b in self.branches):
            return None
        slopes = [int(b.slope) for b in self.branches]
        inters = [int(b.intercept) for b in self.branches]
        return slopes, inters, max(abs(s) + abs(b) for s, b in zip(slopes, inters))

    # basic properties

    @property
    def n_branches(self) -> int:
        return len(self.branches)

    def __repr__(self):
        label = self.name or "map"
        return f"<PiecewiseMonotonicMap {label} N={len(getattr(self, 'branches', ()))} backend={self.backend}>"

    def coerce(self, x):
        """Convert a point to the backend's number type."""
        if self.exact:
            return x if isinstance(x, Fraction) else Fraction(x)
        return float(x)

    def with_backend(self, backend: str) -> "PiecewiseMonotonicMap":
        """Same map on another backend; doubles become the exact dyadic rationals they are."""
        crit = self.critical_points
        specs = [replace(b, domain=None, image=None) for b in self.branches]
        if backend == "rational" and not self.exact:
            crit = [Fraction(c) for c in crit]
            specs = [
                replace(b, slope=Fraction(b.slope), intercept=Fraction(b.intercept)) if b.is_affine else b
                for b in specs
            ]
        return PiecewiseMonotonicMap(crit, specs, backend=backend, name=self.name)

    # point operations

    def _locate(self, x):
        i = bisect.bisect_right(self.critical_points, x) - 1
        i = min(max(i, 0), self.n_branches - 1)
        c = self.critical_points
        return i, min(x - c[i], c[i + 1] - x)

    def critical_distance(self, x):
        return self._locate(self.coerce(x))[1]

    def branch_of(self, x) -> int:
        x = self.coerce(x)
        if not 0 <= x <= 1:
            raise OutOfDomain(f"{float(x)!r} is outside [0, 1]")
        i, d = self._locate(x)
        if d <= self.eps_crit:
            raise CriticalPoint(x, 0, d)
        return i

    def evaluate(self, x):
        x = self.coerce(x)
        return self.branches[self.branch_of(x)](x)

    def invert_branch(self, i: int, y):
        b = self.branches[i]
        y = self.coerce(y)
        if not b.image.contains(y):
            raise NotInBranchImage(
                f"{float(y)!r} is not in the image ({float(b.image.lo):.17g}, "
                f"{float(b.image.hi):.17g}) of branch {i}"
            )
        return b.inverse(y)

    def evaluate_along(self, word, x):
        """Compose the branch formulas named by ``word``, ignoring domains."""
        for i in word:
            x = self.branches[i](x)
        return x

    def iterate(self, x, n: int) -> OrbitTrace:
        """Orbit ``x, Tx, ..., T^n x`` with its itinerary.

        Raises CriticalPoint (with ``.step``) when ``T^s x`` for ``s < n`` is
        within the critical tolerance of C.
        """
        if n < 0:
            raise ValueError("n must be nonnegative")
        x = self.coerce(x)
        if not 0 <= x <= 1:
            raise OutOfDomain(f"{float(x)!r} is outside [0, 1]")
        if self.is_affine and not self.exact:
            return self._iterate_float_kernel(x, n)
        if self._int_kernel is not None:
            trace = self._iterate_int_kernel(x, n)
            if trace is not None:
                return trace
        return self._iterate_generic(x, n)

    def _iterate_generic(self, x, n):
        points = [x]
        word = np.empty(n, dtype=np.int64)
        mind = math.inf
        for s in range(n):
            i, d = self._locate(x)
            mind = min(mind, float(d))
            if d <= self.eps_crit:
                raise CriticalPoint(x, s, d)
            word[s] = i
            x = self.branches[i](x)
            points.append(x)
        mind = min(mind, float(self._locate(x)[1]))
        if not self.exact:
            points = np.array(points, dtype=np.float64)
        return OrbitTrace(points, word, mind)

    def _iterate_float_kernel(self, x, n):
        pts, word, mind, fail = kernels.affine_orbit_float(
            x, n, self._crit_float, self._slopes, self._intercepts, self.eps_crit
        )
        if fail >= 0:
            x = float(pts[fail])
            raise CriticalPoint(x, int(fail), self._locate(x)[1])
        return OrbitTrace(pts, word, float(mind))

    def _iterate_int_kernel(self, x: Fraction, n):
        slopes, inters, scale = self._int_kernel
        q = x.denominator
        if scale * q > _INT64_MAX:
            return None
        thr, exact_flags = [], []
        for c in self.critical_points[1:-1]:
            t = c * q
            thr.append(math.floor(t))
            exact_flags.append(t.denominator == 1)
        nums, word, fail = kernels.affine_orbit_int(
            x.numerator,
            q,
            n,
            np.array(thr, dtype=np.int64),
            np.array(exact_flags, dtype=np.uint8),
            np.array(slopes, dtype=np.int64),
            np.array([b * q for b in inters], dtype=np.int64),
        )
        if fail >= 0:
            raise CriticalPoint(Fraction(int(nums[fail]), q), int(fail), 0)
        pts = RationalPoints(nums, q)
        xf = pts.to_floats()
        mind = float(np.min(np.abs(xf[:, None] - self._crit_float[None, :]))) if len(xf) else math.inf
        return OrbitTrace(pts, word, mind)

    # exact helpers for affine maps

    def exact_coefficients(self, i):
        """Branch ``i`` coefficients as Fractions (float coefficients taken as dyadic rationals)."""
        b = self.branches[i]
        if not b.is_affine:
            raise TypeError("exact coefficients exist only for affine branches")
        return Fraction(b.slope), Fraction(b.intercept)

    def composed_affine(self, word, exact=True):
        """Coefficients ``(S, B)`` with ``T_{w_{l-1}} o ... o T_{w_0}(x) = S x + B``."""
        S, B = (Fraction(1), Fraction(0)) if exact else (1.0, 0.0)
        for i in word:
            if exact:
                s, b = self.exact_coefficients(i)
            else:
                s, b = float(self.branches[i].slope), float(self.branches[i].intercept)
            S, B = s * S, s * B + b
        return S, B

    def evaluate_exact(self, x: Fraction, check=True):
        """Exact evaluation of an affine map at a rational point."""
        x = Fraction(x)
        crit = [Fraction(c) for c in self.critical_points]
        i = bisect.bisect_right(crit, x) - 1
        i = min(max(i, 0), self.n_branches - 1)
        if check and (x <= crit[i] or x >= crit[i + 1]):
            raise CriticalPoint(x, 0, 0)
        s, b = self.exact_coefficients(i)
        return s * x + b, i
