"""Finitely supported measures, weak-* distances and entropy estimators."""

from __future__ import annotations

import csv
import math
import warnings
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from pmaps import kernels
from pmaps.errors import (
    BlockTooLong,
    BoundaryAtomWarning,
    EmptyAfterBurnIn,
    NonAffineMap,
    ShortStreamWarning,
    ValidationError,
)
from pmaps.maps import OrbitTrace, PiecewiseMonotonicMap, RationalPoints
from pmaps.symbolic import DEPTH_CAP, enumerate_cylinders

MERGE_TOL = 1e-12
BOUNDARY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Probability measure with atoms at sorted, distinct ``positions``."""

    positions: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.positions, dtype=np.float64)
        w = np.asarray(self.weights, dtype=np.float64)
        if x.ndim != 1 or x.shape != w.shape or x.size == 0:
            raise ValidationError("positions and weights must be equal-length, nonempty 1-d arrays")
        if np.any(w <= 0):
            raise ValidationError("weights must be positive")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValidationError(f"weights sum to {w.sum()!r}, not 1")
        if x[0] < 0 or x[-1] > 1:
            raise ValidationError("positions must lie in [0, 1]")
        if np.any(np.diff(x) <= 0):
            raise ValidationError("positions must be strictly increasing")
        object.__setattr__(self, "positions", x)
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return self.positions.size

    @classmethod
    def dirac(cls, x) -> "DiscreteMeasure":
        return cls(np.array([float(x)]), np.array([1.0]))

    @classmethod
    def from_points(cls, points, weights=None, merge_tol=MERGE_TOL) -> "DiscreteMeasure":
        """Measure with mass ``weights[j]`` (default uniform) at ``points[j]``.

        Coinciding atoms are merged: exactly for rational points, within
        ``merge_tol`` for floats.
        """
        if isinstance(points, RationalPoints) and weights is None:
            nums, counts = np.unique(points.numerators, return_counts=True)
            return cls._from_sorted(nums / points.denominator, counts / counts.sum(), 0.0)
        pts = list(points) if not isinstance(points, np.ndarray) else points
        if len(pts) == 0:
            raise ValidationError("cannot build a measure from no points")
        if weights is None and isinstance(pts[0], Fraction):
            tally = Counter(pts)
            keys = sorted(tally)
            counts = np.array([tally[k] for k in keys], dtype=np.float64)
            xs = np.array([float(k) for k in keys])
            return cls._from_sorted(xs, counts / counts.sum(), 0.0)
        xs = np.array([float(p) for p in pts]) if not isinstance(pts, np.ndarray) else pts.astype(np.float64)
        w = np.full(xs.size, 1.0 / xs.size) if weights is None else np.asarray(weights, dtype=np.float64)
        order = np.argsort(xs, kind="stable")
        return cls._from_sorted(xs[order], w[order] / w.sum(), merge_tol)

    @classmethod
    def _from_sorted(cls, xs, ws, merge_tol):
        starts = np.concatenate(([True], np.diff(xs) > merge_tol))
        idx = np.flatnonzero(starts)
        return cls(xs[idx], np.add.reduceat(ws, idx))

    def mass(self, lo, hi) -> float:
        """Mass of the open interval ``(lo, hi)``."""
        sel = (self.positions > lo) & (self.positions < hi)
        return float(self.weights[sel].sum())

    def push_forward(self, T: PiecewiseMonotonicMap) -> "DiscreteMeasure":
        return DiscreteMeasure.from_points(
            [float(T.evaluate(x)) for x in self.positions], self.weights
        )

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["position", "weight"])
            for x, m in zip(self.positions, self.weights):
                w.writerow([format(x, ".17g"), format(m, ".17g")])

    @classmethod
    def read_csv(cls, path) -> "DiscreteMeasure":
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        return cls.from_points(
            np.array([float(r["position"]) for r in rows]),
            np.array([float(r["weight"]) for r in rows]),
            merge_tol=0.0,
        )


def empirical_measure(trace: OrbitTrace, burn_in: int = 0) -> DiscreteMeasure:
    """Uniform measure on the trace points from index ``burn_in`` on."""
    if burn_in < 0:
        raise ValueError("burn_in must be nonnegative")
    if len(trace.points) <= burn_in:
        raise EmptyAfterBurnIn(f"trace has {len(trace.points)} points, burn-in is {burn_in}")
    return DiscreteMeasure.from_points(trace.points[burn_in:])


def w1_distance(mu1: DiscreteMeasure, mu2: DiscreteMeasure) -> float:
    """Wasserstein-1 distance: integral of |F1 - F2| over [0, 1]."""
    return float(kernels.w1_sorted(mu1.positions, mu1.weights, mu2.positions, mu2.weights))


class CylinderPartition:
    """The depth-m cylinders of a map, indexed for fast atom classification."""

    def __init__(self, T: PiecewiseMonotonicMap, m: int, depth_cap: int = DEPTH_CAP):
        self.map = T
        self.m = m
        cyls = enumerate_cylinders(T, m, depth_cap)
        order = sorted(range(len(cyls)), key=lambda j: float(cyls[j].lo))
        self.cylinders = [cyls[j] for j in order]
        self.lo = np.array([float(c.lo) for c in self.cylinders])
        self.hi = np.array([float(c.hi) for c in self.cylinders])

    def __len__(self):
        return len(self.cylinders)

    def classify(self, x: np.ndarray):
        """Cell index per point (-1 outside every cell) and a near-boundary mask."""
        idx = np.searchsorted(self.lo, x, side="right") - 1
        safe = np.clip(idx, 0, len(self) - 1)
        inside = (idx >= 0) & (x > self.lo[safe]) & (x < self.hi[safe])
        gap = np.minimum(x - self.lo[safe], self.hi[safe] - x)
        near = ~inside | (gap <= BOUNDARY_TOL)
        return np.where(inside, safe, -1), near

    def masses(self, mu: DiscreteMeasure):
        """Mass of each cell and the number of atoms flagged near a boundary."""
        idx, near = self.classify(mu.positions)
        ok = idx >= 0
        out = np.bincount(idx[ok], weights=mu.weights[ok], minlength=len(self))
        return out, int(near.sum())


@lru_cache(maxsize=16)
def _partition(T, m, depth_cap):
    return CylinderPartition(T, m, depth_cap)


def cylinder_discrepancy(
    T: PiecewiseMonotonicMap,
    mu1: DiscreteMeasure,
    mu2: DiscreteMeasure,
    m: int,
    depth_cap: int = DEPTH_CAP,
) -> float:
    """``max |mu1(Z) - mu2(Z)|`` over the depth-m cylinders Z."""
    part = _partition(T, m, depth_cap)
    a, na = part.masses(mu1)
    b, nb = part.masses(mu2)
    if na or nb:
        warnings.warn(
            f"{na + nb} atoms lie within {BOUNDARY_TOL:g} of a depth-{m} cylinder boundary",
            BoundaryAtomWarning,
            stacklevel=2,
        )
    return float(np.max(np.abs(a - b)))


@dataclass(frozen=True)
class EntropyEstimate:
    n: int
    H: float  # nats
    rate: float
    sample_size: int


def _as_stream(word_stream):
    w = np.asarray(word_stream, dtype=np.int64)
    if w.ndim != 1:
        raise ValueError("word stream must be one-dimensional")
    return w


def _block_counts(w, n, base):
    """Integer code per length-n window; equal codes mean equal blocks."""
    if base ** max(n, 1) < 2**62:
        return kernels.block_codes(w, n, base)
    view = np.lib.stride_tricks.sliding_window_view(w, n)
    _, codes = np.unique(view, axis=0, return_inverse=True)
    return codes.astype(np.int64).ravel()


def _plug_in(counts):
    p = counts / counts.sum()
    return float(-np.sum(p * np.log(p)))


def block_entropy(word_stream, n: int, alphabet_size: int | None = None) -> EntropyEstimate:
    """Plug-in entropy of the empirical length-n block distribution."""
    w = _as_stream(word_stream)
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > len(w):
        raise BlockTooLong(f"block length {n} exceeds stream length {len(w)}")
    base = alphabet_size or (int(w.max()) + 1 if len(w) else 1)
    base = max(base, 2)
    if len(w) < 100 * base ** (n / 2):
        warnings.warn(
            f"stream of {len(w)} symbols is short for block length {n}",
            ShortStreamWarning,
            stacklevel=2,
        )
    if n == 0:
        return EntropyEstimate(0, 0.0, 0.0, len(w) + 1)
    codes = _block_counts(w, n, base)
    _, counts = np.unique(codes, return_counts=True)
    H = _plug_in(counts)
    return EntropyEstimate(n, H, H / n, int(codes.size))


def conditional_information(word_stream, n: int, alphabet_size: int | None = None) -> float:
    """Average empirical information of the next symbol given the previous n.

    Equals ``H_{n+1}(stream) - H_n(stream[:-1])`` under the plug-in
    distribution of the (n+1)-blocks.
    """
    w = _as_stream(word_stream)
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n + 1 > len(w):
        raise BlockTooLong(f"block length {n + 1} exceeds stream length {len(w)}")
    base = max(alphabet_size or int(w.max()) + 1, 2)
    if base ** (n + 1) >= 2**62:
        full = _block_counts(w, n + 1, base)
        pre = _block_counts(w[:-1], n, base) if n else np.zeros(len(full), dtype=np.int64)
    else:
        full = kernels.block_codes(w, n + 1, base)
        pre = full // base
    uf, inv_f, cf = np.unique(full, return_inverse=True, return_counts=True)
    _, inv_p, cp = np.unique(pre, return_inverse=True, return_counts=True)
    # prefix count of each distinct full block
    first = np.zeros(uf.size, dtype=np.int64)
    first[inv_f] = np.arange(full.size)
    pref_counts = cp[inv_p[first]]
    M = full.size
    return float(-np.sum(cf * np.log(cf / pref_counts)) / M)


def lyapunov_entropy(T: PiecewiseMonotonicMap, trace: OrbitTrace) -> float:
    """Birkhoff average of ``log|slope|`` along the trace (affine maps only)."""
    if not T.is_affine:
        raise NonAffineMap("lyapunov_entropy needs affine branches")
    if trace.n == 0:
        raise ValueError("trace has no steps")
    logs = np.array([math.log(abs(float(b.slope))) for b in T.branches])
    visited = np.unique(trace.word)
    if np.unique(logs[visited]).size == 1:
        return float(logs[visited[0]])
    counts = np.bincount(trace.word, minlength=T.n_branches)
    return math.fsum(c * v for c, v in zip(counts, logs)) / trace.n
