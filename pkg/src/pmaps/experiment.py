"""The periodic-approximation experiment.

Target: the empirical measure of a long seeded orbit. From a base point on that
orbit, every covering time up to ``l_max`` gives a periodic orbit; each one is
compared with the target by W1 and by the depth-m cylinder discrepancy.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from pmaps.errors import (
    CriticalPoint,
    LowEntropyWarning,
    NoCoveringTimesWarning,
    NoSignChange,
    ToleranceNotMet,
    ValidationError,
)
from pmaps.mapspec import load_map_spec, parse_number
from pmaps.maps import PiecewiseMonotonicMap
from pmaps.measure import CylinderPartition, block_entropy, empirical_measure, w1_distance
from pmaps.periodic import find_periodic_point, periodic_measure
from pmaps.tower import covering_times

log = logging.getLogger(__name__)

# Seed points of exact orbits are k / SEED_DENOMINATOR. The denominator is a
# safe prime p = 3 (mod 8), so 2 is a primitive root and integer-slope orbits
# (tent, doubling) have period about p/2 instead of collapsing.
SEED_DENOMINATOR = 576460752303397499
MAX_RESEEDS = 10
ENTROPY_FLOOR = 0.1
REPORT_HEADER = ("l", "p", "minimal_period", "w1", "discrepancy_m", "residual")


@dataclass
class ExperimentConfig:
    map_spec: str
    seed: int = 0
    length: int = 1_000_000
    burn_in: int = 0
    l_max: int = 64
    margin: float = 1e-9
    depth_m: int = 6
    out: str | None = None
    backend: str | None = None
    start: str | None = None
    base: str | None = None
    tol: float = 1e-9
    recurrence_bases: int = 0

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must be an unsigned 64-bit integer")
        if self.length < 1 or self.depth_m < 1:
            raise ValidationError("length and depth_m must be positive")
        if self.burn_in < 0 or self.l_max < 0 or self.recurrence_bases < 0:
            raise ValidationError("burn_in, l_max and recurrence_bases must be nonnegative")
        if self.burn_in >= self.length + 1:
            raise ValidationError("burn_in must leave at least one orbit point")
        if self.margin < 0 or self.tol <= 0:
            raise ValidationError("margin must be >= 0 and tol > 0")

    def build_map(self) -> PiecewiseMonotonicMap:
        return load_map_spec(self.map_spec, self.backend)


@dataclass(frozen=True)
class ApproximationRow:
    l: int
    p: object
    minimal_period: int
    w1: float
    discrepancy_m: float
    residual: object


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator; the only source of randomness in experiments."""
    return np.random.Generator(np.random.PCG64(seed))


def draw_point(T: PiecewiseMonotonicMap, rng: np.random.Generator):
    if T.exact:
        return Fraction(int(rng.integers(1, SEED_DENOMINATOR)), SEED_DENOMINATOR)
    x = 0.0
    while x == 0.0:
        x = float(rng.random())
    return x


def seeded_orbit(T: PiecewiseMonotonicMap, seed: int, length: int, start=None):
    """Orbit of ``length`` steps from ``start`` or from a seeded random point.

    Random starts are redrawn (same generator stream) when the orbit hits the
    critical set, up to MAX_RESEEDS attempts.
    """
    if start is not None:
        x0 = parse_number(start) if isinstance(start, str) else start
        return T.iterate(x0, length)
    rng = make_rng(seed)
    last = None
    for _ in range(MAX_RESEEDS):
        try:
            return T.iterate(draw_point(T, rng), length)
        except CriticalPoint as exc:
            last = exc
    raise last


def _base_indices(trace, burn_in, l_max, extra):
    bases = [burn_in]
    if extra <= 0 or l_max < 1:
        return bases
    xs = trace.as_floats()
    stop = min(len(xs) - l_max, burn_in + 1000)
    scores = []
    for i in range(burn_in + 1, stop):
        scores.append((float(np.min(np.abs(xs[i + 1 : i + l_max + 1] - xs[i]))), i))
    scores.sort()
    bases.extend(i for _, i in scores[:extra])
    return bases


# per-process state for row workers
_ROW_STATE = {}


def _init_rows(T, target, part, target_masses, tol, margin):
    _ROW_STATE.update(
        T=T, target=target, part=part, target_masses=target_masses, tol=tol, margin=margin
    )


def _row(hit):
    s = _ROW_STATE
    T = s["T"]
    try:
        orbit = find_periodic_point(T, hit.cylinder, tol=s["tol"], margin=s["margin"], image=hit.D)
    except (NoSignChange, ToleranceNotMet, CriticalPoint) as exc:
        return None, f"l={hit.l}: {exc}"
    mu_p = periodic_measure(T, orbit)
    masses, _ = s["part"].masses(mu_p)
    disc = float(np.max(np.abs(masses - s["target_masses"])))
    row = ApproximationRow(
        l=hit.l,
        p=orbit.p,
        minimal_period=orbit.minimal_period,
        w1=w1_distance(mu_p, s["target"]),
        discrepancy_m=disc,
        residual=orbit.residual,
    )
    return row, None


def _entropy_check(T, trace, burn_in):
    word = trace.word[burn_in:]
    if len(word) < 2:
        return
    n = max(1, min(10, int(math.log(max(len(word) / 100, 1)) / math.log(T.n_branches))))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rate = block_entropy(word, n, T.n_branches).rate
    if rate <= ENTROPY_FLOOR:
        warnings.warn(
            f"target orbit has block-entropy rate {rate:.3f} <= {ENTROPY_FLOOR}; "
            "positive metric entropy is doubtful",
            LowEntropyWarning,
            stacklevel=3,
        )


def run_approximation_experiment(config: ExperimentConfig, workers: int = 1):
    """Rows ordered by l, one per covering time with a certified periodic point."""
    T = config.build_map()
    trace = seeded_orbit(T, config.seed, config.length, config.start)
    target = empirical_measure(trace, config.burn_in)
    _entropy_check(T, trace, config.burn_in)
    if config.l_max == 0:
        return []

    if config.base is not None:
        bases = [T.coerce(parse_number(config.base))]
    else:
        idx = _base_indices(trace, config.burn_in, config.l_max, config.recurrence_bases)
        bases = [trace.points[i] for i in idx]
    hits = []
    for y in bases:
        hits.extend(covering_times(T, y, config.l_max, config.margin).hits)
    if not hits:
        warnings.warn(
            f"no covering times up to l={config.l_max}", NoCoveringTimesWarning, stacklevel=2
        )
        return []

    part = CylinderPartition(T, config.depth_m)
    target_masses, _ = part.masses(target)
    initargs = (T, target, part, target_masses, config.tol, config.margin)
    if workers > 1 and len(hits) > 1:
        with ProcessPoolExecutor(max_workers=workers, initializer=_init_rows, initargs=initargs) as ex:
            results = list(ex.map(_row, hits, chunksize=max(1, len(hits) // (4 * workers))))
    else:
        _init_rows(*initargs)
        results = [_row(h) for h in hits]

    rows = {}
    for row, err in results:
        if err is not None:
            log.warning("skipping covering time %s", err)
            continue
        rows.setdefault((row.l, float(row.p)), row)
    return [rows[k] for k in sorted(rows)]


def _run_one(config):
    return run_approximation_experiment(config)


def run_experiments(configs, workers: int = 1):
    """Run independent experiments, concurrently when ``workers > 1``; results keep input order."""
    if workers > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(_run_one, configs))
    return [run_approximation_experiment(c) for c in configs]


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return format(float(v), ".17g")


def format_report(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_HEADER)
    for r in sorted(rows, key=lambda r: (r.l, float(r.p))):
        w.writerow([r.l, _fmt(float(r.p)), r.minimal_period, _fmt(r.w1), _fmt(r.discrepancy_m), _fmt(float(r.residual))])
    return buf.getvalue()


def emit_report(rows, path) -> str:
    """Write the CSV report (header always present); returns the path."""
    text = format_report(rows)
    try:
        parent = os.path.dirname(os.fspath(path))
        if parent:
            os.makedirs(parent, exist_ok=True)
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write report to {path}: {exc.strerror}") from exc
    return path
