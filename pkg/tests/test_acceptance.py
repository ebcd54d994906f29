"""Acceptance criteria 1-8, each at its stated tolerance.

Every test records one PASS/FAIL line; the lines are repeated in the pytest
terminal summary under "acceptance criteria".
"""

import math
import subprocess
import sys
import time
import warnings
from fractions import Fraction

import numpy as np
import pytest

from pmaps import (
    DiscreteMeasure,
    ShortStreamWarning,
    block_entropy,
    covering_times,
    cylinder_of_point,
    cylinder_of_word,
    enumerate_cylinders,
    find_periodic_point,
    lyapunov_entropy,
    periodic_measure,
    w1_distance,
)
from pmaps.experiment import ExperimentConfig, draw_point, make_rng, run_approximation_experiment, seeded_orbit
from pmaps.zoo import GOLDEN, ZOO, zoo_map

from oracles import golden_step, grid_cylinders_upto, tent_step

pytestmark = pytest.mark.acceptance


def orbit_of(T, p, l):
    """Points and word of p under l steps, exact when p is an exact root."""
    if isinstance(p, Fraction):
        pts, word, x = [p], [], p
        for _ in range(l):
            x, i = T.evaluate_exact(x)
            pts.append(x)
            word.append(i)
        return pts, tuple(word)
    tr = T.iterate(p, l)
    return list(tr.points), tuple(int(i) for i in tr.word)


def test_criterion_1_cylinder_grid_oracle(acceptance):
    t0 = time.perf_counter()
    worst = 0.0
    checked = 0
    missing = []
    for name, step in (("tent", tent_step), ("golden", golden_step)):
        T = zoo_map(name, backend="float")
        oracle, h = grid_cylinders_upto(step, 10, n_points=10**6)
        for k in range(1, 11):
            cyls = enumerate_cylinders(T, k)
            assert {c.word for c in cyls} >= set(oracle[k])
            for c in cyls:
                if c.word not in oracle[k]:
                    # admissible but narrower than the grid: must be tiny
                    if c.diameter > 2 * h:
                        missing.append((name, c.word))
                    continue
                lo, hi = oracle[k][c.word]
                direct = cylinder_of_word(T, c.word)
                worst = max(worst, abs(lo - direct.lo) / h, abs(hi - direct.hi) / h)
                checked += 1
    elapsed = time.perf_counter() - t0
    ok = worst <= 2 and not missing and elapsed <= 60
    acceptance(1, ok, f"{checked} cylinders, worst endpoint error {worst:.3f} grid steps (<= 2), {elapsed:.1f}s (<= 60s)")
    assert ok


def test_criterion_2_shrinking(acceptance):
    rng = make_rng(2)
    tent = zoo_map("tent")
    tent_ok = True
    for _ in range(20):
        x = draw_point(tent, rng)
        for k in range(21):
            tent_ok &= cylinder_of_point(tent, x, k).diameter == Fraction(1, 2**k)
    golden = zoo_map("golden")
    excess = -math.inf
    for _ in range(20):
        x = draw_point(golden, rng)
        for k in range(21):
            excess = max(excess, cylinder_of_point(golden, x, k).diameter - GOLDEN**-k)
    ok = tent_ok and excess <= 1e-12
    acceptance(2, ok, f"tent diam == 2^-k exactly: {tent_ok}; golden max(diam - beta^-k) = {excess:.3g} (<= 1e-12)")
    assert ok


@pytest.fixture(scope="module")
def approximation_runs():
    t0 = time.perf_counter()
    runs = {}
    for name in ("tent", "golden"):
        for seed in range(10):
            cfg = ExperimentConfig(ZOO[name], seed=seed, length=10**6, l_max=64)
            runs[name, seed] = run_approximation_experiment(cfg)
    return runs, time.perf_counter() - t0


def test_criterion_3_periodic_approximation(acceptance, approximation_runs):
    runs, elapsed = approximation_runs
    parts = []
    ok = elapsed <= 300
    for name in ("tent", "golden"):
        good = 0
        bests = []
        for seed in range(10):
            rows = runs[name, seed]
            w = [r.w1 for r in rows]
            best = np.minimum.accumulate(w) if w else np.array([math.inf])
            ok &= bool(np.all(np.diff(best) <= 0))
            ok &= [r.l for r in rows] == sorted(r.l for r in rows)
            bests.append(best[-1])
            good += best[-1] <= 0.05
        ok &= good >= 9
        parts.append(f"{name} {good}/10 seeds with W1 <= 0.05 (best {min(bests):.4f}, worst {max(bests):.4f})")
    acceptance(3, ok, "; ".join(parts) + f"; {elapsed:.0f}s (<= 300s)")
    assert ok


@pytest.fixture(scope="module")
def covering_orbits():
    """Every covering time l <= 30 from 100 random base points per zoo map."""
    out = {}
    for name in sorted(ZOO):
        T = zoo_map(name)
        rng = make_rng(4)
        found = []
        for _ in range(100):
            scan = covering_times(T, draw_point(T, rng), 30)
            for hit in scan:
                found.append((hit, find_periodic_point(T, hit.cylinder, image=hit.D)))
        out[name] = (T, found)
    return out


def test_criterion_4_covering_mechanism(acceptance, covering_orbits):
    ok = True
    parts = []
    for name, (T, found) in covering_orbits.items():
        worst = max(float(o.residual) for _, o in found)
        words = all(o.word == h.word for h, o in found)
        # independent recheck of the itinerary and return by plain iteration
        for h, o in found:
            pts, word = orbit_of(T, o.p, h.l)
            words &= word == h.word
            if T.exact:
                ok &= pts[h.l] == o.p and o.residual == 0
            else:
                ok &= abs(pts[h.l] - pts[0]) <= 1e-9
        ok = bool(ok and words and worst <= 1e-9 and len(found) > 0)
        parts.append(f"{name}[{T.backend}] {len(found)} orbits, max residual {worst:.2g}")
    # bisection itself, without the exact fallback, on golden at l <= 30
    T, found = covering_orbits["golden"]
    bis = [find_periodic_point(T, h.cylinder, method="bisect", image=h.D) for h, _ in found]
    bis_worst = max(float(o.residual) for o in bis)
    ok &= bis_worst <= 1e-9 and all(o.word == h.word for o, (h, _) in zip(bis, found))
    parts.append(f"golden bisection-only max residual {bis_worst:.2g}")
    acceptance(4, ok, "; ".join(parts) + " (<= 1e-9, rational == 0)")
    assert ok


def test_criterion_5_entropy(acceptance):
    ok = True
    parts = []
    for name, h in (("tent", math.log(2)), ("golden", math.log(GOLDEN))):
        T = zoo_map(name)
        trace = seeded_orbit(T, 5, 10**6)
        rate = block_entropy(trace.word, 12, T.n_branches).rate
        lyap = lyapunov_entropy(T, trace)
        ok &= abs(rate - h) <= 0.05 and abs(lyap - h) <= 1e-3
        parts.append(f"{name} rate {rate:.4f} vs {h:.4f} (|d| <= 0.05), lyapunov {lyap:.6f} (|d| <= 1e-3)")
    acceptance(5, ok, "; ".join(parts))
    assert ok


def test_criterion_6_periodic_invariance(acceptance, covering_orbits, approximation_runs):
    worst_w1 = 0.0
    rate_ok = True
    count = 0
    n = 8
    for name, (T, found) in covering_orbits.items():
        for _, o in found:
            mu = periodic_measure(T, o)
            worst_w1 = max(worst_w1, w1_distance(mu.push_forward(T), mu))
            stream = np.tile(np.array(o.word), max(1, 4000 // o.period))
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", ShortStreamWarning)
                rate = block_entropy(stream, n, T.n_branches).rate
            rate_ok &= rate <= math.log(o.period) / n + 1e-12
            count += 1
    # orbits behind the approximation rows
    runs, _ = approximation_runs
    for (name, seed), rows in list(runs.items())[::5]:
        T = zoo_map(name)
        for r in rows:
            pts, _ = orbit_of(T, r.p, r.l)
            mu = DiscreteMeasure.from_points(pts[: r.l])
            worst_w1 = max(worst_w1, w1_distance(mu.push_forward(T), mu))
            count += 1
    ok = worst_w1 <= 1e-9 and rate_ok
    acceptance(6, ok, f"{count} orbits, max W1(T*mu, mu) {worst_w1:.2g} (<= 1e-9); rate <= log(l)/{n}: {rate_ok}")
    assert ok


def _random_measure(rng):
    k = int(rng.integers(1, 30))
    return DiscreteMeasure.from_points(rng.random(k), rng.random(k) + 0.01)


def test_criterion_7_metric_axioms(acceptance):
    rng = make_rng(7)
    sym = ident = tri = 0.0
    for _ in range(1000):
        a, b, c = (_random_measure(rng) for _ in range(3))
        ab, ba = w1_distance(a, b), w1_distance(b, a)
        sym = max(sym, abs(ab - ba))
        ident = max(ident, w1_distance(a, a))
        tri = max(tri, ab - (w1_distance(a, c) + w1_distance(c, b)))
    dirac_exact = True
    for _ in range(100):
        x, y = rng.random(2)
        dirac_exact &= w1_distance(DiscreteMeasure.dirac(x), DiscreteMeasure.dirac(y)) == abs(x - y)
    ok = sym == 0 and ident <= 1e-12 and tri <= 1e-12 and dirac_exact
    acceptance(
        7, ok, f"symmetry gap {sym:.2g}, W1(mu,mu) max {ident:.2g}, triangle excess {tri:.2g}, dirac exact: {dirac_exact}"
    )
    assert ok


def test_criterion_8_determinism(acceptance, tmp_path):
    base = [sys.executable, "-m", "pmaps", "approximate", "--map", "zoo:golden", "--seed", "12345",
            "--length", "300000", "--l-max", "64", "--depth-m", "6"]
    outs = []
    for tag, workers in (("a", 1), ("b", 1), ("c", 4)):
        path = tmp_path / f"{tag}.csv"
        subprocess.run(base + ["--workers", str(workers), "--out", str(path)], check=True)
        outs.append(path.read_bytes())
    n_rows = len(outs[0].splitlines()) - 1
    ok = outs[0] == outs[1] == outs[2] and n_rows > 1
    acceptance(8, ok, f"two runs and 1 vs 4 workers byte-identical ({n_rows} rows)")
    assert ok
