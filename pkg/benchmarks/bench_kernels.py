"""Time the compiled kernels against the numpy/pure-Python fallback.

    python3 benchmarks/bench_kernels.py --steps 1000000 --repeat 3
"""

import argparse
import timeit

import numpy as np

from pmaps import _kernels_py
from pmaps.experiment import SEED_DENOMINATOR
from pmaps.zoo import GOLDEN, beta, tent

try:
    from pmaps import _kernels as _compiled
except ImportError:
    _compiled = None


def cases(steps):
    g = beta(GOLDEN)
    t = tent(2, backend="rational")
    q = SEED_DENOMINATOR
    slopes, inters, _ = t._int_kernel
    int_args = (
        123456789012345,
        q,
        steps,
        np.array([q // 2], dtype=np.int64),
        np.array([0], dtype=np.uint8),
        np.array(slopes, dtype=np.int64),
        np.array([b * q for b in inters], dtype=np.int64),
    )
    word = np.asarray(g.iterate(0.1234, steps).word, dtype=np.int64)
    rng = np.random.default_rng(0)
    xa = np.sort(rng.random(steps))
    xb = np.sort(rng.random(steps // 10))
    wa = np.full(xa.size, 1 / xa.size)
    wb = np.full(xb.size, 1 / xb.size)
    return {
        "affine_orbit_float": (0.1234, steps, g._crit_float, g._slopes, g._intercepts, g.eps_crit),
        "affine_orbit_int": int_args,
        "block_codes": (word, 12, 2),
        "w1_sorted": (xa, wa, xb, wb),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    impls = [("python", _kernels_py)]
    if _compiled is not None:
        impls.insert(0, ("compiled", _compiled))
    else:
        print("compiled kernels not built; timing the fallback only")

    print(f"{'kernel':<20}" + "".join(f"{name:>12}" for name, _ in impls) + f"{'speedup':>10}")
    for kernel, kargs in cases(args.steps).items():
        times = []
        for _, mod in impls:
            fn = getattr(mod, kernel)
            times.append(min(timeit.repeat(lambda: fn(*kargs), number=1, repeat=args.repeat)))
        speed = f"{times[-1] / times[0]:>9.1f}x" if len(times) == 2 else ""
        print(f"{kernel:<20}" + "".join(f"{t * 1e3:>10.1f}ms" for t in times) + speed)


if __name__ == "__main__":
    main()
