"""Command-line interface: ``pmaps <subcommand> --map SPEC [options]``.

``--map`` takes a map-spec file path or ``zoo:<name>``. All output is CSV,
written to ``--out`` or stdout.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import logging
import os
import sys
from pathlib import Path

from pmaps import kernels
from pmaps.errors import CriticalPoint, PMapsError
from pmaps.experiment import (
    ExperimentConfig,
    emit_report,
    format_report,
    run_approximation_experiment,
    run_experiments,
    seeded_orbit,
)
from pmaps.mapspec import load_map_spec, parse_number
from pmaps.measure import block_entropy, conditional_information, lyapunov_entropy
from pmaps.periodic import find_periodic_point
from pmaps.symbolic import cylinder_of_point, enumerate_cylinders
from pmaps.tower import advance, covering_times, track
from pmaps.zoo import ZOO


def _u64(s):
    v = int(s, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def _read_spec(arg: str) -> str:
    if arg.startswith("zoo:"):
        name = arg[4:]
        if name not in ZOO:
            raise SystemExit(f"unknown zoo map {name!r}; known: {', '.join(sorted(ZOO))}")
        return ZOO[name]
    try:
        return Path(arg).read_text()
    except OSError as exc:
        raise SystemExit(f"cannot read map spec {arg}: {exc.strerror}") from None


@contextlib.contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
        return
    try:
        fh = open(path, "w", newline="")
    except OSError as exc:
        raise SystemExit(f"cannot write {path}: {exc.strerror}") from None
    with fh:
        yield fh


def _fmt(v):
    return format(float(v), ".17g")


def _word(w):
    return "-".join(str(int(i)) for i in w)


def _start(args, T):
    """Base point: --point if given, else the post-burn-in point of the seeded orbit."""
    if args.point is not None:
        return parse_number(args.point)
    trace = seeded_orbit(T, args.seed[0], args.burn_in)
    return trace.points[args.burn_in]


def cmd_orbit(args, T):
    start = parse_number(args.point) if args.point is not None else None
    trace = seeded_orbit(T, args.seed[0], args.length, start)
    with _output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["s", "x", "symbol"])
        xs = trace.as_floats()
        for s, x in enumerate(xs):
            w.writerow([s, _fmt(x), int(trace.word[s]) if s < trace.n else ""])


def cmd_cylinders(args, T):
    if args.point is not None:
        cyls = [cylinder_of_point(T, parse_number(args.point), args.depth)]
    else:
        cyls = enumerate_cylinders(T, args.depth)
    with _output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["word", "lo", "hi", "diameter"])
        for c in cyls:
            if c.empty:
                w.writerow([_word(c.word), "", "", 0])
            else:
                w.writerow([_word(c.word), _fmt(c.lo), _fmt(c.hi), _fmt(c.diameter)])


def cmd_tower(args, T):
    y = _start(args, T)
    states = []
    try:
        for st in track(T, y, args.l_max):
            states.append(st)
        final = advance(states[-1]) if states else None
    except CriticalPoint:
        final = None
    flags = final.cut_flags if final is not None else (states[-1].cut_flags if states else ())
    with _output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["l", "word", "C_lo", "C_hi", "D_lo", "D_hi", "cut", "covering", "boundary_critical"])
        for st in states:
            cut = int(flags[st.l - 1]) if st.l - 1 < len(flags) else ""
            w.writerow(
                [
                    st.l,
                    _word(st.word),
                    _fmt(st.C.lo),
                    _fmt(st.C.hi),
                    _fmt(st.D.lo),
                    _fmt(st.D.hi),
                    cut,
                    int(st.is_covering(args.margin)),
                    int(st.boundary_hits_critical()),
                ]
            )


def cmd_periodic(args, T):
    y = _start(args, T)
    scan = covering_times(T, y, args.l_max, args.margin)
    with _output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["l", "p", "minimal_period", "residual"])
        for hit in scan:
            try:
                orb = find_periodic_point(T, hit.cylinder, tol=args.tol, margin=args.margin, image=hit.D)
            except PMapsError as exc:
                logging.warning("l=%d skipped: %s", hit.l, exc)
                continue
            w.writerow([hit.l, _fmt(orb.p), orb.minimal_period, _fmt(orb.residual)])


def _config(args, spec, seed):
    return ExperimentConfig(
        map_spec=spec,
        seed=seed,
        length=args.length,
        burn_in=args.burn_in,
        l_max=args.l_max,
        margin=args.margin,
        depth_m=args.depth_m,
        out=args.out,
        backend=args.backend,
        start=args.point,
        base=args.base,
        tol=args.tol,
        recurrence_bases=args.recurrence_bases,
    )


def _seed_path(out, seed):
    if "{seed}" in out:
        return out.format(seed=seed)
    root, ext = os.path.splitext(out)
    return f"{root}-seed{seed}{ext or '.csv'}"


def cmd_approximate(args, spec):
    seeds = args.seed
    if len(seeds) == 1:
        rows = run_approximation_experiment(_config(args, spec, seeds[0]), workers=args.workers)
        if args.out in (None, "-"):
            sys.stdout.write(format_report(rows))
        else:
            emit_report(rows, args.out)
        return
    if args.out in (None, "-"):
        raise SystemExit("several seeds need --out (a path, optionally containing {seed})")
    results = run_experiments([_config(args, spec, s) for s in seeds], workers=args.workers)
    for seed, rows in zip(seeds, results):
        emit_report(rows, _seed_path(args.out, seed))


def cmd_entropy(args, T):
    start = parse_number(args.point) if args.point is not None else None
    trace = seeded_orbit(T, args.seed[0], args.length, start)
    word = trace.word[args.burn_in :]
    with _output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        if args.kind == "block":
            w.writerow(["n", "H_n", "rate"])
            for n in range(1, args.block + 1):
                est = block_entropy(word, n, T.n_branches)
                w.writerow([n, _fmt(est.H), _fmt(est.rate)])
        elif args.kind == "conditional":
            w.writerow(["n", "conditional_information"])
            for n in range(0, args.block + 1):
                w.writerow([n, _fmt(conditional_information(word, n, T.n_branches))])
        else:
            w.writerow(["lyapunov"])
            w.writerow([_fmt(lyapunov_entropy(T, trace))])


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--map", required=True, help="map-spec file or zoo:<name>")
    common.add_argument("--seed", type=_u64, nargs="+", default=[0], help="PCG64 seed(s)")
    common.add_argument("--length", type=int, default=100_000, help="orbit length in steps")
    common.add_argument("--burn-in", type=int, default=0)
    common.add_argument("--l-max", type=int, default=64)
    common.add_argument("--margin", type=float, default=1e-9)
    common.add_argument("--depth-m", type=int, default=6)
    common.add_argument("--backend", choices=("float", "rational"), default=None)
    common.add_argument("--out", default=None, help="output CSV path (default stdout)")
    common.add_argument("--point", default=None, help="explicit start point, e.g. 3/10")
    common.add_argument("--tol", type=float, default=1e-9, help="periodic residual tolerance")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="pmaps", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s (kernels: {kernels.BACKEND})")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("orbit", parents=[common], help="iterate and dump the itinerary")
    c = sub.add_parser("cylinders", parents=[common], help="enumerate cylinders or the cylinder of --point")
    c.add_argument("--depth", type=int, default=3)
    sub.add_parser("tower", parents=[common], help="tracker trace (C_l, D_l, cut, covering)")
    sub.add_parser("periodic", parents=[common], help="periodic points at covering times")
    a = sub.add_parser("approximate", parents=[common], help="full periodic-approximation experiment")
    a.add_argument("--recurrence-bases", type=int, default=0,
                   help="also scan from this many strongly recurrent orbit points")
    a.add_argument("--base", default=None, help="explicit base point for the covering scan")
    e = sub.add_parser("entropy", parents=[common], help="block, conditional or Lyapunov entropy")
    e.add_argument("--kind", choices=("block", "conditional", "lyapunov"), default="block")
    e.add_argument("--block", type=int, default=10, help="largest block length")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    spec = _read_spec(args.map)
    try:
        if args.command == "approximate":
            cmd_approximate(args, spec)
            return 0
        T = load_map_spec(spec, args.backend)
        {
            "orbit": cmd_orbit,
            "cylinders": cmd_cylinders,
            "tower": cmd_tower,
            "periodic": cmd_periodic,
            "entropy": cmd_entropy,
        }[args.command](args, T)
    except PMapsError as exc:
        print(f"pmaps: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
