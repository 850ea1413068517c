"""Command-line entry point.  Players are 1-based on the command line and in
instance files; they are translated to 0-based indices internally."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from fractions import Fraction

from . import bench
from .core import (
    EntropyOracle,
    ModelError,
    dump_instance,
    format_coalition,
    load_instance,
    members,
    parse_rates,
    verify_polymatroid,
)
from .decomposition import finest_decomposer, shapley_decomposed
from .generate import GenSpec, generate_decomposable, generate_indecomposable
from .polyhedron import CHECKS, check_core, enumerate_extreme_points
from .shapley import shapley_by_permutations, shapley_direct, shapley_sampled


def _vec(r) -> list[str]:
    return [str(x) for x in r]


def _perm(text: str | None, n: int):
    if not text:
        return None
    try:
        return [int(t) - 1 for t in text.split(",")]
    except ValueError:
        raise ModelError(f"bad permutation {text!r}") from None


def _sizes(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(t) for t in text.split(",")]


def cmd_check(args) -> int:
    model = load_instance(args.instance)
    oracle = EntropyOracle(model)
    rates = parse_rates(args.rates)
    kwargs = {"relaxed": True} if args.relaxed else {}
    if args.relaxed and args.form == "core":
        raise ModelError("--relaxed applies to the sw and dual forms only")
    report = CHECKS[args.form](oracle, rates, **kwargs)
    out = {
        "form": args.form,
        "member": report.is_member,
        "tightSets": [format_coalition(m) for m in report.tight_sets],
    }
    if report.violated:
        v = report.violated
        out["violated"] = {
            "coalition": format_coalition(v.coalition),
            "bound": str(v.bound),
            "actual": str(v.actual),
        }
    print(json.dumps(out, indent=2))
    return 0 if report.is_member else 1


def cmd_extreme_points(args) -> int:
    oracle = EntropyOracle(load_instance(args.instance))
    ex = enumerate_extreme_points(oracle, force=args.force)
    if args.csv:
        writer = csv.writer(sys.stdout)
        writer.writerow([f"r{i + 1}" for i in range(oracle.n)])
        for p in ex.points:
            writer.writerow(_vec(p))
    else:
        print(json.dumps({"points": [_vec(p) for p in ex.points], "oracleCalls": oracle.calls}, indent=2))
    return 0


def cmd_shapley(args) -> int:
    oracle = EntropyOracle(load_instance(args.instance))
    out = {}
    if args.method == "direct":
        res = shapley_direct(oracle, force=args.force)
    elif args.method == "perms":
        res = shapley_by_permutations(oracle, force=args.force)
        out["extremePointMean"] = _vec(res.extreme_point_mean)
        out["meanDiffers"] = res.mean_differs
    elif args.method == "sampled":
        res = shapley_sampled(oracle, args.samples, args.seed)
        out.update(samples=res.sample_count, seed=res.seed, rng=res.rng)
    else:
        res, dec = shapley_decomposed(oracle, parallel=args.parallel)
        out["finest"] = dec.finest.as_lists()
    out = {"method": res.method, "value": _vec(res.value), "oracleCalls": res.oracle_calls, **out}
    if args.json:
        print(json.dumps(out, indent=2))
    else:
        print(" ".join(_vec(res.value)))
        print(f"# method={res.method} oracle_calls={res.oracle_calls}", file=sys.stderr)
    return 0


def cmd_decompose(args) -> int:
    oracle = EntropyOracle(load_instance(args.instance))
    dec = finest_decomposer(oracle, _perm(args.perm, oracle.n))
    print(
        json.dumps(
            {
                "finest": dec.finest.as_lists(),
                "decomposable": dec.decomposable,
                "extremePoint": _vec(dec.witness),
                "tightSets": {str(i + 1): [j + 1 for j in members(x)] for i, x in dec.trace.items()},
                "oracleCalls": dec.oracle_calls,
                "coreDimension": oracle.n - len(dec.finest),
            },
            indent=2,
        )
    )
    return 0


def cmd_verify(args) -> int:
    report = verify_polymatroid(load_instance(args.instance), force=args.force)
    if report.ok:
        print("polymatroid: ok")
        return 0
    a, b = report.witness
    print(f"polymatroid: {report.failure} fails at {format_coalition(a)}, {format_coalition(b)}")
    return 1


def cmd_gen(args) -> int:
    blocks = args.blocks if args.blocks == "random" else int(args.blocks)
    spec = GenSpec(
        players=args.players,
        target_total_entropy=Fraction(args.total),
        block_count=blocks,
        seed=args.seed,
    )
    inst = generate_indecomposable(spec) if args.indecomposable else generate_decomposable(spec)
    dump_instance(inst.model, args.output, inst.planted)
    return 0


def cmd_bench(args) -> int:
    config = bench.BenchConfig(
        sizes=_sizes(args.sizes),
        clusters=args.clusters,
        total=Fraction(args.total),
        seed=args.seed,
        blocks=args.blocks if args.blocks == "random" else int(args.blocks),
        workers=args.workers,
        repeats=args.repeats,
    )
    if args.kind == "calls":
        rows = bench.run_oracle_count_experiment(config)
    else:
        rows = bench.run_parallel_timing_experiment(config)
    written = bench.emit_report(rows, args.output, args.kind, config, figure=not args.no_figure)
    for a in bench.aggregate(rows):
        print(
            f"|V|={a['players']:2d}  direct={a['meanDirectCalls']:.1f}  "
            f"decomposed={a['meanDecomposedCalls']:.1f}  "
            f"t_direct={a['medianDirectTimeSec']:.2e}s  t_decomposed={a['medianDecomposedTimeSec']:.2e}s"
        )
    for k, p in written.items():
        print(f"wrote {k}: {p}", file=sys.stderr)
    regressions = sum(r.regression for r in rows)
    if regressions:
        print(f"{regressions} Shapley regressions (decomposed != direct)", file=sys.stderr)
        return 2
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="swshapley", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check", help="rate-vector membership in the achievable region")
    s.add_argument("--instance", required=True)
    s.add_argument("--rates", required=True, help='e.g. "1,9/5,2"')
    s.add_argument("--form", choices=sorted(CHECKS), default="sw")
    s.add_argument("--relaxed", action="store_true", help="accept r(V) >= H(V)")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("extreme-points", help="greedy vertices for every order")
    s.add_argument("--instance", required=True)
    fmt = s.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--csv", action="store_true")
    s.add_argument("--force", action="store_true", help="ignore the |V| cap")
    s.set_defaults(func=cmd_extreme_points)

    s = sub.add_parser("shapley", help="Shapley rate allocation")
    s.add_argument("--instance", required=True)
    s.add_argument("--method", choices=["direct", "perms", "sampled", "decomposed"], default="direct")
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--parallel", action="store_true")
    s.add_argument("--json", action="store_true")
    s.add_argument("--force", action="store_true", help="ignore the |V| cap")
    s.set_defaults(func=cmd_shapley)

    s = sub.add_parser("decompose", help="finest decomposer and one extreme point")
    s.add_argument("--instance", required=True)
    s.add_argument("--perm", help='1-based order, e.g. "3,2,1"')
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("verify", help="exhaustive polymatroid check")
    s.add_argument("--instance", required=True)
    s.add_argument("--force", action="store_true")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("gen", help="generate a random instance file")
    s.add_argument("--players", type=int, required=True)
    s.add_argument("--blocks", default="random")
    s.add_argument("--total", default="50")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--indecomposable", action="store_true")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("bench", help="oracle-call and timing experiments")
    s.add_argument("kind", choices=["calls", "timing"])
    s.add_argument("--sizes", default="5..15")
    s.add_argument("--clusters", type=int, default=20)
    s.add_argument("--total", default="50")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--blocks", default="random")
    s.add_argument("--workers", type=int, default=None)
    s.add_argument("--repeats", type=int, default=5)
    s.add_argument("--no-figure", action="store_true")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (ModelError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
