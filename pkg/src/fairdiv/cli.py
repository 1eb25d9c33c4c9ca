"""Command line entry point: ``fairdiv {gen,bounds,run,oracle,verify}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .core import InfeasibleError, InputError, Metric, extremal_distances
from .harness.allocation import allocate_caps
from .harness.bench import RunConfig, load_config, run_benchmark
from .harness.datasets import generate_blobs, load_csv, write_csv
from .offline import ORACLE_MAX_N, brute_force_opt

log = logging.getLogger("fairdiv")


def _add_data_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--data", required=required, help="CSV file (header row, one group column)")
    p.add_argument("--features", help="comma-separated feature columns (default: all but group)")
    p.add_argument("--group", default="group", help="group column name (default: group)")
    p.add_argument("--normalize", action="store_true", help="z-score every feature column")


def _load(args) -> "GroupedDataset":  # noqa: F821
    feats = args.features.split(",") if args.features else None
    return load_csv(args.data, feats, args.group, args.normalize)


def _parse_alloc(value: str | None):
    if value is None:
        return None
    if value in ("equal", "proportional"):
        return value
    try:
        return [int(v) for v in value.split(",")]
    except ValueError:
        raise InputError(f"bad allocation {value!r}") from None


def cmd_gen(args) -> int:
    ds = generate_blobs(args.n, args.m, args.seed, args.dim)
    write_csv(ds, args.out)
    print(f"wrote {ds.n} rows ({ds.m} groups, seed {args.seed}) to {args.out}")
    return 0


def cmd_bounds(args) -> int:
    ds = _load(args)
    d_min, d_max = extremal_distances(ds, args.metric)
    # duplicates (distance 0) are ignored for d_min
    print(json.dumps({"d_min": d_min, "d_max": d_max, "spread": d_max / d_min, "n": ds.n}))
    return 0


def cmd_run(args) -> int:
    overrides = {
        "algorithm": args.algorithm, "k": args.k, "allocation": _parse_alloc(args.alloc),
        "eps": args.eps, "metric": args.metric, "d_min": args.d_min, "d_max": args.d_max,
        "permutations": args.permutations, "seed": args.seed, "workers": args.workers,
        "dataset": args.name or (Path(args.data).stem if args.data else None),
    }
    if args.config:
        config = load_config(args.config, **overrides)
    else:
        config = RunConfig(**{k: v for k, v in overrides.items() if v is not None})
    if args.data:
        ds = _load(args)
    elif args.blobs:
        n, m = (int(v) for v in args.blobs.split(","))
        ds = generate_blobs(n, m, config.seed)
        config.dataset = f"blobs-{n}-{m}"
    else:
        raise InputError("give --data FILE or --blobs N,M")
    report = run_benchmark(config, ds)
    if args.json:
        Path(args.json).write_text(report.to_json() + "\n", encoding="utf-8")
    if args.csv:
        Path(args.csv).write_text(report.to_csv(), encoding="utf-8")
    print(report.to_json())
    return 0


def cmd_oracle(args) -> int:
    ds = _load(args)
    out = {"n": ds.n, "k": args.k}
    res = brute_force_opt(ds, args.metric, args.k, max_n=args.max_n)
    out["opt"] = res.opt_value
    out["opt_ids"] = res.ids
    if not args.unconstrained:
        caps = allocate_caps(_parse_alloc(args.alloc), args.k, ds.group_counts)
        fair = brute_force_opt(ds, args.metric, args.k, caps, max_n=args.max_n)
        out.update(caps=caps, opt_f=fair.opt_value, opt_f_ids=fair.ids)
    print(json.dumps(out))
    return 0


def cmd_verify(args) -> int:
    from .verify import run_all

    results = run_all(args.instances, args.seed)
    for r in results:
        print(r.line())
        for v in r.violations[:5]:
            print(f"    {v}")
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fairdiv", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    metrics = [m.value for m in Metric]

    p = sub.add_parser("gen", help="write a synthetic Gaussian-blob dataset as CSV")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bounds", help="exact d_min/d_max (zero distances excluded from d_min)")
    _add_data_args(p)
    p.add_argument("--metric", choices=metrics, default="euclidean")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("run", help="benchmark an algorithm over random stream orders")
    _add_data_args(p, required=False)
    p.add_argument("--blobs", help="generate N,M synthetic blobs instead of --data")
    p.add_argument("--config", help="key = value file; flags override its values")
    p.add_argument("--algorithm", choices=["sfdm1", "sfdm2", "gmm", "oracle"])
    p.add_argument("--k", type=int)
    p.add_argument("--alloc", help="equal, proportional or explicit list like 3,2")
    p.add_argument("--eps", type=float)
    p.add_argument("--metric", choices=metrics)
    p.add_argument("--d-min", type=float, dest="d_min")
    p.add_argument("--d-max", type=float, dest="d_max")
    p.add_argument("--permutations", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, help="parallel permutation workers (default 1)")
    p.add_argument("--name", help="dataset name written to the results")
    p.add_argument("--json", help="write the JSON record here")
    p.add_argument("--csv", help="write the CSV summary here")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("oracle", help="exact OPT and OPT_f by enumeration (small inputs)")
    _add_data_args(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--alloc", default="equal")
    p.add_argument("--metric", choices=metrics, default="euclidean")
    p.add_argument("--unconstrained", action="store_true")
    p.add_argument("--max-n", type=int, default=ORACLE_MAX_N, dest="max_n")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("verify", help="randomised invariant and ratio suite")
    p.add_argument("--instances", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (InputError, InfeasibleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
