"""Command-line harness: ``lmphnn {bench,sensitivity,inspect}``.

Exit codes: 0 success, 1 usage or configuration error, 2 data error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from . import bench
from .bench import ConfigError, ExperimentConfig
from .dataset import DatasetError, load_csv

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_experiment_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="INI file with an [experiment] section; flags override it")
    p.add_argument("--data", nargs="+", metavar="PATH", help="dataset CSV file(s)")
    p.add_argument("--label-col", help="label column: index, name or 'last' (default)")
    p.add_argument("--encode", choices=["ordinal", "onehot"], help="categorical encoding")
    p.add_argument("--normalize", choices=["none", "zscore", "minmax"], help="feature scaling")
    p.add_argument("--ratio", type=float, help="training fraction per class (default 0.5)")
    p.add_argument("--seeds", help="seed count (from the seed base) or comma list (default 9)")
    p.add_argument(
        "--seed-base",
        type=int,
        help=f"first seed when --seeds is a count (env {bench.SEED_BASE_ENV}, default 0)",
    )
    p.add_argument("--k", help="neighborhood range a..b (default 2..10)")
    p.add_argument("--kinds", help="comma-separated classifier kinds or 'all'")
    p.add_argument("--out", help="output directory (default ./results)")
    p.add_argument("--format", help="comma list of csv, md, jsonl (default csv,md)")
    header = p.add_mutually_exclusive_group()
    header.add_argument("--header", dest="header", action="store_true", default=None)
    header.add_argument("--no-header", dest="header", action="store_false")
    p.add_argument("--timing", action="store_true", default=None,
                   help="record runtime_ms (makes runs.csv non-reproducible)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lmphnn", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bench", help="metric tables, raw runs and k curves")
    _add_experiment_flags(p)
    p = sub.add_parser("sensitivity", help="standard deviation of each metric over k")
    _add_experiment_flags(p)
    p = sub.add_parser("inspect", help="summarize a dataset file")
    p.add_argument("paths", nargs="+", metavar="PATH")
    p.add_argument("--label-col", default="last")
    p.add_argument("--encode", choices=["ordinal", "onehot"], default="ordinal")
    return parser


def config_from_args(args) -> ExperimentConfig:
    values = bench.load_config_file(args.config) if args.config else {}
    file_seeds = values.pop("seeds", None)
    file_base = values.pop("seed_base", None)
    config = ExperimentConfig(**values)

    if args.seed_base is not None:
        base = args.seed_base
    elif os.environ.get(bench.SEED_BASE_ENV):
        base = bench.seed_base_from_env()
    else:
        base = file_base or 0
    seed_spec = args.seeds if args.seeds is not None else file_seeds
    seeds = bench.parse_seeds(seed_spec if seed_spec is not None else "9", base)

    config = bench.with_overrides(
        config,
        data=tuple(args.data) if args.data else None,
        label_col=args.label_col,
        encode=args.encode,
        normalize=args.normalize,
        header=args.header,
        ratio=args.ratio,
        seeds=seeds,
        k_range=bench.parse_k_range(args.k) if args.k else None,
        kinds=bench.parse_kinds(args.kinds) if args.kinds else None,
        out=args.out,
        formats=bench.parse_formats(args.format) if args.format else None,
        timing=args.timing,
    )
    return config.validate()


def cmd_bench(config: ExperimentConfig) -> list[str]:
    rows = bench.run_experiment(config)
    return bench.write_artifacts(config.out, bench.bench_artifacts(rows, config.formats))


def cmd_sensitivity(config: ExperimentConfig) -> list[str]:
    if len(config.k_range) < 2:
        raise ConfigError("sensitivity needs a k range of at least 2 values")
    rows = bench.run_experiment(config)
    return bench.write_artifacts(config.out, bench.sensitivity_artifacts(rows, config.formats))


def cmd_inspect(path, label_col="last", encode="ordinal", stream=None) -> None:
    stream = stream or sys.stdout
    ds = load_csv(path, label_column=label_col, encode=encode)
    print(f"{ds.name}: N={ds.n_samples} d={ds.dim} classes={len(ds.classes)}", file=stream)
    for c, n in ds.class_counts().items():
        print(f"  class {c}: {n}", file=stream)
    print(f"  dropped rows: {ds.n_dropped}", file=stream)
    cats = ", ".join(ds.categorical_columns) if ds.categorical_columns else "none"
    print(f"  categorical columns: {cats}", file=stream)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "inspect":
            for path in args.paths:
                cmd_inspect(path, args.label_col, args.encode)
            return EXIT_OK
        config = config_from_args(args)
        run = cmd_bench if args.command == "bench" else cmd_sensitivity
        for path in run(config):
            print(path)
    except ConfigError as exc:
        print(f"lmphnn: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DatasetError, OSError) as exc:
        print(f"lmphnn: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
