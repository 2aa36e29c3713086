"""``oexnrule-bench``: run benchmarks and turn reports into tables and plot data.

    oexnrule-bench run --dataset data/sleep.csv,label=binaryClass,positive=P,name=Sleep \\
        --repeats 100 --out results/
    oexnrule-bench report results/report.json --out results/ --format csv,markdown
    oexnrule-bench boxplot-data results/report.json --out results/

Flags override values from ``--config`` (a JSON file with the same keys as
:class:`ExperimentConfig`).  The default worker count comes from
``OEXNRULE_WORKERS``.  On failure a single JSON line
``{"error": ..., "message": ...}`` goes to stderr and the exit code is 1.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from ..ensemble import EnsembleConfig
from ..neighbors import DistanceSpec
from .experiment import WORKERS_ENV, DatasetSpec, ExperimentConfig, ExperimentReport, default_workers, run_experiment
from .report import FORMATS, emit_boxplot_data, emit_report


def parse_dataset(text: str) -> DatasetSpec:
    """``PATH[,label=COL][,positive=VALUE][,name=NAME]``"""
    path, *opts = text.split(",")
    kw = {}
    keys = {"label": "label_column", "positive": "positive_label", "name": "name"}
    for opt in opts:
        key, sep, val = opt.partition("=")
        if not sep or key not in keys:
            raise argparse.ArgumentTypeError(f"bad dataset option {opt!r}; use label=, positive= or name=")
        kw[keys[key]] = val
    return DatasetSpec(path, **kw)


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in text.split(",") if t)


def _str_list(text: str) -> tuple[str, ...]:
    return tuple(t.strip() for t in text.split(",") if t.strip())


def _p_prime(text: str):
    return text if text == "auto" else int(text)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(json.dumps({"error": "UsageError", "message": message}), file=sys.stderr)
        sys.exit(2)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="oexnrule-bench", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run a benchmark and write report.json")
    run.add_argument("--config", type=Path, help="JSON experiment config")
    run.add_argument("--dataset", action="append", type=parse_dataset, dest="datasets",
                     metavar="PATH[,label=COL][,positive=VAL][,name=NAME]")
    run.add_argument("--methods", type=_str_list, help="comma list of oexnrule,knn,wknn")
    run.add_argument("--repeats", type=int)
    run.add_argument("--train-fraction", type=float)
    run.add_argument("--k", type=_int_list, dest="k_values", help="comma list, e.g. 3,5,7")
    run.add_argument("--n-models", type=int, help="base models built (B)")
    run.add_argument("--select-fraction", type=float, help="share of base models kept")
    run.add_argument("--p-prime", type=_p_prime, help="features per base model, or 'auto'")
    run.add_argument("--q", type=float, help="Minkowski exponent")
    run.add_argument("--contrived", action="store_true", default=None)
    run.add_argument("--standardize", action="store_true", default=None, help="z-score features per split")
    run.add_argument("--seed", type=int, dest="master_seed")
    run.add_argument("--workers", type=int, help=f"default: ${WORKERS_ENV} or 1")
    run.add_argument("--out", type=Path, required=True)
    run.add_argument("--emit", type=_str_list, default=(), help=f"also write tables: {','.join(FORMATS)}")

    rep = sub.add_parser("report", help="write aggregate tables from a report.json")
    rep.add_argument("report", type=Path)
    rep.add_argument("--out", type=Path, required=True)
    rep.add_argument("--format", type=_str_list, default=FORMATS)

    box = sub.add_parser("boxplot-data", help="write per-repeat long-format CSVs")
    box.add_argument("report", type=Path)
    box.add_argument("--out", type=Path, required=True)
    return ap


def config_from_args(args) -> ExperimentConfig:
    base = ExperimentConfig.from_file(args.config).__dict__ if args.config else {}
    cfg = dict(base)
    for key in ("datasets", "methods", "repeats", "train_fraction", "k_values",
                "contrived", "standardize", "master_seed", "workers"):
        val = getattr(args, key)
        if val is not None:
            cfg[key] = val
    ens = cfg.get("ensemble", EnsembleConfig())
    changes = {}
    if args.n_models is not None:
        changes["n_models"] = args.n_models
    if args.select_fraction is not None:
        changes["select_fraction"] = args.select_fraction
    if args.p_prime is not None:
        changes["p_prime"] = args.p_prime
    if args.q is not None:
        changes["distance"] = DistanceSpec(args.q)
    cfg["ensemble"] = replace(ens, **changes)
    cfg.setdefault("workers", default_workers())
    if not cfg.get("datasets"):
        raise ValueError("no datasets given; use --dataset or --config")
    return ExperimentConfig(**cfg)


def _fail(exc: BaseException) -> int:
    print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
    return 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            cfg = config_from_args(args)
            report = run_experiment(cfg)
            args.out.mkdir(parents=True, exist_ok=True)
            report.save(args.out / "report.json")
            if args.emit:
                emit_report(report, args.out, args.emit)
            for name, msg in sorted(report.failures.items()):
                print(json.dumps({"warning": "dataset_failed", "dataset": name, "message": msg}), file=sys.stderr)
            if not report.records:
                raise RuntimeError("every dataset failed")
            print(args.out / "report.json")
        elif args.command == "report":
            for p in emit_report(ExperimentReport.load(args.report), args.out, args.format):
                print(p)
        else:
            for p in emit_boxplot_data(ExperimentReport.load(args.report), args.out):
                print(p)
    except (OSError, ValueError, KeyError, RuntimeError) as exc:
        return _fail(exc)
    return 0


if __name__ == "__main__":
    sys.exit(main())
