"""Write benchmark reports as result tables and long-format boxplot data.

Everything written here is a pure function of the report, so re-emitting
the same report gives identical bytes.  CSV floats use ``repr`` and round
trip exactly; markdown shows three decimals and bolds the best entry in
each dataset column (highest accuracy and kappa, lowest Brier score).
"""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path

from .. import reference
from ..metrics import METRICS
from .experiment import ExperimentReport

__all__ = ["FORMATS", "emit_report", "emit_boxplot_data", "aggregate_table", "markdown_tables"]

FORMATS = ("csv", "json", "markdown")
METRIC_TITLES = {"accuracy": "Accuracy", "kappa": "Cohen's kappa", "brier": "Brier score"}
LOWER_IS_BETTER = {"brier"}


def _write(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def aggregate_table(report: ExperimentReport, metric: str) -> tuple[list[str], list[tuple[str, list[float]]]]:
    """Methods as rows, datasets as columns, last column the row mean."""
    datasets = report.datasets()
    agg = {(a["dataset"], a["method"], a["k"]): a[metric] for a in report.aggregates()}
    rows = []
    for method, k in report.methods():
        vals = [agg[(d, method, k)] for d in datasets]
        rows.append((report.method_label(method, k), vals + [math.fsum(vals) / len(vals)]))
    return datasets + ["Mean"], rows


def _best(values: list[float], metric: str) -> float:
    return min(values) if metric in LOWER_IS_BETTER else max(values)


def markdown_tables(report: ExperimentReport, with_reference: bool = True) -> str:
    contrived = bool(report.provenance["config"].get("contrived"))
    out = []
    for metric in METRICS:
        cols, rows = aggregate_table(report, metric)
        best = [_best([r[1][j] for r in rows], metric) for j in range(len(cols))]
        out.append(f"### {METRIC_TITLES[metric]}\n")
        out.append("| Method | " + " | ".join(cols) + " |")
        out.append("|---|" + "---:|" * len(cols))
        for label, vals in rows:
            cells = [f"**{v:.3f}**" if f"{v:.3f}" == f"{b:.3f}" else f"{v:.3f}" for v, b in zip(vals, best)]
            out.append(f"| {label} | " + " | ".join(cells) + " |")
        if with_reference:
            ref_rows = []
            for method, k in report.methods():
                vals = [reference.lookup(metric, method, d, k, contrived) for d in cols[:-1]]
                if any(v is not None for v in vals):
                    cells = ["" if v is None else f"{v:.3f}" for v in vals]
                    ref_rows.append(f"| {report.method_label(method, k)} (published) | " + " | ".join(cells) + " | |")
            out.extend(ref_rows)
        out.append("")
    if report.failures:
        out.append("### Failed datasets\n")
        for name, msg in sorted(report.failures.items()):
            out.append(f"- {name}: {msg}")
        out.append("")
    return "\n".join(out)


def _per_repeat_csv(report: ExperimentReport) -> str:
    header = ["dataset", "method", "k", "repeat", *METRICS, "n_test", "split"]
    return _csv_text(header, ([r[h] if h not in METRICS else repr(float(r[h])) for h in header]
                              for r in report.records))


def emit_report(report: ExperimentReport, out_dir, formats=FORMATS) -> list[Path]:
    """Write aggregate tables in each requested format plus ``per_repeat.csv``."""
    if not report.records:
        raise ValueError("report has no records")
    formats = tuple(formats)
    bad = set(formats) - set(FORMATS)
    if bad:
        raise ValueError(f"unknown formats {sorted(bad)}; choose from {FORMATS}")
    out = Path(out_dir)
    written = []
    if "csv" in formats:
        for metric in METRICS:
            cols, rows = aggregate_table(report, metric)
            text = _csv_text(["method", *cols], ([label, *(repr(float(v)) for v in vals)] for label, vals in rows))
            written.append(_write(out / f"aggregate_{metric}.csv", text))
    if "json" in formats:
        written.append(_write(out / "report.json", report.to_json()))
    if "markdown" in formats:
        written.append(_write(out / "tables.md", markdown_tables(report)))
    written.append(_write(out / "per_repeat.csv", _per_repeat_csv(report)))
    return written


def emit_boxplot_data(report: ExperimentReport, out_dir) -> list[Path]:
    """One long-format CSV per metric: dataset, method, k, repeat, value."""
    if not report.records:
        raise ValueError("report has no records")
    out = Path(out_dir)
    written = []
    for metric in METRICS:
        rows = ([r["dataset"], r["method"], r["k"], r["repeat"], repr(float(r[metric]))] for r in report.records)
        written.append(_write(out / f"boxplot_{metric}.csv",
                              _csv_text(["dataset", "method", "k", "repeat", "value"], rows)))
    return written
