"""
A small benchmark run
=====================

Repeated random splits, three methods, one table per metric.  The same
thing is available from the shell as ``oexnrule-bench run``.
"""

import tempfile
from pathlib import Path

from oexnrule import EnsembleConfig
from oexnrule.bench import DatasetSpec, ExperimentConfig, emit_report, run_experiment

root = Path(__file__).resolve().parents[1]
sleep = DatasetSpec(str(root / "data" / "sleep.csv"), "binaryClass", "P", "Sleep")

cfg = ExperimentConfig(datasets=(sleep,), repeats=20, k_values=(3, 5),
                       ensemble=EnsembleConfig(n_models=200), master_seed=7, workers=1)
report = run_experiment(cfg)

for k in (3, 5):
    for method in ("oexnrule", "knn", "wknn"):
        print(f"{report.method_label(method, k):15s} accuracy {report.mean('Sleep', method, 'accuracy', k):.3f}")

with tempfile.TemporaryDirectory() as tmp:
    files = emit_report(report, tmp)
    print([f.name for f in files])
    print("\n".join((Path(tmp) / "tables.md").read_text().splitlines()[:12]))
