"""Repeated random-split benchmarking.

For each dataset and repeat ``r`` the split seed is
``derive_seed(master_seed, name_key(dataset), SPLIT, r)`` and every method
and every ``k`` is evaluated on that same split.  Work is farmed out per
(dataset, repeat) to a process pool; records are sorted before they are
returned, so output does not depend on the worker count.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .. import __version__
from ..data import Dataset, add_contrived_features, derive_seed, load_csv, name_key, split
from ..ensemble import EnsembleConfig, aggregate_votes, fit
from ..metrics import METRICS, evaluate
from ..neighbors import knn_predict_batch, wknn_predict_batch

__all__ = [
    "METHODS",
    "DatasetSpec",
    "ExperimentConfig",
    "ExperimentReport",
    "run_experiment",
    "default_workers",
    "prepare_dataset",
]

METHODS = ("oexnrule", "knn", "wknn")
METHOD_LABELS = {"oexnrule": "OExNRule", "knn": "kNN", "wknn": "WkNN"}
WORKERS_ENV = "OEXNRULE_WORKERS"

# seed counters
SPLIT, ENSEMBLE, CONTRIVED = 1, 2, 3


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class DatasetSpec:
    path: str
    label_column: str | int = -1
    positive_label: str | None = None
    name: str | None = None

    @property
    def key(self) -> str:
        return self.name or Path(self.path).stem

    def load(self) -> Dataset:
        return load_csv(self.path, self.label_column, self.positive_label, id=self.key)

    def to_dict(self) -> dict:
        return {"path": str(self.path), "label_column": self.label_column,
                "positive_label": self.positive_label, "name": self.key}


@dataclass(frozen=True)
class ExperimentConfig:
    """One benchmark run.  ``ensemble.k`` and ``ensemble.seed`` are overridden per k and per repeat."""

    datasets: tuple[DatasetSpec, ...]
    methods: tuple[str, ...] = METHODS
    repeats: int = 500
    train_fraction: float = 0.7
    k_values: tuple[int, ...] = (3,)
    ensemble: EnsembleConfig = field(default_factory=EnsembleConfig)
    contrived: bool = False
    standardize: bool = False
    master_seed: int = 0
    workers: int = field(default_factory=default_workers)

    def __post_init__(self):
        object.__setattr__(self, "datasets", tuple(
            d if isinstance(d, DatasetSpec) else DatasetSpec(**d) for d in self.datasets))
        object.__setattr__(self, "methods", tuple(m.lower() for m in self.methods))
        object.__setattr__(self, "k_values", tuple(int(k) for k in self.k_values))
        if not self.datasets:
            raise ValueError("no datasets configured")
        keys = [d.key for d in self.datasets]
        if len(set(keys)) != len(keys):
            raise ValueError(f"dataset names must be unique, got {keys}")
        if not self.methods:
            raise ValueError("no methods configured")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ValueError(f"unknown methods {sorted(unknown)}; choose from {METHODS}")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if not self.k_values or min(self.k_values) < 1:
            raise ValueError("every k must be >= 1")
        if not 0 < self.train_fraction < 1:
            raise ValueError("train_fraction must be in (0, 1)")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def to_dict(self) -> dict:
        """Config echo for provenance.  ``workers`` is left out: it never changes results."""
        ens = self.ensemble.to_dict()
        for key in ("k", "seed"):
            ens.pop(key)
        return {
            "datasets": [d.to_dict() for d in self.datasets],
            "methods": list(self.methods),
            "repeats": self.repeats,
            "train_fraction": self.train_fraction,
            "k_values": list(self.k_values),
            "ensemble": ens,
            "contrived": self.contrived,
            "standardize": self.standardize,
            "master_seed": self.master_seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        ens = dict(d.pop("ensemble", {}) or {})
        if isinstance(ens.get("p_prime"), str) and ens["p_prime"] != "auto":
            ens["p_prime"] = int(ens["p_prime"])
        d["ensemble"] = EnsembleConfig.from_dict(ens)
        d["datasets"] = tuple(DatasetSpec(**s) for s in d.get("datasets", ()))
        for key in ("methods", "k_values"):
            if key in d:
                d[key] = tuple(d[key])
        return cls(**d)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def prepare_dataset(ds: Dataset, cfg: ExperimentConfig) -> Dataset:
    """Apply the run-wide transformation (contrived noise columns, one draw per dataset)."""
    if cfg.contrived:
        ds = add_contrived_features(ds, ds.p, derive_seed(cfg.master_seed, name_key(ds.id), CONTRIVED))
    return ds


def _standardize(train: np.ndarray, test: np.ndarray):
    mu = train.mean(axis=0)
    sd = train.std(axis=0)
    sd[sd == 0] = 1.0
    return (train - mu) / sd, (test - mu) / sd


def _run_repeat(ds: Dataset, cfg: ExperimentConfig, r: int) -> list[dict]:
    key = name_key(ds.id)
    sp = split(ds, cfg.train_fraction, derive_seed(cfg.master_seed, key, SPLIT, r))
    Xtr, Xte = sp.train.features, sp.test.features
    train = sp.train
    if cfg.standardize:
        Xtr, Xte = _standardize(Xtr, Xte)
        train = Dataset(Xtr, sp.train.labels, sp.train.feature_names, sp.train.id)
    ytr, yte = sp.train.labels, sp.test.labels
    digest = sp.digest()
    out = []
    for k in cfg.k_values:
        for method in cfg.methods:
            if method == "oexnrule":
                ens = replace(cfg.ensemble, k=k, seed=derive_seed(cfg.master_seed, key, ENSEMBLE, r))
                pred, prob = aggregate_votes(fit(train, ens).base_votes(Xte))
            elif method == "knn":
                pred, prob = knn_predict_batch(Xtr, ytr, Xte, k, cfg.ensemble.distance)
            else:
                pred, prob = wknn_predict_batch(Xtr, ytr, Xte, k, cfg.ensemble.distance)
            rec = evaluate(yte, pred, prob)
            out.append({"dataset": ds.id, "method": method, "k": k, "repeat": r, **rec.as_dict(),
                        "split": digest})
    return out


def _run_repeat_star(args):
    return _run_repeat(*args)


@dataclass
class ExperimentReport:
    """Per-repeat metric records plus provenance; aggregates are derived on demand."""

    records: list[dict]
    provenance: dict
    failures: dict[str, str] = field(default_factory=dict)

    def datasets(self) -> list[str]:
        order = [d["name"] for d in self.provenance["config"]["datasets"]]
        present = {r["dataset"] for r in self.records}
        return [d for d in order if d in present]

    def methods(self) -> list[tuple[str, int]]:
        cfg = self.provenance["config"]
        present = {(r["method"], r["k"]) for r in self.records}
        return [(m, k) for k in cfg["k_values"] for m in cfg["methods"] if (m, k) in present]

    def method_label(self, method: str, k: int) -> str:
        label = METHOD_LABELS.get(method, method)
        return f"{label} (k={k})" if len(self.provenance["config"]["k_values"]) > 1 else label

    def values(self, dataset: str, method: str, k: int, metric: str) -> np.ndarray:
        recs = sorted((r for r in self.records
                       if r["dataset"] == dataset and r["method"] == method and r["k"] == k),
                      key=lambda r: r["repeat"])
        return np.array([r[metric] for r in recs], dtype=float)

    def aggregates(self) -> list[dict]:
        out = []
        for ds in self.datasets():
            for method, k in self.methods():
                row = {"dataset": ds, "method": method, "k": k}
                for metric in METRICS:
                    v = self.values(ds, method, k, metric)
                    row[metric] = math.fsum(v) / len(v)
                row["repeats"] = len(v)
                out.append(row)
        return out

    def mean(self, dataset: str, method: str, metric: str, k: int = 3) -> float:
        v = self.values(dataset, method, k, metric)
        if len(v) == 0:
            raise KeyError(f"no records for {dataset}/{method}/k={k}")
        return math.fsum(v) / len(v)

    def to_dict(self) -> dict:
        return {"provenance": self.provenance, "failures": dict(sorted(self.failures.items())),
                "aggregates": self.aggregates(), "records": self.records}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentReport":
        return cls(list(d["records"]), dict(d["provenance"]), dict(d.get("failures", {})))

    @classmethod
    def load(cls, path) -> "ExperimentReport":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def save(self, path) -> Path:
        path = Path(path)
        path.write_text(self.to_json(), encoding="utf-8")
        return path


def _sort_key(rec):
    return (rec["dataset"], rec["k"], METHODS.index(rec["method"]), rec["repeat"])


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Evaluate every configured method on every dataset over ``cfg.repeats`` splits.

    A dataset that fails to load, or whose splits fail, is reported under
    ``failures`` and skipped; the other datasets still run.
    """
    loaded, failures = [], {}
    for spec in cfg.datasets:
        try:
            loaded.append(prepare_dataset(spec.load(), cfg))
        except (OSError, ValueError) as exc:
            failures[spec.key] = f"{type(exc).__name__}: {exc}"

    tasks = [(ds, cfg, r) for ds in loaded for r in range(cfg.repeats)]
    records, bad = [], set()
    if cfg.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            futures = [(t[0].id, pool.submit(_run_repeat_star, t)) for t in tasks]
            for name, fut in futures:
                try:
                    records.extend(fut.result())
                except ValueError as exc:
                    failures.setdefault(name, f"{type(exc).__name__}: {exc}")
                    bad.add(name)
    else:
        for t in tasks:
            if t[0].id in bad:
                continue
            try:
                records.extend(_run_repeat(*t))
            except ValueError as exc:
                failures.setdefault(t[0].id, f"{type(exc).__name__}: {exc}")
                bad.add(t[0].id)
    records = sorted((r for r in records if r["dataset"] not in bad), key=_sort_key)

    digests: dict[str, list[str]] = {}
    for rec in records:
        if rec["method"] == cfg.methods[0] and rec["k"] == cfg.k_values[0]:
            digests.setdefault(rec["dataset"], []).append(rec["split"])
    provenance = {
        "config": cfg.to_dict(),
        "master_seed": cfg.master_seed,
        "version": __version__,
        "dataset_shapes": {ds.id: [ds.n, ds.p] for ds in loaded},
        "split_digests": digests,
    }
    return ExperimentReport(records, provenance, failures)
