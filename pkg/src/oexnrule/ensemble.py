"""Optimal extended-neighbourhood-rule ensemble.

``fit`` draws ``n_models`` bootstrap samples, each paired with a random
feature subspace, scores every sample's chain classifier on its out-of-bag
rows and keeps the ``n_selected`` lowest-error ones.  Prediction is a plain
majority vote over the kept learners.

The learners are instance based, so a fitted base model is nothing more
than its :class:`~oexnrule.data.BootstrapSample` and OOB error.  A saved
model stores the sample seeds and re-draws the samples from the training
data on load.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .data import BootstrapSample, Dataset, derive_seed, draw_bootstrap, full_bag, subspace_size
from .neighbors import EUCLIDEAN, DistanceSpec, exnrule_predict_batch

__all__ = [
    "EnsembleConfig",
    "BaseModel",
    "OExNRuleModel",
    "fit",
    "oob_error",
    "predict",
    "predict_proba",
    "aggregate_votes",
    "save_model",
    "load_model",
    "ModelFormatError",
    "FORMAT_NAME",
    "FORMAT_VERSION",
]

FORMAT_NAME = "oexnrule-model"
FORMAT_VERSION = 1


class ModelFormatError(ValueError):
    pass


@dataclass(frozen=True)
class EnsembleConfig:
    """Ensemble hyper-parameters.

    ``bootstrap=False`` gives every learner the full training set once (no
    OOB rows, so every learner is unscored).  It exists for equivalence tests.
    """

    n_models: int = 500
    select_fraction: float = 0.25
    k: int = 3
    p_prime: int | str = "auto"
    distance: DistanceSpec = EUCLIDEAN
    seed: int = 0
    bootstrap: bool = True

    def __post_init__(self):
        if self.n_models < 1:
            raise ValueError(f"n_models must be >= 1, got {self.n_models}")
        if not 0.0 < self.select_fraction <= 1.0:
            raise ValueError(f"select_fraction must be in (0, 1], got {self.select_fraction}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.p_prime != "auto" and (not isinstance(self.p_prime, (int, np.integer)) or self.p_prime < 1):
            raise ValueError(f"p_prime must be 'auto' or a positive integer, got {self.p_prime!r}")

    @property
    def n_selected(self) -> int:
        """round(select_fraction * n_models), halves up, at least 1."""
        return min(self.n_models, max(1, int(math.floor(self.select_fraction * self.n_models + 0.5))))

    def resolve_p_prime(self, p: int) -> int:
        if self.p_prime == "auto":
            return subspace_size(p)
        if self.p_prime > p:
            raise ValueError(f"p_prime={self.p_prime} exceeds the {p} available features")
        return int(self.p_prime)

    def to_dict(self) -> dict:
        return {
            "n_models": self.n_models,
            "select_fraction": self.select_fraction,
            "k": self.k,
            "p_prime": self.p_prime,
            "q": self.distance.q,
            "seed": self.seed,
            "bootstrap": self.bootstrap,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EnsembleConfig":
        d = dict(d)
        q = d.pop("q", 2.0)
        return cls(distance=DistanceSpec(float(q)), **d)


@dataclass(frozen=True, eq=False)
class BaseModel:
    sample: BootstrapSample
    oob_error: float | None  # None: empty OOB set
    ordinal: int

    @property
    def scored(self) -> bool:
        return self.oob_error is not None

    def rank_key(self):
        return (not self.scored, self.oob_error if self.scored else 0.0, self.ordinal)

    def votes(self, train: Dataset, X, config: EnsembleConfig) -> tuple[np.ndarray, np.ndarray]:
        """Chain predictions for the rows of ``X`` (full feature width)."""
        cols = self.sample.feature_subset
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return exnrule_predict_batch(train.features[:, cols], train.labels, X[:, cols], config.k,
                                     config.distance, candidate_rows=self.sample.in_bag)


@dataclass(frozen=True, eq=False)
class OExNRuleModel:
    train: Dataset
    selected: tuple[BaseModel, ...]
    config: EnsembleConfig
    # OOB errors of every learner, ordinal order; kept for selection audits
    all_errors: tuple[float | None, ...] = field(default=(), repr=False)

    def base_votes(self, X) -> np.ndarray:
        """(n_selected, n_queries) matrix of learner votes, best-ranked first."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.train.p:
            raise ValueError(f"expected {self.train.p} features, got {X.shape[1]}")
        return np.vstack([m.votes(self.train, X, self.config)[0] for m in self.selected])

    def predict(self, X) -> np.ndarray:
        return aggregate_votes(self.base_votes(X))[0]

    def predict_proba(self, X) -> np.ndarray:
        return aggregate_votes(self.base_votes(X))[1]


def aggregate_votes(votes) -> tuple[np.ndarray, np.ndarray]:
    """Majority over rows of a (voters, queries) 0/1 matrix; a tie takes row 0's vote."""
    votes = np.asarray(votes, dtype=np.int64)
    n = votes.shape[0]
    ones = votes.sum(axis=0)
    out = np.where(2 * ones > n, 1, 0)
    tie = 2 * ones == n
    out[tie] = votes[0, tie]
    return out, ones / n


def oob_error(model: BaseModel | BootstrapSample, train: Dataset, config: EnsembleConfig) -> float | None:
    """Misclassification rate on the sample's out-of-bag rows, ``None`` if there are none."""
    sample = model.sample if isinstance(model, BaseModel) else model
    if len(sample.oob) == 0:
        return None
    cols = sample.feature_subset
    pred, _ = exnrule_predict_batch(train.features[:, cols], train.labels, train.features[sample.oob][:, cols],
                                    config.k, config.distance, candidate_rows=sample.in_bag)
    return float(np.count_nonzero(pred != train.labels[sample.oob])) / len(sample.oob)


def _draw(train: Dataset, config: EnsembleConfig, p_prime: int, ordinal: int, seed: int | None = None):
    if seed is None:
        seed = derive_seed(config.seed, ordinal)
    draw = draw_bootstrap if config.bootstrap else full_bag
    return draw(train, p_prime, seed)


def _build(train: Dataset, config: EnsembleConfig, p_prime: int, ordinal: int) -> BaseModel:
    sample = _draw(train, config, p_prime, ordinal)
    return BaseModel(sample, oob_error(sample, train, config), ordinal)


def _select(models, n_selected: int) -> tuple[BaseModel, ...]:
    return tuple(sorted(models, key=BaseModel.rank_key)[:n_selected])


def fit(train: Dataset, config: EnsembleConfig = EnsembleConfig(), workers: int = 1) -> OExNRuleModel:
    """Build, score and select base learners.

    Learner ``b`` (1-based) draws from ``derive_seed(config.seed, b)``, so the
    result does not depend on ``workers``.
    """
    if train.n < config.k + 1:
        raise ValueError(f"training set of {train.n} rows is too small for k={config.k}")
    p_prime = config.resolve_p_prime(train.p)
    ordinals = range(1, config.n_models + 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            models = list(pool.map(lambda b: _build(train, config, p_prime, b), ordinals))
    else:
        models = [_build(train, config, p_prime, b) for b in ordinals]
    return OExNRuleModel(train, _select(models, config.n_selected), config,
                         tuple(m.oob_error for m in models))


def predict(model: OExNRuleModel, x0):
    """Ensemble label for one query vector, or an array for a 2-D batch."""
    x = np.asarray(x0, dtype=float)
    out = model.predict(x)
    return int(out[0]) if x.ndim == 1 else out


def predict_proba(model: OExNRuleModel, x0):
    """Share of selected learners voting class 1."""
    x = np.asarray(x0, dtype=float)
    out = model.predict_proba(x)
    return float(out[0]) if x.ndim == 1 else out


def _fmt_error(e: float | None):
    return None if e is None else float(e)


def save_model(model: OExNRuleModel, path) -> Path:
    """Write ``model`` as a versioned JSON document (see docs/model_format.md)."""
    doc = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "library_version": __version__,
        "config": model.config.to_dict(),
        "dataset": {"sha256": model.train.digest(), "n": model.train.n, "p": model.train.p},
        "p_prime": int(len(model.selected[0].sample.feature_subset)),
        "models": [
            {"ordinal": m.ordinal, "seed": int(m.sample.sample_seed), "oob_error": _fmt_error(m.oob_error)}
            for m in model.selected
        ],
    }
    path = Path(path)
    path.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    return path


def load_model(path, train: Dataset) -> OExNRuleModel:
    """Rebuild a saved model against the training data it was fitted on."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: not a model file ({exc})") from None
    if doc.get("format") != FORMAT_NAME:
        raise ModelFormatError(f"{path}: unknown format {doc.get('format')!r}")
    if doc.get("version") != FORMAT_VERSION:
        raise ModelFormatError(f"{path}: unsupported version {doc.get('version')!r}")
    if doc["dataset"]["sha256"] != train.digest():
        raise ModelFormatError(f"{path}: training data does not match the saved digest")
    config = EnsembleConfig.from_dict(doc["config"])
    p_prime = int(doc["p_prime"])
    selected = []
    for rec in doc["models"]:
        sample = _draw(train, config, p_prime, rec["ordinal"], rec["seed"])
        selected.append(BaseModel(sample, rec["oob_error"], int(rec["ordinal"])))
    return OExNRuleModel(train, tuple(selected), config)


def with_k(config: EnsembleConfig, k: int) -> EnsembleConfig:
    return replace(config, k=k)
