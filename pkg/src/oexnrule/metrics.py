"""Accuracy, Cohen's kappa and the binary Brier score."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

__all__ = ["MetricRecord", "accuracy", "cohen_kappa", "brier_score", "evaluate", "METRICS"]

METRICS = ("accuracy", "kappa", "brier")


def _pair(a, b, what="labels"):
    a = np.asarray(a).ravel()
    b = np.asarray(b).ravel()
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.size} {what} vs {b.size}")
    return a, b


def accuracy(y_true, y_pred) -> float:
    y_true, y_pred = _pair(y_true, y_pred)
    if y_true.size == 0:
        raise ValueError("empty label vectors")
    return float(np.count_nonzero(y_true == y_pred)) / y_true.size


def cohen_kappa(y_true, y_pred) -> float:
    """Chance-corrected agreement ``(p_o - p_e) / (1 - p_e)``.

    ``p_e`` is the sum over classes of the product of the two marginal
    frequencies.  When ``p_e == 1`` (both vectors constant and equal) the
    result is 1 if agreement is perfect, else 0.  Not clamped: negative
    values mean worse than chance.
    """
    y_true, y_pred = _pair(y_true, y_pred)
    n = y_true.size
    if n == 0:
        raise ValueError("empty label vectors")
    p_o = np.count_nonzero(y_true == y_pred) / n
    classes = np.union1d(y_true, y_pred)
    p_e = sum(np.count_nonzero(y_true == c) * np.count_nonzero(y_pred == c) for c in classes) / n**2
    if p_e == 1:
        return 1.0 if p_o == 1 else 0.0
    return float((p_o - p_e) / (1 - p_e))


def brier_score(y_true, p_hat) -> float:
    """Mean of ``(p_hat - y_true)**2`` with ``p_hat`` the class-1 probability."""
    y_true, p_hat = _pair(y_true, p_hat, "probabilities")
    if y_true.size == 0:
        raise ValueError("empty vectors")
    p_hat = p_hat.astype(float)
    if ((p_hat < 0) | (p_hat > 1) | np.isnan(p_hat)).any():
        raise ValueError("probabilities must lie in [0, 1]")
    return float(np.mean((p_hat - y_true.astype(float)) ** 2))


@dataclass(frozen=True)
class MetricRecord:
    accuracy: float
    kappa: float
    brier: float
    n_test: int

    def __post_init__(self):
        if self.n_test < 1:
            raise ValueError("n_test must be >= 1")
        for name in METRICS:
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} is not finite")

    def as_dict(self) -> dict:
        return asdict(self)


def evaluate(y_true, y_pred, p_hat) -> MetricRecord:
    return MetricRecord(accuracy(y_true, y_pred), cohen_kappa(y_true, y_pred),
                        brier_score(y_true, p_hat), int(np.asarray(y_true).size))
