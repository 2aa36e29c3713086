"""Datasets, train/test splitting, contrived noise features and bootstrap draws.

Every random operation takes an explicit integer seed.  Seeds for repeated
work (split ``r`` of a benchmark, base model ``b`` of an ensemble) come from
:func:`derive_seed`, which hashes the master seed together with a tuple of
integer counters through :class:`numpy.random.SeedSequence`.  A child seed
depends only on its counters, never on scheduling order.
"""

from __future__ import annotations

import csv
import hashlib
import math
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "Dataset",
    "SplitPair",
    "BootstrapSample",
    "DataError",
    "derive_seed",
    "name_key",
    "subspace_size",
    "load_csv",
    "split",
    "add_contrived_features",
    "draw_bootstrap",
    "full_bag",
]

MISSING_TOKENS = frozenset({"", "na", "nan", "?", "null", "none"})
MAX_SPLIT_RETRIES = 100


class DataError(ValueError):
    """Raised for malformed input files and degenerate datasets."""


def derive_seed(seed: int, *counters: int) -> int:
    """Child seed for ``(seed, *counters)``, a 63-bit non-negative integer."""
    ss = np.random.SeedSequence([int(seed), *(int(c) for c in counters)])
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def name_key(name: str) -> int:
    """Stable integer key for a dataset name, usable as a seed counter."""
    return zlib.crc32(name.encode("utf-8"))


def subspace_size(p: int) -> int:
    """Default feature subspace size: ``floor(sqrt(p))``, at least 1."""
    return max(1, math.isqrt(int(p)))


def _frozen(a, dtype) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Dataset:
    """Real-valued feature matrix with binary 0/1 labels.

    Arrays are copied on construction and marked read-only, so a Dataset can
    be shared between threads and processes without defensive copies.
    """

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...] = ()
    id: str | None = None

    def __post_init__(self):
        X = np.asarray(self.features, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.ndim != 2:
            raise DataError(f"features must be 2-D, got shape {X.shape}")
        y = np.asarray(self.labels).ravel()
        if len(y) != X.shape[0]:
            raise DataError(f"{X.shape[0]} feature rows but {len(y)} labels")
        if not np.isin(y, (0, 1)).all():
            raise DataError("labels must be 0 or 1")
        if not np.isfinite(X).all():
            bad = int(np.argwhere(~np.isfinite(X))[0, 0])
            raise DataError(f"non-finite feature value in row {bad}")
        names = tuple(self.feature_names) or tuple(f"x{j}" for j in range(X.shape[1]))
        if len(names) != X.shape[1]:
            raise DataError(f"{len(names)} feature names for {X.shape[1]} columns")
        object.__setattr__(self, "features", _frozen(X, np.float64))
        object.__setattr__(self, "labels", _frozen(y, np.int8))
        object.__setattr__(self, "feature_names", names)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def p(self) -> int:
        return self.features.shape[1]

    def class_counts(self) -> tuple[int, int]:
        ones = int(self.labels.sum())
        return self.n - ones, ones

    def take(self, rows) -> "Dataset":
        rows = np.asarray(rows, dtype=np.intp)
        return Dataset(self.features[rows], self.labels[rows], self.feature_names, self.id)

    def digest(self) -> str:
        """SHA-256 over the feature bytes and labels; used to pair models with data."""
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.features, dtype="<f8").tobytes())
        h.update(np.ascontiguousarray(self.labels, dtype=np.int8).tobytes())
        return h.hexdigest()


@dataclass(frozen=True, eq=False)
class SplitPair:
    train: Dataset
    test: Dataset
    split_seed: int
    train_rows: np.ndarray = field(repr=False)
    test_rows: np.ndarray = field(repr=False)

    def digest(self) -> str:
        h = hashlib.sha256(np.asarray(self.train_rows, dtype="<i8").tobytes())
        h.update(b"|")
        h.update(np.asarray(self.test_rows, dtype="<i8").tobytes())
        return h.hexdigest()[:16]


@dataclass(frozen=True, eq=False)
class BootstrapSample:
    """Row multiset and feature subset defining one base learner.

    ``in_bag`` keeps the draw order; ``oob`` is sorted.  ``feature_subset``
    is sorted ascending so distance sums always run in the source column order.
    """

    in_bag: np.ndarray
    feature_subset: np.ndarray
    oob: np.ndarray
    sample_seed: int


def _parse_label_column(header: list[str], label_column) -> int:
    if isinstance(label_column, str) and label_column in header:
        return header.index(label_column)
    try:
        idx = int(label_column)
    except (TypeError, ValueError):
        raise DataError(f"label column {label_column!r} not in header {header}") from None
    if not -len(header) <= idx < len(header):
        raise DataError(f"label column index {idx} out of range for {len(header)} columns")
    return idx % len(header)


def load_csv(path, label_column=-1, positive_label=None, id: str | None = None) -> Dataset:
    """Read a comma-separated file with a header line into a :class:`Dataset`.

    Parameters
    ----------
    path : str or Path
        UTF-8 CSV, ``.`` as decimal point.
    label_column : str or int
        Column name, or 0-based index (negative counts from the end).
    positive_label : str, optional
        Raw label value mapped to class 1.  Defaults to the larger of the two
        label strings in sorted order.
    id : str, optional
        Short dataset name; defaults to the file stem.

    Raises
    ------
    DataError
        On unparsable or missing values (row and column reported), a label
        column with more than two distinct values, or an unknown
        ``positive_label``.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        li = _parse_label_column(header, label_column)
        rows, raw_labels = [], []
        for lineno, rec in enumerate(reader, start=2):
            if not rec or all(not c.strip() for c in rec):
                continue
            if len(rec) != len(header):
                raise DataError(f"{path}: line {lineno} has {len(rec)} fields, expected {len(header)}")
            row = []
            for j, cell in enumerate(rec):
                cell = cell.strip()
                if j == li:
                    if cell.lower() in MISSING_TOKENS:
                        raise DataError(f"{path}: missing label in row {lineno - 2} (line {lineno})")
                    raw_labels.append(cell)
                    continue
                if cell.lower() in MISSING_TOKENS:
                    raise DataError(f"{path}: missing value in row {lineno - 2}, column {header[j]!r}")
                try:
                    v = float(cell)
                except ValueError:
                    raise DataError(
                        f"{path}: cannot parse {cell!r} in row {lineno - 2}, column {header[j]!r}") from None
                if not math.isfinite(v):
                    raise DataError(f"{path}: non-finite value in row {lineno - 2}, column {header[j]!r}")
                row.append(v)
            rows.append(row)
    if not rows:
        raise DataError(f"{path}: no data rows")

    values = sorted(set(raw_labels))
    if len(values) > 2:
        raise DataError(f"{path}: label column has {len(values)} distinct values {values[:5]}, expected 2")
    pos = values[-1] if positive_label is None else str(positive_label)
    if len(values) == 2 and pos not in values:
        raise DataError(f"{path}: positive label {pos!r} not among {values}")
    labels = [1 if v == pos else 0 for v in raw_labels]
    names = [h for j, h in enumerate(header) if j != li]
    return Dataset(np.array(rows, dtype=float).reshape(len(rows), len(names)), labels, names,
                   id if id is not None else path.stem)


def split(ds: Dataset, train_fraction: float = 0.7, seed: int = 0) -> SplitPair:
    """Uniform random train/test partition without replacement.

    The training part gets ``round(train_fraction * n)`` rows (halves round
    up), clamped so both parts are nonempty.  A draw whose training part
    holds a single class is redrawn from the same stream, at most
    ``MAX_SPLIT_RETRIES`` times.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    n = ds.n
    if n < 2:
        raise DataError("need at least two rows to split")
    n_train = min(max(int(math.floor(train_fraction * n + 0.5)), 1), n - 1)
    rng = np.random.default_rng(seed)
    two_classes = len(np.unique(ds.labels)) == 2
    for _ in range(MAX_SPLIT_RETRIES):
        perm = rng.permutation(n)
        tr, te = np.sort(perm[:n_train]), np.sort(perm[n_train:])
        if not two_classes or len(np.unique(ds.labels[tr])) == 2:
            return SplitPair(ds.take(tr), ds.take(te), seed, _frozen(tr, np.intp), _frozen(te, np.intp))
    raise DataError(
        f"no two-class training split after {MAX_SPLIT_RETRIES} draws "
        f"(n={n}, train_fraction={train_fraction}, class counts {ds.class_counts()})")


def add_contrived_features(ds: Dataset, count: int, seed: int = 0) -> Dataset:
    """Append ``count`` i.i.d. uniform [0, 1) noise columns."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    noise = np.random.default_rng(seed).random((ds.n, count))
    names = ds.feature_names + tuple(f"contrived_{j + 1}" for j in range(count))
    return Dataset(np.hstack([ds.features, noise]), ds.labels, names, ds.id)


def _oob(in_bag: np.ndarray, n: int) -> np.ndarray:
    mask = np.ones(n, dtype=bool)
    mask[in_bag] = False
    return np.flatnonzero(mask)


def draw_bootstrap(train: Dataset, p_prime: int, seed: int) -> BootstrapSample:
    """Bootstrap ``n`` rows with replacement and ``p_prime`` columns without."""
    n, p = train.n, train.p
    if n < 1:
        raise DataError("cannot bootstrap an empty dataset")
    if not 1 <= p_prime <= p:
        raise ValueError(f"p_prime must be in [1, {p}], got {p_prime}")
    rng = np.random.default_rng(seed)
    in_bag = rng.integers(0, n, size=n)
    cols = np.sort(rng.choice(p, size=p_prime, replace=False))
    return BootstrapSample(_frozen(in_bag, np.intp), _frozen(cols, np.intp),
                           _frozen(_oob(in_bag, n), np.intp), seed)


def full_bag(train: Dataset, p_prime: int, seed: int) -> BootstrapSample:
    """Every row exactly once, random feature subset.  Test hook for bagging-off runs."""
    if not 1 <= p_prime <= train.p:
        raise ValueError(f"p_prime must be in [1, {train.p}], got {p_prime}")
    rng = np.random.default_rng(seed)
    cols = np.sort(rng.choice(train.p, size=p_prime, replace=False))
    return BootstrapSample(_frozen(np.arange(train.n), np.intp), _frozen(cols, np.intp),
                           _frozen(np.empty(0), np.intp), seed)

