"""Minkowski distances and three instance-based voting rules.

* classical kNN: the ``k`` rows closest to the query, majority vote;
* distance-weighted kNN: same neighbours, votes weighted by ``1/(d + eps)``;
* the extended neighbourhood rule (ExNRule): a chain of ``k`` rows where
  each step takes the remaining candidate nearest to the previous pick,
  starting from the query itself.

All ties resolve toward the smallest training-row index.  Candidates passed
to the chain are a multiset: a row index listed twice (a bootstrap
duplicate) is two separate candidates, and picking one leaves the other.

The ``*_batch`` functions work on many queries at once and are what the
ensemble uses; the single-query functions are thin wrappers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DistanceSpec",
    "EUCLIDEAN",
    "NeighborChain",
    "minkowski_distance",
    "pairwise_distances",
    "majority_vote",
    "exnrule_chain",
    "exnrule_chain_batch",
    "exnrule_predict",
    "exnrule_predict_batch",
    "knn_predict",
    "knn_predict_batch",
    "wknn_predict",
    "wknn_predict_batch",
    "WKNN_EPS",
]

WKNN_EPS = 1e-12


@dataclass(frozen=True)
class DistanceSpec:
    """Minkowski exponent ``q >= 1``; ``q = 2`` is Euclidean."""

    q: float = 2.0

    def __post_init__(self):
        if not self.q >= 1:
            raise ValueError(f"Minkowski exponent must be >= 1, got {self.q}")


EUCLIDEAN = DistanceSpec(2.0)


@dataclass(frozen=True, eq=False)
class NeighborChain:
    indices: np.ndarray
    labels: np.ndarray | None
    step_distances: np.ndarray

    def __len__(self):
        return len(self.indices)


def pairwise_distances(A, B, spec: DistanceSpec = EUCLIDEAN) -> np.ndarray:
    """Distance matrix between the rows of ``A`` (m, p) and ``B`` (n, p)."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if A.shape[1] != B.shape[1]:
        raise ValueError(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
    diff = A[:, None, :] - B[None, :, :]
    q = spec.q
    if q == 2:
        return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    if q == 1:
        return np.abs(diff).sum(axis=-1)
    return (np.abs(diff) ** q).sum(axis=-1) ** (1.0 / q)


def minkowski_distance(a, b, spec: DistanceSpec = EUCLIDEAN) -> float:
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    if a.size == 0:
        raise ValueError("vectors must be nonempty")
    return float(pairwise_distances(a[None], b[None], spec)[0, 0])


def majority_vote(labels) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise majority of a (Q, k) 0/1 matrix.

    Returns ``(label, share_of_ones)``.  An exact tie goes to column 0, which
    callers order nearest-first.
    """
    labels = np.atleast_2d(np.asarray(labels, dtype=np.int64))
    k = labels.shape[1]
    ones = labels.sum(axis=1)
    out = np.where(2 * ones > k, 1, 0)
    tie = 2 * ones == k
    out[tie] = labels[tie, 0]
    return out, ones / k


def exnrule_chain_batch(features, candidate_rows, queries, k: int,
                        spec: DistanceSpec = EUCLIDEAN) -> tuple[np.ndarray, np.ndarray]:
    """Extended-neighbourhood chains for every row of ``queries``.

    Returns ``(rows, step_distances)``, both (Q, k): ``rows[i, s]`` is the
    training-row index picked at step ``s`` for query ``i``.
    """
    X = np.asarray(features, dtype=float)
    cand = np.sort(np.asarray(candidate_rows, dtype=np.intp))
    Q = np.atleast_2d(np.asarray(queries, dtype=float))
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if len(cand) < k:
        raise ValueError(f"need at least k={k} candidates, got {len(cand)}")
    C = X[cand]
    nq = Q.shape[0]
    taken = np.zeros((nq, len(cand)), dtype=bool)
    pos = np.empty((nq, k), dtype=np.intp)
    dist = np.empty((nq, k))
    cur = pairwise_distances(Q, C, spec)
    qi = np.arange(nq)
    for s in range(k):
        cur[taken] = np.inf
        j = cur.argmin(axis=1)
        pos[:, s] = j
        dist[:, s] = cur[qi, j]
        taken[qi, j] = True
        if s + 1 < k:
            cur = pairwise_distances(C[j], C, spec)
    return cand[pos], dist


def exnrule_chain(train_features, candidate_rows, x0, k: int, spec: DistanceSpec = EUCLIDEAN,
                  labels=None) -> NeighborChain:
    rows, dist = exnrule_chain_batch(train_features, candidate_rows, np.asarray(x0, dtype=float)[None], k, spec)
    chain_labels = None if labels is None else np.asarray(labels)[rows[0]]
    return NeighborChain(rows[0], chain_labels, dist[0])


def exnrule_predict_batch(features, labels, queries, k: int, spec: DistanceSpec = EUCLIDEAN,
                          candidate_rows=None) -> tuple[np.ndarray, np.ndarray]:
    """Chain majority vote per query; ``candidate_rows`` defaults to all rows."""
    y = np.asarray(labels)
    if candidate_rows is None:
        candidate_rows = np.arange(len(y))
    rows, _ = exnrule_chain_batch(features, candidate_rows, queries, k, spec)
    return majority_vote(y[rows])


def exnrule_predict(train, x0, k: int, spec: DistanceSpec = EUCLIDEAN) -> tuple[int, float]:
    """Label and class-1 vote share of the chain through ``train`` (a Dataset)."""
    lab, frac = exnrule_predict_batch(train.features, train.labels, np.asarray(x0, dtype=float)[None], k, spec)
    return int(lab[0]), float(frac[0])


def _nearest(features, queries, k: int, spec: DistanceSpec):
    X = np.asarray(features, dtype=float)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if X.shape[0] < k:
        raise ValueError(f"need at least k={k} training rows, got {X.shape[0]}")
    D = pairwise_distances(queries, X, spec)
    order = np.argsort(D, axis=1, kind="stable")[:, :k]
    return order, np.take_along_axis(D, order, axis=1)


def knn_predict_batch(features, labels, queries, k: int,
                      spec: DistanceSpec = EUCLIDEAN) -> tuple[np.ndarray, np.ndarray]:
    order, _ = _nearest(features, queries, k, spec)
    return majority_vote(np.asarray(labels)[order])


def knn_predict(train, x0, k: int, spec: DistanceSpec = EUCLIDEAN) -> tuple[int, float]:
    lab, frac = knn_predict_batch(train.features, train.labels, np.asarray(x0, dtype=float)[None], k, spec)
    return int(lab[0]), float(frac[0])


def wknn_predict_batch(features, labels, queries, k: int,
                       spec: DistanceSpec = EUCLIDEAN) -> tuple[np.ndarray, np.ndarray]:
    """Inverse-distance weighted vote; returns ``(label, class-1 weight share)``.

    Equal weight sums fall back to the nearest neighbour's class.
    """
    order, d = _nearest(features, queries, k, spec)
    ny = np.asarray(labels)[order]
    w = 1.0 / (d + WKNN_EPS)
    w1 = (w * ny).sum(axis=1)
    w0 = (w * (1 - ny)).sum(axis=1)
    out = np.where(w1 > w0, 1, 0)
    tie = w1 == w0
    out[tie] = ny[tie, 0]
    return out, w1 / (w0 + w1)


def wknn_predict(train, x0, k: int, spec: DistanceSpec = EUCLIDEAN) -> tuple[int, float]:
    lab, frac = wknn_predict_batch(train.features, train.labels, np.asarray(x0, dtype=float)[None], k, spec)
    return int(lab[0]), float(frac[0])
