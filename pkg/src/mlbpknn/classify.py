"""Tanimoto / Euclidean distances and a majority-vote k-NN classifier."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

METRICS = ("tanimoto", "euclidean")


@dataclass(frozen=True)
class Sample:
    features: np.ndarray
    label: str
    id: int


@dataclass(frozen=True)
class KnnConfig:
    T: int = 3
    metric: str = "tanimoto"

    def __post_init__(self):
        if int(self.T) != self.T or self.T < 1:
            raise ValueError(f"T must be a positive integer, got {self.T}")
        if self.metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}, got {self.metric!r}")


@dataclass(frozen=True)
class Prediction:
    label: str
    neighbor_ids: tuple
    neighbor_distances: tuple
    vote_counts: dict = field(default_factory=dict)


def _pair(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a, b


def tanimoto_rows(X: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Tanimoto distance between ``q`` and every row of ``X``."""
    hi = np.maximum(X, q)
    num = (hi - np.minimum(X, q)).sum(axis=-1)
    den = hi.sum(axis=-1)
    safe = np.where(den > 0, den, 1.0)
    return np.where(den > 0, num / safe, 0.0)


def euclidean_rows(X: np.ndarray, q: np.ndarray) -> np.ndarray:
    d = X - q
    return np.sqrt((d * d).sum(axis=-1))


_ROW_METRICS = {"tanimoto": tanimoto_rows, "euclidean": euclidean_rows}


def tanimoto_distance(a, b) -> float:
    """Sum of (max - min) over sum of max; 0 when both vectors are all zero."""
    a, b = _pair(a, b)
    if (a < 0).any() or (b < 0).any():
        raise ValueError("Tanimoto distance needs nonnegative vectors")
    return float(tanimoto_rows(a[None, :], b)[0])


def euclidean_distance(a, b) -> float:
    a, b = _pair(a, b)
    return float(euclidean_rows(a[None, :], b)[0])


def distance(a, b, metric: str = "tanimoto") -> float:
    if metric == "tanimoto":
        return tanimoto_distance(a, b)
    if metric == "euclidean":
        return euclidean_distance(a, b)
    raise ValueError(f"unknown metric {metric!r}")


class KnnClassifier:
    """Immutable k-NN model over a fixed training set.

    Neighbours are ranked by (distance, sample id). The winning class has
    the most votes; ties go to the smaller mean neighbour distance, then
    to the lexicographically smaller class name.
    """

    def __init__(self, train: Sequence[Sample]):
        train = sorted(train, key=lambda s: s.id)
        if not train:
            raise ValueError("training set is empty")
        X = np.array([np.asarray(s.features, dtype=np.float64) for s in train])
        if X.ndim != 2:
            raise ValueError("training feature vectors differ in dimension")
        ids = np.array([s.id for s in train])
        if len(np.unique(ids)) != len(ids):
            raise ValueError("sample ids must be unique")
        X.setflags(write=False)
        self._X = X
        self._ids = ids
        self._labels = [s.label for s in train]

    def __len__(self):
        return len(self._labels)

    @property
    def dim(self) -> int:
        return self._X.shape[1]

    def distances(self, query, metric="tanimoto") -> np.ndarray:
        q = np.asarray(query, dtype=np.float64)
        if q.shape != (self.dim,):
            raise ValueError(f"dimension mismatch: query {q.shape}, training ({self.dim},)")
        if metric == "tanimoto" and ((q < 0).any() or (self._X < 0).any()):
            raise ValueError("Tanimoto distance needs nonnegative vectors")
        return _ROW_METRICS[metric](self._X, q)

    def predict(self, query, cfg: KnnConfig | None = None) -> Prediction:
        cfg = cfg or KnnConfig()
        if cfg.T > len(self):
            raise ValueError(f"T={cfg.T} exceeds training set size {len(self)}")
        d = self.distances(query, cfg.metric)
        order = np.lexsort((self._ids, d))[:cfg.T]

        votes: dict = {}
        dist_sum: dict = {}
        for i in order:
            lab = self._labels[i]
            votes[lab] = votes.get(lab, 0) + 1
            dist_sum[lab] = dist_sum.get(lab, 0.0) + float(d[i])
        best = min(votes, key=lambda c: (-votes[c], dist_sum[c] / votes[c], c))
        return Prediction(
            label=best,
            neighbor_ids=tuple(int(self._ids[i]) for i in order),
            neighbor_distances=tuple(float(d[i]) for i in order),
            vote_counts=dict(sorted(votes.items())),
        )


def knn_classify(train: Sequence[Sample], query, cfg: KnnConfig | None = None) -> Prediction:
    return KnnClassifier(train).predict(query, cfg)
