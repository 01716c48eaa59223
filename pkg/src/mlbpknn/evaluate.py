"""Stratified k-fold cross-validation and runtime benchmarking."""
from __future__ import annotations

import json
import statistics
import time
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .classify import KnnClassifier, KnnConfig, Sample
from .errors import DataError
from .imageprep import PreprocessConfig, load_image
from .mlbp import NeighborhoodSpec, SpecLike, as_specs, extract

# reference runtime: 90 query images in about 46.73 s, about 519 ms each
PAPER_MS_PER_IMAGE = 519.0
PAPER_BATCH_SECONDS = 46.73
PAPER_BATCH_SIZE = 90


class Lcg64:
    """64-bit linear congruential generator (Knuth's MMIX constants).

    ``state <- state * 6364136223846793005 + 1442695040888963407 mod 2**64``;
    each draw returns the top 32 bits. ``below(n)`` maps a draw to
    ``[0, n)`` as ``(draw * n) >> 32``. Fixed here so fold plans are the
    same on every platform and numpy version.
    """

    MULTIPLIER = 6364136223846793005
    INCREMENT = 1442695040888963407
    MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = seed & self.MASK

    def next_u32(self) -> int:
        self.state = (self.state * self.MULTIPLIER + self.INCREMENT) & self.MASK
        return self.state >> 32

    def below(self, n: int) -> int:
        return (self.next_u32() * n) >> 32

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates, walking from the end of the list."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignments: tuple  # fold index per sample, in input order

    def test_indices(self, fold: int) -> list:
        return [i for i, f in enumerate(self.assignments) if f == fold]

    def fold_sizes(self) -> list:
        return [self.assignments.count(f) for f in range(self.k)]


def stratified_kfold(samples: Sequence[Sample], k: int = 10, seed: int = 42) -> FoldPlan:
    """Shuffle each class with :class:`Lcg64`, then deal round-robin.

    Classes are visited in sorted order and samples within a class in id
    order before shuffling, so the plan does not depend on input order.
    The dealing position carries over between classes, which keeps the
    total fold sizes within one of each other as well.
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if not samples:
        raise ValueError("cannot split an empty dataset")
    by_class: dict = {}
    for i, s in enumerate(samples):
        by_class.setdefault(s.label, []).append(i)

    rng = Lcg64(seed)
    assignments = [0] * len(samples)
    pos = 0
    for label in sorted(by_class):
        members = sorted(by_class[label], key=lambda i: samples[i].id)
        rng.shuffle(members)
        for i in members:
            assignments[i] = pos % k
            pos += 1
    return FoldPlan(k, tuple(assignments))


@dataclass
class EvalReport:
    k: int
    seed: int
    knn: KnnConfig
    classes: list
    per_fold_accuracy: list
    fold_sizes: list
    confusion: list  # rows: true class, columns: predicted class
    spec: list = field(default_factory=list)
    preprocess: PreprocessConfig | None = None

    @property
    def n_samples(self) -> int:
        return sum(map(sum, self.confusion))

    @property
    def mean_accuracy(self) -> float:
        correct = sum(self.confusion[i][i] for i in range(len(self.classes)))
        return correct / self.n_samples

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "seed": self.seed,
            "knn": asdict(self.knn),
            "spec": [asdict(s) for s in self.spec],
            "preprocess": asdict(self.preprocess) if self.preprocess else None,
            "classes": list(self.classes),
            "fold_sizes": list(self.fold_sizes),
            "per_fold_accuracy": list(self.per_fold_accuracy),
            "mean_accuracy": self.mean_accuracy,
            "confusion": [list(r) for r in self.confusion],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def format_table(self) -> str:
        lines = [f"{self.k}-fold cross-validation, T={self.knn.T}, "
                 f"metric={self.knn.metric}, seed={self.seed}",
                 "fold  size  accuracy"]
        for f, (n, acc) in enumerate(zip(self.fold_sizes, self.per_fold_accuracy)):
            lines.append(f"{f:>4}  {n:>4}  {acc:8.4f}")
        lines.append(f"mean accuracy: {self.mean_accuracy:.4f}")
        width = max(len(c) for c in self.classes + ["true\\pred"])
        lines.append("confusion (rows true, columns predicted):")
        lines.append(" " * width + "".join(f"  {c:>{width}}" for c in self.classes))
        for c, row in zip(self.classes, self.confusion):
            lines.append(f"{c:>{width}}" + "".join(f"  {v:>{width}}" for v in row))
        return "\n".join(lines) + "\n"


def cross_validate(samples: Sequence[Sample], k: int = 10, cfg: KnnConfig | None = None,
                   seed: int = 42, spec: SpecLike = None,
                   preprocess: PreprocessConfig | None = None) -> EvalReport:
    """Train on k-1 folds, predict the held-out fold, for every fold.

    ``spec`` and ``preprocess`` are only echoed into the report.
    """
    cfg = cfg or KnnConfig()
    plan = stratified_kfold(samples, k, seed)
    sizes = plan.fold_sizes()
    if min(sizes) == 0:
        raise DataError(f"{len(samples)} samples cannot fill {k} folds")
    smallest_train = len(samples) - max(sizes)
    if cfg.T > smallest_train:
        raise DataError(f"T={cfg.T} exceeds the smallest training split ({smallest_train})")

    classes = sorted({s.label for s in samples})
    index = {c: i for i, c in enumerate(classes)}
    confusion = [[0] * len(classes) for _ in classes]
    accuracies = []
    for fold in range(k):
        test = set(plan.test_indices(fold))
        model = KnnClassifier([s for i, s in enumerate(samples) if i not in test])
        correct = 0
        for i in sorted(test):
            s = samples[i]
            pred = model.predict(s.features, cfg).label
            confusion[index[s.label]][index[pred]] += 1
            correct += pred == s.label
        accuracies.append(correct / len(test))
    return EvalReport(k=k, seed=seed, knn=cfg, classes=classes,
                      per_fold_accuracy=accuracies, fold_sizes=sizes,
                      confusion=confusion,
                      spec=list(as_specs(spec)) if spec is not None else [],
                      preprocess=preprocess)


def sweep(samples, k=10, seed=42, Ts=(1, 3, 5), metrics=("tanimoto", "euclidean")) -> list:
    """Cross-validate every (T, metric) pair."""
    return [cross_validate(samples, k, KnnConfig(T, m), seed)
            for m in metrics for T in Ts]


@dataclass
class TimingStats:
    per_image_ms: list
    load_ms: list = field(default_factory=list)
    classify_ms: list = field(default_factory=list)

    @property
    def mean_ms(self) -> float:
        return statistics.fmean(self.per_image_ms)

    @property
    def median_ms(self) -> float:
        return statistics.median(self.per_image_ms)

    @property
    def max_ms(self) -> float:
        return max(self.per_image_ms)

    @property
    def min_ms(self) -> float:
        return min(self.per_image_ms)

    @property
    def total_s(self) -> float:
        return sum(self.per_image_ms) / 1000.0

    def format_table(self) -> str:
        lines = [f"images x repetitions: {len(self.per_image_ms)}",
                 f"extract ms/image  mean {self.mean_ms:9.3f}  median {self.median_ms:9.3f}"
                 f"  max {self.max_ms:9.3f}"]
        if self.load_ms:
            lines.append(f"decode  ms/image  mean {statistics.fmean(self.load_ms):9.3f}")
        if self.classify_ms:
            lines.append(f"classify ms/query mean {statistics.fmean(self.classify_ms):9.3f}")
        lines.append(f"reference: {PAPER_MS_PER_IMAGE:.0f} ms per query image "
                     f"({PAPER_BATCH_SECONDS} s for {PAPER_BATCH_SIZE} images)")
        return "\n".join(lines) + "\n"


def benchmark_runtime(paths, spec: SpecLike = None, cfg: PreprocessConfig | None = None,
                      repetitions: int = 1, gallery: KnnClassifier | None = None,
                      knn: KnnConfig | None = None) -> TimingStats:
    """Wall-clock :func:`extract` per image, decoding timed separately.

    With a ``gallery`` each extracted vector is also classified and that
    time is reported on its own.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    spec = spec if spec is not None else NeighborhoodSpec()
    cfg = cfg or PreprocessConfig()
    stats = TimingStats([])
    clock = time.perf_counter
    for path in paths:
        for _ in range(repetitions):
            t0 = clock()
            img = load_image(path)
            t1 = clock()
            vec = extract(img, spec, cfg)
            t2 = clock()
            stats.load_ms.append((t1 - t0) * 1e3)
            stats.per_image_ms.append((t2 - t1) * 1e3)
            if gallery is not None:
                gallery.predict(vec, knn)
                stats.classify_ms.append((clock() - t2) * 1e3)
    if not stats.per_image_ms:
        raise ValueError("no images to benchmark")
    return stats
