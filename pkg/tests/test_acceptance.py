"""Exit criteria. Each test appends one PASS/FAIL line to the terminal summary."""
import time
from collections import Counter

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from mlbpknn.classify import KnnClassifier, KnnConfig, Sample, distance, tanimoto_distance
from mlbpknn.cli import main
from mlbpknn.evaluate import (PAPER_BATCH_SECONDS, PAPER_BATCH_SIZE, PAPER_MS_PER_IMAGE,
                              benchmark_runtime, cross_validate)
from mlbpknn.imageprep import PreprocessConfig
from mlbpknn.mlbp import (NeighborhoodSpec, extract, histogram_features, label_for_pattern,
                          label_image, uniformity)
from mlbpknn.synthetic import texture_corpus, write_pgm

pytestmark = pytest.mark.acceptance


def record(criterion, ok, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}")
    assert ok, detail


# 1 ---------------------------------------------------------------------------

def test_c1_pattern_enumeration():
    t0 = time.perf_counter()
    labels = Counter(label_for_pattern([(c >> k) & 1 for k in range(8)], 2) for c in range(256))
    uniform = sum(n for lab, n in labels.items() if lab != 9)
    elapsed = time.perf_counter() - t0
    expected = {0: 1, **{i: 8 for i in range(1, 8)}, 8: 1, 9: 198}
    record(1, uniform == 58 and dict(labels) == expected and elapsed < 1.0,
           f"{uniform} uniform patterns, {labels[9]} labelled 9, "
           f"per-label counts {dict(sorted(labels.items()))}, {elapsed * 1e3:.1f} ms")


# 2 ---------------------------------------------------------------------------

def test_c2_worked_uniformity_examples():
    a, b = uniformity("01001100"), uniformity("11000001")
    record(2, (a, b) == (4, 2), f'U("01001100")={a}, U("11000001")={b}')


# 3 ---------------------------------------------------------------------------

SCALES = [(4, 1.0), (8, 1.0), (16, 2.0)]
N_IMAGES = 20
RAW = PreprocessConfig(target_size=64, smoothing_enabled=False)
DEFAULT = PreprocessConfig()


@pytest.fixture(scope="module")
def invariance_images():
    rng = np.random.default_rng(2024)
    # headroom of 50 so every shifted image stays in [0, 255]
    return [rng.integers(0, 206, (64, 64)).astype(np.float64) for _ in range(N_IMAGES)]


def _monotone(img):
    return 255.0 * (img / 255.0) ** 2  # strictly increasing on [0, 255]


@pytest.mark.parametrize("P, R", SCALES)
def test_c3_gray_shift(invariance_images, P, R):
    spec = NeighborhoodSpec(P, R)
    bad = 0
    for img in invariance_images:
        for cfg in (RAW, DEFAULT):
            f = extract(img, spec, cfg)
            bad += sum(not np.array_equal(extract(img + c, spec, cfg), f) for c in (1, 10, 50))
    record(3, bad == 0, f"gray shift +{{1,10,50}}, P={P}: {bad} of {N_IMAGES * 6} "
                        "vectors differ (with and without preprocessing)")


@pytest.mark.parametrize("P, R", SCALES)
def test_c3_monotone_transform(invariance_images, P, R):
    spec = NeighborhoodSpec(P, R)
    bad = sum(not np.array_equal(extract(_monotone(img), spec, RAW), extract(img, spec, RAW))
              for img in invariance_images)
    record(3, bad == 0, f"monotone transform 255*(x/255)^2, P={P}: "
                        f"{bad} of {N_IMAGES} vectors differ")


@pytest.mark.parametrize("P, R", SCALES)
def test_c3_rot90(invariance_images, P, R):
    spec = NeighborhoodSpec(P, R)
    bad_exact, worst = 0, 0.0
    for img in invariance_images:
        rot = np.rot90(img)
        h = histogram_features(label_image(img, spec), spec)
        bad_exact += not np.array_equal(histogram_features(label_image(rot, spec), spec), h)
        worst = max(worst, np.abs(extract(rot, spec, DEFAULT) - extract(img, spec, DEFAULT)).max())
    record(3, bad_exact == 0 and worst <= 1e-9,
           f"rot90, P={P}: {bad_exact} histograms differ without preprocessing; "
           f"max deviation with preprocessing {worst:.1e} (tol 1e-9)")


# 4 ---------------------------------------------------------------------------

def test_c4_metric_suite():
    rng = np.random.default_rng(99)
    A = rng.dirichlet(np.ones(10), 1000)
    B = rng.dirichlet(np.ones(10), 1000)
    B[::10] = A[::10]  # a share of equal pairs for the zero-iff-equal check
    sym = bounded = zero_iff = identity = 0
    for a, b in zip(A, B):
        d = tanimoto_distance(a, b)
        sym += d == tanimoto_distance(b, a)
        bounded += 0.0 <= d <= 1.0
        zero_iff += (d == 0) == bool(np.array_equal(a, b))
        identity += abs((np.maximum(a, b) - np.minimum(a, b)).sum() - np.abs(a - b).sum()) <= 1e-12
    triples = rng.uniform(0, 5, (1000, 3, 10)) * (rng.random((1000, 3, 10)) < 0.8)
    triangle = sum(tanimoto_distance(x, z) <= tanimoto_distance(x, y) + tanimoto_distance(y, z)
                   + 1e-12 for x, y, z in triples)
    ok = (sym, bounded, zero_iff, identity, triangle) == (1000,) * 5
    record(4, ok, f"symmetric {sym}/1000, in [0,1] {bounded}/1000, zero iff equal "
                  f"{zero_iff}/1000, max-min identity {identity}/1000, triangle {triangle}/1000")


# 5 ---------------------------------------------------------------------------

def _brute_force(train, query, T, metric):
    ranked = sorted((distance(s.features, query, metric), s.id, s.label) for s in train)[:T]
    votes, sums = Counter(), Counter()
    for d, _, lab in ranked:
        votes[lab] += 1
        sums[lab] += d
    return min(votes, key=lambda c: (-votes[c], sums[c] / votes[c], c))


def test_c5_knn_oracle_equivalence():
    rng = np.random.default_rng(5)
    agree = total = 0
    for _ in range(50):
        n = int(rng.integers(5, 31))
        classes = [f"k{j}" for j in range(int(rng.integers(2, 4)))]
        X = rng.dirichlet(np.ones(10), n)
        dup = rng.random(n) < 0.15
        X[dup] = X[0]  # exact duplicates exercise the distance tie-break
        train = [Sample(X[i], classes[rng.integers(len(classes))], int(i))
                 for i in rng.permutation(n)]
        model = KnnClassifier(train)
        queries = list(rng.dirichlet(np.ones(10), 4)) + [X[0]]
        for metric in ("tanimoto", "euclidean"):
            for T in (1, 3, 5):
                for q in queries:
                    total += 1
                    agree += model.predict(q, KnnConfig(T, metric)).label == \
                        _brute_force(train, q, T, metric)
    record(5, agree == total, f"{agree}/{total} predictions agree with brute force")


# 6, 7 ------------------------------------------------------------------------

@pytest.fixture(scope="module")
def synthetic_run():
    t0 = time.perf_counter()
    corpus = texture_corpus(n_per_class=100, size=128, seed=0)
    samples = [Sample(extract(img), label, i) for i, (img, label) in enumerate(corpus)]
    report = cross_validate(samples, 10, KnnConfig(3, "tanimoto"), seed=42)
    return samples, report, time.perf_counter() - t0


def test_c6_synthetic_texture_experiment(synthetic_run):
    _, report, elapsed = synthetic_run
    acc = report.mean_accuracy
    record(6, acc >= 0.95 and elapsed < 60,
           f"smooth vs binary noise, 10-fold E-3NN: mean accuracy {acc:.4f} (>= 0.95), "
           f"{elapsed:.1f} s (< 60 s)")


def test_c7_normalization(synthetic_run):
    samples, _, _ = synthetic_run
    dims_ok = all(s.features.shape == (10,) for s in samples)
    worst = max(abs(s.features.sum() - 1.0) for s in samples)
    record(7, dims_ok and worst <= 1e-9,
           f"{len(samples)} vectors of dimension P+2=10, max |sum - 1| = {worst:.1e}")


# 8 ---------------------------------------------------------------------------

def test_c8_runtime(tmp_path):
    rng = np.random.default_rng(8)
    paths = [write_pgm(tmp_path / f"{i:02d}.pgm", rng.integers(0, 256, (128, 128)))
             for i in range(PAPER_BATCH_SIZE)]
    stats = benchmark_runtime(paths, NeighborhoodSpec(8, 1), PreprocessConfig())
    batch_s = (sum(stats.per_image_ms) + sum(stats.load_ms)) / 1e3
    ok = stats.max_ms <= PAPER_MS_PER_IMAGE and batch_s <= PAPER_BATCH_SECONDS
    record(8, ok, f"extract 128x128: mean {stats.mean_ms:.2f} ms, max {stats.max_ms:.2f} ms "
                  f"(<= {PAPER_MS_PER_IMAGE:.0f}); {PAPER_BATCH_SIZE} images incl. decode "
                  f"{batch_s:.2f} s (<= {PAPER_BATCH_SECONDS})")


# 9 ---------------------------------------------------------------------------

def test_c9_crossval_determinism(tmp_path, capsys):
    root = tmp_path / "data"
    for i, (img, label) in enumerate(texture_corpus(n_per_class=15, size=64, seed=3)):
        (root / label).mkdir(parents=True, exist_ok=True)
        write_pgm(root / label / f"{i:03d}.pgm", img)
    outs = [tmp_path / "run1.json", tmp_path / "run2.json"]
    codes = [main(["crossval", str(root), "--seed", "42", "--folds", "10",
                   "--output", str(o)]) for o in outs]
    capsys.readouterr()
    same = outs[0].read_bytes() == outs[1].read_bytes()
    record(9, codes == [0, 0] and same,
           f"two crossval runs, exit codes {codes}, reports byte-identical: {same}")
