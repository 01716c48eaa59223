"""
Cross-validation on a synthetic texture corpus
==============================================

Two texture classes: blurred uniform noise and black/white pixel noise.
A sweep over T in {1, 3, 5} and both metrics gives the same grid as a
classifier comparison table.
"""
from mlbpknn import Sample, extract
from mlbpknn.evaluate import sweep
from mlbpknn.synthetic import texture_corpus

corpus = texture_corpus(n_per_class=50, size=96, seed=1)
samples = [Sample(extract(img), label, i) for i, (img, label) in enumerate(corpus)]

for report in sweep(samples, k=10, seed=42):
    print(f"T={report.knn.T} {report.knn.metric:<9} accuracy {report.mean_accuracy:.4f}")

print()
print(sweep(samples, k=10, seed=42, Ts=(3,), metrics=("tanimoto",))[0].format_table())
