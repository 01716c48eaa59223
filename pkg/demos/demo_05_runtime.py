"""
Per-image runtime
=================

Times the full extraction pipeline on 90 images of 128x128 pixels,
with decoding timed separately.
"""
import tempfile
from pathlib import Path

import numpy as np

from mlbpknn import benchmark_runtime
from mlbpknn.synthetic import write_pgm

rng = np.random.default_rng(0)
with tempfile.TemporaryDirectory() as tmp:
    paths = [write_pgm(Path(tmp) / f"{i}.pgm", rng.integers(0, 256, (128, 128)))
             for i in range(90)]
    stats = benchmark_runtime(paths, repetitions=2)
print(stats.format_table())
print(f"total extraction for 90 images: {stats.total_s / 2:.2f} s")
