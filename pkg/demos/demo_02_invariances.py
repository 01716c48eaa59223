"""
Invariance checks
=================

Brightness offsets and quarter turns leave the descriptor unchanged.
A nonlinear brightness curve only does so when every neighbour sits on
the pixel grid (P=4); interpolated neighbours are weighted averages, and
averages do not keep their order under a nonlinear map.
"""
import numpy as np

from mlbpknn import NeighborhoodSpec, PreprocessConfig, extract

rng = np.random.default_rng(0)
img = rng.integers(0, 200, (64, 64)).astype(float)
raw = PreprocessConfig(target_size=64, smoothing_enabled=False)

for P, R in [(4, 1.0), (8, 1.0), (16, 2.0)]:
    spec = NeighborhoodSpec(P, R)
    f = extract(img, spec, raw)
    shift = np.array_equal(extract(img + 50, spec, raw), f)
    rot = np.array_equal(extract(np.rot90(img), spec, raw), f)
    curve = np.array_equal(extract(255 * (img / 255) ** 2, spec, raw), f)
    print(f"P={P:2d} R={R}: +50 same={shift}  rot90 same={rot}  squared curve same={curve}")

# %%
# With the default smoothing and resizing the quarter-turn check still holds.
spec = NeighborhoodSpec()
print("rot90 with preprocessing, max diff:",
      np.abs(extract(np.rot90(img), spec) - extract(img, spec)).max())
