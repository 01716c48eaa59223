"""
MLBP labels and the feature histogram
=====================================

Walks through one pixel's comparison pattern, the uniformity count,
the resulting label, and finally the histogram of a whole image.
"""
import numpy as np

from mlbpknn import NeighborhoodSpec, extract, label_image, lbp_code, mlbp_label, uniformity
from mlbpknn.mlbp import label_for_pattern

# %%
# A single neighbourhood
# ----------------------
# Eight neighbours around a centre of 6. Neighbours at least as bright as
# the centre give a 1.

spec = NeighborhoodSpec(P=8, R=1.0)
centre, neighbours = 6, [6, 5, 2, 1, 7, 8, 9, 7]
pattern = lbp_code(centre, neighbours)
print("bits", pattern.bits, "code", pattern.code)
print("transitions", uniformity(pattern), "label", mlbp_label(centre, neighbours, spec))

# %%
# How the 256 patterns collapse
# -----------------------------
# With U_T = 2 only 58 patterns are "uniform"; the other 198 share label 9.

counts = np.bincount([label_for_pattern([(c >> k) & 1 for k in range(8)], spec.U_T)
                      for c in range(256)], minlength=10)
for lab, n in enumerate(counts):
    print(f"label {lab}: {n:3d} patterns")

# %%
# A label map
# -----------
# A vertical step edge. Bright pixels touching the edge have three darker
# neighbours, so five ones (label 5); every other comparison holds,
# including dark pixels whose neighbours are equal or brighter (label 8).

img = np.zeros((8, 8))
img[:, 4:] = 200.0
print(label_image(img, spec))

# %%
# The feature vector is the normalized label histogram.
print(np.round(extract(img, spec), 3))
