"""
Tanimoto distance and k-NN voting
=================================
"""
import numpy as np

from mlbpknn import KnnClassifier, KnnConfig, Sample, euclidean_distance, tanimoto_distance

a, b = np.array([0.5, 0.5]), np.array([0.25, 0.75])
print("tanimoto", tanimoto_distance(a, b), " euclidean", round(euclidean_distance(a, b), 6))

# %%
# Ties in the vote go to the class whose neighbours are closer on average.
train = [Sample(np.array([d, 1 - d]), lab, i)
         for i, (d, lab) in enumerate([(0.40, "M"), (0.38, "F"), (0.30, "M"), (0.29, "F")])]
model = KnnClassifier(train)
pred = model.predict([0.45, 0.55], KnnConfig(T=4))
print(pred.label, pred.vote_counts, np.round(pred.neighbor_distances, 4))
