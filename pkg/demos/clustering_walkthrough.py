"""Agglomerative clustering from mismatch counts."""
import numpy as np

from senselearn import cluster as cl

words = [("noun", "verb", "car"), ("adjective", "verb", "defeat"),
         ("adverb", "verb", "car"), ("noun", "verb", "car")]
codes = np.array([[sorted(set(col)).index(v) for v, col in zip(row, zip(*words))] for row in words])

D = cl.dissimilarity_matrix(codes)
print(D)

labels, log = cl.agglomerate(D, cl.MCQUITTY, 1, seed=0, return_log=True)
for step in log:
    print(f"join {step.kept + 1} and {step.absorbed + 1} at {step.criterion:g} (size {step.size})")

# Ward treats each row of D as coordinates
for k in (3, 2):
    print(k, "groups:", cl.agglomerate(D, cl.WARD, k, seed=0) + 1, cl.agglomerate(D, cl.MCQUITTY, k, seed=0) + 1)

# ties are broken at random, reproducibly per seed
flat = 2 * (1 - np.eye(6))
print({tuple(cl.agglomerate(flat, cl.MCQUITTY, 3, seed=s).tolist()) for s in range(5)})
