"""Scoring sense groups against gold senses, and cross validation."""
import numpy as np

from senselearn import evaluation as ev
from senselearn.events import ObservationSet

groups = np.array([1, 1, 1, 2, 2, 2, 2, 3, 3, 3]) - 1
gold = np.array([0, 0, 1, 1, 1, 1, 2, 2, 2, 0])  # a a b b b b c c c a

acc, mapping = ev.best_mapping_accuracy(groups, gold, 3)
print("best accuracy", acc, "mapping", mapping)
print("another mapping", ev.mapped_accuracy(groups, gold, (0, 2, 1)))
print(ev.confusion(groups, gold, mapping, 3))
print("majority", ev.majority_baseline(gold))

rng = np.random.default_rng(1)
X = rng.integers(0, 3, (120, 3))
y = (X[:, 0] + (rng.random(120) < 0.2)) % 3
data = ObservationSet.from_rows(np.column_stack([X, y]), (3, 3, 3, 3), class_index=3)

for name, learner in [("majority", ev.majority_learner), ("naive bayes", ev.naive_bayes_learner(0.5))]:
    rep = ev.k_fold_cv(data, learner, folds=10, seed=0)
    print(f"{name:12} {rep.mean:.3f} +/- {rep.std:.3f}")

for point in ev.learning_curve(data, [10, 50, 100], ev.naive_bayes_learner(0.5), folds=10, seed=0):
    print(point.size, round(point.mean, 3))
