"""Hard EM on ten observations of two binary features, step by step."""
import numpy as np

from senselearn import em
from senselearn import naive_bayes as nb
from senselearn.events import ObservationSet

rows = np.array([(1, 2), (1, 2), (2, 2), (2, 2), (1, 2), (1, 1), (1, 1), (1, 1), (1, 2), (2, 2)]) - 1
data = ObservationSet.from_rows(rows, (2, 2), ("F1", "F2"))
start = np.array([1, 3, 2, 2, 1, 3, 1, 2, 2, 1]) - 1

# first M-step: plain relative frequencies under the random start
params = nb.fit(data.with_classes(start, k=3))
print("p(S)      ", params.class_prior)
print("p(F1|S)\n", params.conditionals[0])
print("p(F2|S)\n", params.conditionals[1])

# E-step: every row goes to its most probable class
for fv in [(0, 0), (0, 1), (1, 0), (1, 1)]:
    print(np.array(fv) + 1, nb.posterior(params, fv).round(3), "->", nb.classify(params, fv) + 1)

# the whole loop, from the same start
result = em.run_em(data, em.EmConfig(3, epsilon=0.01, init_assignments=tuple(start)))
print("iterations", result.iterations, "converged", result.converged)
print("distance per iteration", np.round(result.trajectory, 3))
print("groups", result.assignments + 1)

# soft EM keeps fractional counts instead of imputing one class
soft = em.run_em(data, em.EmConfig(3, seed=0, mode=em.SOFT, max_iterations=200))
print("soft EM prior", soft.params.class_prior.round(3))
