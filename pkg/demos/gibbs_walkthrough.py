"""Gibbs sampling for the same latent-class model, and its convergence check."""
import numpy as np

from senselearn import gibbs as gb
from senselearn.events import ObservationSet

rows = np.array([(1, 2), (1, 2), (2, 2), (2, 2), (1, 2), (1, 1), (1, 1), (1, 1), (1, 2), (2, 2)]) - 1
data = ObservationSet.from_rows(rows, (2, 2), ("F1", "F2"))
start = np.array([1, 3, 2, 2, 1, 3, 1, 2, 2, 1]) - 1

# counts plus a flat prior give the posterior Dirichlets directly
prior = gb.NaiveBayesPrior.uniform(3, (2, 2))
class_post, feature_post = gb.dirichlet_posteriors(data.features, start, 3, prior)
print("class posterior", class_post)
print("F1 posteriors  ", feature_post[0])
print("F2 posteriors  ", feature_post[1])

# one draw from each
rng = np.random.default_rng(0)
print("sampled p(S)   ", gb.sample_dirichlet(class_post, rng).round(2))

# a full run: burn-in, then monitor until the early and late windows agree
cfg = gb.GibbsConfig(3, seed=0, burn_in=200, monitor=500, increment=250, max_total=3000,
                     init_assignments=tuple(start))
result = gb.run_gibbs(data, cfg)
print("converged", result.converged, "after", result.iterations, "iterations")
print("kept chain length", result.chains.length)
print("median p(S)", result.params.class_prior.round(3))
print("groups", result.assignments + 1)

# the check itself on two made-up chains
print(gb.geweke_z(rng.random(1000)), gb.geweke_z(np.r_[np.zeros(500), np.ones(500)]))
