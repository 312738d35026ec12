"""Learning word sense classifiers from discrete contextual features.

Supervised learning selects decomposable log-linear models (or averages
them as a Naive Mix); unsupervised learning fits a latent-class Naive
Bayes model by EM or Gibbs sampling, or clusters observations with Ward's
or McQuitty's agglomerative method.
"""

from .errors import DataError, NumericalError, SenseLearnError
from .events import MISSING, FeatureSchema, MarginalCounts, ObservationSet, marginal_counts, project
from .naive_bayes import ParameterSet
from .em import EmConfig, EmResult, run_em
from .gibbs import DirichletParams, GibbsConfig, GibbsResult, NaiveBayesPrior, run_gibbs
from .cluster import MCQUITTY, WARD, agglomerate, dissimilarity_matrix
from .decomposable import (
    DecomposableModel,
    ModelGraph,
    format_model,
    naive_mix,
    parse_model,
    sequential_select,
)
from .evaluation import best_mapping_accuracy, k_fold_cv, majority_baseline, repeated_trials
from .io import load_dataset, save_dataset

__version__ = "0.1.0"

__all__ = [
    "DataError", "NumericalError", "SenseLearnError",
    "MISSING", "FeatureSchema", "MarginalCounts", "ObservationSet", "marginal_counts", "project",
    "ParameterSet", "EmConfig", "EmResult", "run_em",
    "DirichletParams", "GibbsConfig", "GibbsResult", "NaiveBayesPrior", "run_gibbs",
    "MCQUITTY", "WARD", "agglomerate", "dissimilarity_matrix",
    "DecomposableModel", "ModelGraph", "format_model", "naive_mix", "parse_model", "sequential_select",
    "best_mapping_accuracy", "k_fold_cv", "majority_baseline", "repeated_trials",
    "load_dataset", "save_dataset",
]
