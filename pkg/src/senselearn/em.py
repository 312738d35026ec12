"""EM for a Naive Bayes model whose class variable is never observed.

The default E-step imputes, for every distinct feature vector, the single
most probable class and counts the completed sample ("hard" or
classification EM). ``mode="soft"`` instead spreads each row over the
classes in proportion to its posterior, which is textbook EM.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from . import naive_bayes as nb
from .errors import InvalidK, ShapeMismatch, ZeroEvidence
from .events import ObservationSet

HARD = "hard"
SOFT = "soft"


@dataclass(frozen=True)
class EmConfig:
    k: int
    epsilon: float = 1e-3
    max_iterations: int = 500
    seed: int | None = None
    mode: Literal["hard", "soft"] = HARD
    init_assignments: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.k < 1:
            raise InvalidK(f"k must be positive, got {self.k}")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.mode not in (HARD, SOFT):
            raise ValueError(f"unknown imputation mode {self.mode!r}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


@dataclass
class EmResult:
    params: nb.ParameterSet
    assignments: np.ndarray
    iterations: int
    converged: bool
    trajectory: list[float] = field(default_factory=list)
    log_likelihood: list[float] = field(default_factory=list)

    @property
    def empty_classes(self) -> list[int]:
        """Classes that ended with no rows (zero prior)."""
        return [int(s) for s in np.flatnonzero(self.params.class_prior == 0)]


def random_init(data: ObservationSet, k: int, seed) -> np.ndarray:
    """Uniform random class per row, reproducible from ``seed``."""
    rng = np.random.default_rng(seed)
    return rng.integers(0, k, size=data.n_rows)


def _counts(X, assignments, k, cards):
    class_counts = np.bincount(assignments, minlength=k)
    tables = []
    for i, card in enumerate(cards):
        flat = assignments * card + X[:, i]
        tables.append(np.bincount(flat, minlength=k * card).reshape(k, card))
    return class_counts, tables


def m_step(class_counts, feature_counts, n=None) -> nb.ParameterSet:
    return nb.mle_from_arrays(class_counts, feature_counts, n)


def e_step(params: nb.ParameterSet, data: ObservationSet, mode: str = HARD):
    """Impute the class and return ``(assignments, class_counts, feature_counts)``.

    In hard mode ``assignments`` holds the argmax class for each row and the
    counts are integer frequencies of the completed sample. In soft mode the
    counts are expected frequencies ``p(S | y) * freq(y)`` and
    ``assignments`` is ``None``.

    Raises
    ------
    ZeroEvidence
        Listing the rows whose feature vector has zero probability under
        every class.
    """
    X = data.features
    cards = data.feature_cardinalities
    k = params.k
    # one posterior per distinct feature vector, broadcast back to rows
    uniq, inverse, freq = np.unique(X, axis=0, return_inverse=True, return_counts=True)
    inverse = inverse.ravel()
    try:
        post = nb.posterior_matrix(params, uniq)
    except ZeroEvidence as exc:
        rows = np.flatnonzero(np.isin(inverse, exc.rows))
        raise ZeroEvidence("all classes have zero probability", rows=rows) from None
    if mode == HARD:
        assignments = np.argmax(post, axis=1)[inverse]
        class_counts, tables = _counts(X, assignments, k, cards)
        return assignments, class_counts, tables
    if mode != SOFT:
        raise ValueError(f"unknown imputation mode {mode!r}")
    expected = post * freq[:, None]
    class_counts = expected.sum(axis=0)
    tables = []
    for i, card in enumerate(cards):
        tab = np.zeros((k, card))
        np.add.at(tab.T, uniq[:, i], expected)
        tables.append(tab)
    return None, class_counts, tables


def param_distance(old: nb.ParameterSet, new: nb.ParameterSet) -> float:
    """Largest absolute difference between two parameter vectors."""
    if not old.same_shape(new):
        raise ShapeMismatch("parameter sets have different shapes")
    return float(np.max(np.abs(old.vector() - new.vector())))


def _complete_ll(params, X, assignments):
    return nb.log_likelihood(params, X, assignments)


def run_em(data: ObservationSet, config: EmConfig) -> EmResult:
    """Alternate E- and M-steps from a random class assignment until the
    parameter vector moves by less than ``config.epsilon``.

    The first iteration estimates parameters from the random assignment
    (or ``config.init_assignments``); every later iteration re-imputes and
    re-estimates, then compares against the previous estimate.
    """
    X = data.features
    cards = data.feature_cardinalities
    k = config.k
    n = data.n_rows
    if config.init_assignments is not None:
        assignments = np.asarray(config.init_assignments, dtype=np.int64)
        if assignments.shape != (n,) or assignments.min() < 0 or assignments.max() >= k:
            raise ShapeMismatch("init_assignments must give a class in [0, k) for every row")
    else:
        assignments = random_init(data, k, config.seed)

    class_counts, tables = _counts(X, assignments, k, cards)
    params = m_step(class_counts, tables, n)
    trajectory: list[float] = []
    lls = [_complete_ll(params, X, assignments)]
    iterations = 1
    converged = False
    while iterations < config.max_iterations:
        imputed, class_counts, tables = e_step(params, data, config.mode)
        new = m_step(class_counts, tables, n)
        iterations += 1
        dist = param_distance(params, new)
        trajectory.append(dist)
        params = new
        if imputed is not None:
            assignments = imputed
            lls.append(_complete_ll(params, X, assignments))
        if dist < config.epsilon:
            converged = True
            break
    if config.mode == SOFT:
        assignments = nb.classify_many(params, X)
    return EmResult(params, np.asarray(assignments), iterations, converged, trajectory, lls)
