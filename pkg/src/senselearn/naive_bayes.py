"""Naive Bayes over discrete features: estimation, posteriors, classification."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateClass, InconsistentCounts, ShapeMismatch, ZeroEvidence
from .events import MISSING, MarginalCounts, ObservationSet, marginal_counts, project


@dataclass(frozen=True, eq=False)
class ParameterSet:
    """Class prior ``p(S)`` and per-feature conditionals ``p(F_i | S)``.

    ``conditionals[i]`` has shape (k, cardinality_i); row ``s`` is the
    distribution of feature ``i`` given class ``s``. Rows of classes with no
    support are all zero and flagged in ``degenerate``.
    """

    class_prior: np.ndarray
    conditionals: tuple[np.ndarray, ...]
    degenerate: np.ndarray

    def __post_init__(self):
        prior = np.asarray(self.class_prior, dtype=float)
        conds = tuple(np.asarray(c, dtype=float) for c in self.conditionals)
        degen = np.asarray(self.degenerate, dtype=bool)
        k = prior.shape[0]
        if degen.shape != (k,) or any(c.ndim != 2 or c.shape[0] != k for c in conds):
            raise ShapeMismatch("conditionals need one row per class")
        for arr in (prior, *conds, degen):
            arr.setflags(write=False)
        object.__setattr__(self, "class_prior", prior)
        object.__setattr__(self, "conditionals", conds)
        object.__setattr__(self, "degenerate", degen)

    @property
    def k(self) -> int:
        return self.class_prior.shape[0]

    @property
    def feature_cardinalities(self) -> tuple[int, ...]:
        return tuple(c.shape[1] for c in self.conditionals)

    def vector(self) -> np.ndarray:
        """Parameters flattened as prior, then each feature's table row by row."""
        return np.concatenate([self.class_prior] + [c.ravel() for c in self.conditionals])

    @classmethod
    def from_vector(cls, vec, k: int, cardinalities: Sequence[int]) -> "ParameterSet":
        vec = np.asarray(vec, dtype=float)
        prior = vec[:k]
        pos = k
        conds = []
        for card in cardinalities:
            conds.append(vec[pos:pos + k * card].reshape(k, card))
            pos += k * card
        if pos != vec.size:
            raise ShapeMismatch("vector length does not match k and cardinalities")
        degen = np.array([all(c[s].sum() == 0 for c in conds) for s in range(k)]) if conds else prior == 0
        return cls(prior, tuple(conds), degen)

    def same_shape(self, other: "ParameterSet") -> bool:
        return self.k == other.k and self.feature_cardinalities == other.feature_cardinalities


def mle_from_arrays(class_counts, feature_counts, n=None, smoothing: float = 0.0) -> ParameterSet:
    """Estimate parameters from a class count vector and (k, card) count tables.

    Counts may be fractional (expected counts).
    """
    class_counts = np.asarray(class_counts, dtype=float)
    k = class_counts.shape[0]
    n = class_counts.sum() if n is None else float(n)
    if n <= 0:
        raise InconsistentCounts("sample size must be positive")
    tables = []
    for i, tab in enumerate(feature_counts):
        tab = np.asarray(tab, dtype=float)
        if tab.ndim != 2 or tab.shape[0] != k:
            raise ShapeMismatch(f"feature {i}: expected a table with {k} rows")
        if not np.allclose(tab.sum(axis=1), class_counts, rtol=0, atol=1e-9 * max(n, 1)):
            raise InconsistentCounts(f"feature {i}: class margins disagree with freq(S)")
        tables.append(tab)
    prior = (class_counts + smoothing) / (n + smoothing * k)
    conds = []
    degenerate = np.zeros(k, dtype=bool)
    for tab in tables:
        denom = tab.sum(axis=1, keepdims=True) + smoothing * tab.shape[1]
        with np.errstate(invalid="ignore", divide="ignore"):
            cond = np.where(denom > 0, (tab + smoothing) / np.where(denom > 0, denom, 1), 0.0)
        degenerate |= denom[:, 0] == 0
        conds.append(cond)
    if not tables:
        degenerate = prior == 0
    return ParameterSet(prior, tuple(conds), degenerate)


def mle_from_counts(
    class_counts: MarginalCounts,
    joint_counts: Sequence[MarginalCounts],
    n=None,
    smoothing: float = 0.0,
) -> ParameterSet:
    """Maximum likelihood estimates ``freq(S)/N`` and ``freq(F_i, S)/freq(S)``.

    Parameters
    ----------
    class_counts : MarginalCounts
        Counts over the class variable alone.
    joint_counts : sequence of MarginalCounts
        One table over ``{F_i, S}`` per feature, in either axis order.
    n : number, optional
        Sample size; defaults to ``class_counts.total``.
    smoothing : float
        Add-alpha smoothing; 0 gives the plain MLE.

    Raises
    ------
    InconsistentCounts
        If a feature table's class margin disagrees with ``class_counts``.
    """
    if len(class_counts.variables) != 1:
        raise InconsistentCounts("class_counts must be over a single variable")
    s = class_counts.variables[0]
    tables = []
    for jc in joint_counts:
        others = [v for v in jc.variables if v != s]
        if s not in jc.variables or len(others) != 1:
            raise InconsistentCounts("each joint table must be over exactly {F_i, S}")
        tables.append(project(jc, [s, others[0]]).counts)
    return mle_from_arrays(class_counts.counts, tables, n, smoothing)


def fit(data: ObservationSet, smoothing: float = 0.0) -> ParameterSet:
    """Estimate Naive Bayes parameters from a fully labeled set."""
    schema = data.schema
    s = schema.class_index
    cc = marginal_counts(data, [s])
    joints = [marginal_counts(data, [s, f]) for f in schema.feature_indices]
    return mle_from_counts(cc, joints, data.n_rows, smoothing)


def joint_prob(params: ParameterSet, fv, s: int, strict: bool = False) -> float:
    """``p(S=s) * prod_i p(F_i=fv[i] | S=s)``."""
    if strict and params.degenerate[s]:
        raise DegenerateClass(f"class {s} has no support")
    p = float(params.class_prior[s])
    for cond, f in zip(params.conditionals, fv):
        p *= float(cond[s, f])
    return p


def joint_matrix(params: ParameterSet, X) -> np.ndarray:
    """Joint probabilities for many feature vectors, shape (len(X), k)."""
    X = np.atleast_2d(np.asarray(X, dtype=np.int64))
    out = np.broadcast_to(params.class_prior, (X.shape[0], params.k)).copy()
    for i, cond in enumerate(params.conditionals):
        out *= cond[:, X[:, i]].T
    return out


def posterior_matrix(params: ParameterSet, X) -> np.ndarray:
    """Row-normalized posteriors ``p(S | fv)`` for many feature vectors.

    Raises
    ------
    ZeroEvidence
        Naming the rows of ``X`` whose joint probability is zero for every class.
    """
    joint = joint_matrix(params, X)
    evidence = joint.sum(axis=1)
    bad = np.flatnonzero(evidence <= 0)
    if bad.size:
        raise ZeroEvidence("all classes have zero probability", rows=bad)
    return joint / evidence[:, None]


def posterior(params: ParameterSet, fv) -> np.ndarray:
    """``p(S | fv)`` as a length-k vector."""
    return posterior_matrix(params, [fv])[0]


def classify(params: ParameterSet, fv) -> int:
    """Most probable class for ``fv``; ties go to the lowest class index."""
    return int(np.argmax(posterior(params, fv)))


def classify_many(params: ParameterSet, X) -> np.ndarray:
    return np.argmax(posterior_matrix(params, X), axis=1)


def joint_table(params: ParameterSet) -> np.ndarray:
    """Full joint over every (feature vector, class) cell.

    Axes follow the features in order, with the class last.
    """
    table = params.class_prior.copy()
    for cond in params.conditionals:
        # new feature axis goes before the class axis
        table = table[..., None, :] * cond.T
    return table


def log_likelihood(params: ParameterSet, X, classes) -> float:
    """Complete-data log-likelihood of rows ``X`` with classes ``classes``."""
    classes = np.asarray(classes, dtype=np.int64)
    if np.any(classes == MISSING):
        raise ValueError("log_likelihood needs every class observed")
    joint = joint_matrix(params, X)[np.arange(len(classes)), classes]
    with np.errstate(divide="ignore"):
        return float(np.log(joint).sum())
