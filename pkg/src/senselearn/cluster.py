"""Agglomerative clustering of discrete observations.

Observations are compared by counting mismatched features. Two linkages
are provided: Ward's minimum variance, which treats each row of the
dissimilarity matrix as a point in Euclidean space, and McQuitty's, which
averages the two old distances whenever clusters merge. Ties between
equally good merges are broken at random from a seeded generator.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import InvalidK, ShapeMismatch
from .events import ObservationSet

WARD = "ward"
MCQUITTY = "mcquitty"
TIE_TOLERANCE = 1e-12


class Merge(NamedTuple):
    kept: int
    absorbed: int
    criterion: float
    size: int


def dissimilarity_matrix(data) -> np.ndarray:
    """Pairwise count of features whose values differ.

    ``data`` is an :class:`ObservationSet` (the class column is ignored) or
    a plain (N, n_features) integer array.
    """
    X = data.features if isinstance(data, ObservationSet) else np.asarray(data)
    if X.ndim != 2 or X.shape[1] < 1:
        raise ShapeMismatch("need at least one feature column")
    out = np.zeros((X.shape[0], X.shape[0]), dtype=np.int64)
    for j in range(X.shape[1]):
        col = X[:, j]
        out += col[:, None] != col[None, :]
    return out


def check_dissimilarity(matrix) -> np.ndarray:
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ShapeMismatch("dissimilarity matrix must be square and nonempty")
    if not np.array_equal(m, m.T):
        raise ShapeMismatch("dissimilarity matrix must be symmetric")
    if np.any(np.diag(m) != 0) or np.any(m < 0):
        raise ShapeMismatch("dissimilarity matrix needs a zero diagonal and nonnegative cells")
    return m


def ward_between_variance(centroid_a, size_a, centroid_b, size_b) -> float:
    """``||a - b||^2 / (1/size_a + 1/size_b)``."""
    d = np.asarray(centroid_a, dtype=float) - np.asarray(centroid_b, dtype=float)
    return float(d @ d) / (1.0 / size_a + 1.0 / size_b)


def mcquitty_update(d_ki, d_li):
    """Distance from a freshly merged cluster to a third one."""
    return (d_ki + d_li) / 2


def _pick(crit: np.ndarray, active: np.ndarray, rng):
    idx = np.flatnonzero(active)
    sub = crit[np.ix_(idx, idx)]
    iu = np.triu_indices(idx.size, k=1)
    vals = sub[iu]
    best = vals.min()
    ties = np.flatnonzero(vals <= best + TIE_TOLERANCE)
    # triu_indices is already row-major, i.e. lexicographic by slot
    t = ties[0] if ties.size == 1 else ties[rng.integers(ties.size)]
    return int(idx[iu[0][t]]), int(idx[iu[1][t]]), float(vals[t])


def relabel_first_appearance(labels) -> np.ndarray:
    labels = np.asarray(labels)
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    order = np.argsort(np.argsort(first))
    return order[inverse.ravel()]


def agglomerate(matrix, linkage: str, k: int, seed=None, return_log: bool = False):
    """Merge clusters bottom-up until ``k`` remain.

    Every observation starts alone. Each step merges the pair with the
    smallest Ward variance or McQuitty distance; the merged cluster keeps
    the lower slot. Labels are numbered by first appearance in row order.

    Returns the label array, or ``(labels, merges)`` with ``return_log``.
    """
    D = check_dissimilarity(matrix)
    n = D.shape[0]
    if not 1 <= k <= n:
        raise InvalidK(f"k must lie in [1, {n}], got {k}")
    if linkage not in (WARD, MCQUITTY):
        raise ValueError(f"unknown linkage {linkage!r}")
    rng = np.random.default_rng(seed)
    slot_of = np.arange(n)
    active = np.ones(n, dtype=bool)
    sizes = np.ones(n, dtype=np.int64)
    log: list[Merge] = []

    if linkage == WARD:
        centroids = D.copy()
        sq = (centroids ** 2).sum(axis=1)
        crit = (sq[:, None] + sq[None, :] - 2 * centroids @ centroids.T) / 2.0
        crit = np.maximum(crit, 0.0)
    else:
        crit = D.copy()

    for _ in range(n - k):
        a, b, value = _pick(crit, active, rng)
        size = sizes[a] + sizes[b]
        if linkage == WARD:
            centroids[a] = (sizes[a] * centroids[a] + sizes[b] * centroids[b]) / size
            sizes[a] = size
            diff = centroids - centroids[a]
            row = (diff * diff).sum(axis=1) / (1.0 / sizes[a] + 1.0 / sizes)
        else:
            row = mcquitty_update(crit[a], crit[b])
            sizes[a] = size
        active[b] = False
        crit[a, :] = row
        crit[:, a] = row
        crit[a, a] = 0.0
        slot_of[slot_of == b] = a
        log.append(Merge(a, b, value, int(size)))

    labels = relabel_first_appearance(slot_of)
    return (labels, log) if return_log else labels


def cluster(data: ObservationSet, linkage: str, k: int, seed=None) -> np.ndarray:
    """Dissimilarity matrix followed by :func:`agglomerate`."""
    return agglomerate(dissimilarity_matrix(data), linkage, k, seed)
