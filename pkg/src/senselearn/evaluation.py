"""Evaluation protocols for supervised and unsupervised sense learners.

A supervised learner is a callable ``train(data) -> predict`` where
``predict(X)`` returns one class per feature row. An unsupervised learner
is a callable ``learner(data, seed) -> groups``; its groups are scored after
choosing the group-to-sense mapping that agrees best with the gold labels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from typing import Callable

import numpy as np

from . import naive_bayes as nb
from .errors import KTooLarge, LearnerFailure, LengthMismatch, SizeTooLarge
from .events import ObservationSet

MAX_MAPPING_K = 8


def _labels(x, k, what):
    arr = np.asarray(x, dtype=np.int64)
    if arr.ndim != 1:
        raise LengthMismatch(f"{what} must be a vector")
    if arr.size and (arr.min() < 0 or arr.max() >= k):
        raise ValueError(f"{what} labels must lie in [0, {k})")
    return arr


def agreement_table(groups, gold, k: int) -> np.ndarray:
    """Counts of (group, sense) pairs, shape (k, k)."""
    groups = _labels(groups, k, "groups")
    gold = _labels(gold, k, "gold")
    if groups.shape != gold.shape:
        raise LengthMismatch(f"{groups.size} groups for {gold.size} gold labels")
    return np.bincount(groups * k + gold, minlength=k * k).reshape(k, k)


def best_mapping_accuracy(groups, gold, k: int):
    """Highest accuracy over all one-to-one group-to-sense mappings.

    Returns ``(accuracy, mapping)`` where ``mapping[g]`` is the sense given
    to group ``g``. Ties go to the lexicographically smallest mapping.

    Raises
    ------
    KTooLarge
        For ``k`` above 8, where enumerating ``k!`` mappings stops being cheap.
    """
    if k > MAX_MAPPING_K:
        raise KTooLarge(f"k={k} exceeds {MAX_MAPPING_K}")
    table = agreement_table(groups, gold, k)
    n = table.sum()
    if n == 0:
        raise LengthMismatch("no instances to evaluate")
    rows = np.arange(k)
    best, best_map = -1, None
    for perm in permutations(range(k)):
        hits = table[rows, perm].sum()
        if hits > best:
            best, best_map = hits, perm
    return best / n, tuple(int(p) for p in best_map)


def mapped_accuracy(groups, gold, mapping) -> float:
    groups = np.asarray(groups, dtype=np.int64)
    gold = np.asarray(gold, dtype=np.int64)
    return float(np.mean(np.asarray(mapping)[groups] == gold))


def majority_baseline(gold) -> float:
    gold = np.asarray(gold)
    if gold.size == 0:
        raise LengthMismatch("majority baseline of an empty sample")
    _, counts = np.unique(gold, return_counts=True)
    return counts.max() / gold.size


def confusion(groups, gold, mapping, k: int) -> np.ndarray:
    """Rows are gold senses, columns the senses assigned through ``mapping``."""
    groups = _labels(groups, k, "groups")
    gold = _labels(gold, k, "gold")
    if groups.shape != gold.shape:
        raise LengthMismatch(f"{groups.size} groups for {gold.size} gold labels")
    assigned = np.asarray(mapping, dtype=np.int64)[groups]
    return np.bincount(gold * k + assigned, minlength=k * k).reshape(k, k)


def mean_std(values):
    values = np.asarray(values, dtype=float)
    std = float(values.std(ddof=1)) if values.size > 1 else 0.0
    return float(values.mean()), std


def fold_indices(n: int, folds: int, seed) -> list[np.ndarray]:
    """Shuffle ``range(n)`` and cut it into ``folds`` contiguous parts.

    Parts differ in size by at most one; the larger ones come first.
    """
    if not 2 <= folds <= n:
        raise ValueError(f"need 2 <= folds <= N, got folds={folds}, N={n}")
    perm = np.random.default_rng(seed).permutation(n)
    return np.array_split(perm, folds)


@dataclass
class CvReport:
    mean: float
    std: float
    per_fold: list[float]


def k_fold_cv(data: ObservationSet, learner: Callable, folds: int = 10, seed=None) -> CvReport:
    """Train on all folds but one and test on the held-out fold, in turn.

    Raises
    ------
    LearnerFailure
        Wrapping any exception from the learner, with the fold index.
    """
    parts = fold_indices(data.n_rows, folds, seed)
    accs = []
    for i, test in enumerate(parts):
        train = np.concatenate([p for j, p in enumerate(parts) if j != i])
        accs.append(_train_and_score(data, learner, np.sort(train), test, fold=i))
    mean, std = mean_std(accs)
    return CvReport(mean, std, accs)


def _train_and_score(data, learner, train_rows, test_rows, fold=None):
    test = data.subset(test_rows)
    try:
        predict = learner(data.subset(train_rows))
        pred = np.asarray(predict(test.features))
    except Exception as exc:
        raise LearnerFailure(f"learner failed on fold {fold}: {exc}", fold=fold) from exc
    return float(np.mean(pred == test.classes))


@dataclass
class TrialReport:
    mean: float
    std: float
    accuracies: list[float]
    mappings: list[tuple[int, ...]]
    groups: list[np.ndarray]
    single_trial: bool = False
    extras: list = field(default_factory=list)


def repeated_trials(data: ObservationSet, gold, learner: Callable, k: int, trials: int = 25,
                    base_seed: int = 0) -> TrialReport:
    """Run ``learner(data, seed)`` for ``trials`` consecutive seeds.

    The learner returns group labels, or a ``(groups, extra)`` pair whose
    extra is kept in the report. With one trial the deviation is reported
    as 0 and ``single_trial`` is set.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    accs, maps, groups_all, extras = [], [], [], []
    for t in range(trials):
        seed = base_seed + t
        try:
            out = learner(data, seed)
        except Exception as exc:
            raise LearnerFailure(f"learner failed on trial {t}: {exc}", trial=t) from exc
        extra = None
        if isinstance(out, tuple):
            out, extra = out
        groups = np.asarray(out, dtype=np.int64)
        acc, mapping = best_mapping_accuracy(groups, gold, k)
        accs.append(acc)
        maps.append(mapping)
        groups_all.append(groups)
        extras.append(extra)
    mean, std = mean_std(accs)
    return TrialReport(mean, std, accs, maps, groups_all, trials == 1, extras)


def learning_curve_sizes(limit: int) -> list[int]:
    """10, 50, 100, then steps of 100, up to ``limit``."""
    sizes = [m for m in (10, 50, 100) if m <= limit]
    m = 200
    while m <= limit:
        sizes.append(m)
        m += 100
    return sizes


@dataclass
class CurvePoint:
    size: int
    mean: float
    std: float
    per_fold: list[float]


def learning_curve(data: ObservationSet, sizes, learner: Callable, folds: int = 10,
                   seed=None) -> list[CurvePoint]:
    """Accuracy as a function of training size.

    For each size ``m`` and each fold, ``m`` rows are drawn without
    replacement from the other folds, the learner is trained on them and
    tested on the fold.

    Raises
    ------
    SizeTooLarge
        If some ``m`` exceeds the smallest training portion.
    """
    parts = fold_indices(data.n_rows, folds, seed)
    pool = data.n_rows - max(len(p) for p in parts)
    sizes = [int(m) for m in sizes]
    too_big = [m for m in sizes if m > pool or m < 1]
    if too_big:
        raise SizeTooLarge(f"training sizes {too_big} do not fit a training portion of {pool}")
    rng = np.random.default_rng(None if seed is None else [seed, 1])
    curve = []
    for m in sizes:
        accs = []
        for i, test in enumerate(parts):
            train = np.concatenate([p for j, p in enumerate(parts) if j != i])
            chosen = np.sort(rng.choice(np.sort(train), size=m, replace=False))
            accs.append(_train_and_score(data, learner, chosen, test, fold=i))
        mean, std = mean_std(accs)
        curve.append(CurvePoint(m, mean, std, accs))
    return curve


def majority_learner(data: ObservationSet):
    """Predicts the most frequent training class everywhere."""
    counts = np.bincount(data.classes, minlength=data.schema.class_cardinality)
    label = int(np.argmax(counts))
    return lambda X: np.full(len(X), label, dtype=np.int64)


def naive_bayes_learner(smoothing: float = 0.0):
    """Naive Bayes; feature vectors with no support get the training majority."""
    def train(data: ObservationSet):
        params = nb.fit(data, smoothing)
        fallback = int(np.argmax(params.class_prior))

        def predict(X):
            X = np.asarray(X, dtype=np.int64)
            joint = nb.joint_matrix(params, X)
            pred = np.argmax(joint, axis=1)
            pred[joint.sum(axis=1) <= 0] = fallback
            return pred
        return predict
    return train
