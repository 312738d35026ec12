"""Gibbs sampling for a Naive Bayes model with an unobserved class.

Each sweep draws a class for every row from its current posterior, then
draws every parameter distribution from its Dirichlet posterior given the
completed sample. After a burn-in the parameter and class chains are
monitored with a two-window mean comparison; once they settle (or the
iteration cap is reached) chain medians summarize the run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import naive_bayes as nb
from .errors import ChainTooShort, EmptyChain, InvalidK, LengthMismatch, ShapeMismatch, ZeroEvidence
from .events import ObservationSet


@dataclass(frozen=True, eq=False)
class DirichletParams:
    alphas: np.ndarray

    def __post_init__(self):
        a = np.array(self.alphas, dtype=float, ndmin=1)
        if a.ndim != 1 or a.size == 0:
            raise ShapeMismatch("alphas must be a nonempty vector")
        if not np.all(a > 0):
            raise ValueError(f"Dirichlet parameters must be positive, got {a}")
        a.setflags(write=False)
        object.__setattr__(self, "alphas", a)

    def __eq__(self, other):
        if not isinstance(other, DirichletParams):
            return NotImplemented
        return np.array_equal(self.alphas, other.alphas)

    __hash__ = None

    @property
    def mean(self) -> np.ndarray:
        return self.alphas / self.alphas.sum()

    def __repr__(self):
        vals = ",".join(f"{a:g}" for a in self.alphas)
        return f"D({vals})"


def posterior_dirichlet(counts, prior: DirichletParams) -> DirichletParams:
    """Conjugate update: add the observed counts to the prior parameters."""
    counts = np.asarray(counts, dtype=float)
    if counts.shape != prior.alphas.shape:
        raise LengthMismatch(f"{counts.shape[0] if counts.ndim else 0} counts for "
                             f"{prior.alphas.size} prior parameters")
    if np.any(counts < 0):
        raise ValueError("counts must be nonnegative")
    return DirichletParams(counts + prior.alphas)


def _log_gamma_draws(alpha: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    # shape < 1 is boosted to shape + 1 and corrected by U**(1/shape) in log space,
    # which keeps tiny shapes from underflowing to zero
    small = alpha < 1
    logg = np.log(rng.gamma(np.where(small, alpha + 1.0, alpha)))
    if small.any():
        logg = np.where(small, logg + np.log(rng.random(alpha.shape)) / alpha, logg)
    return logg


def _normalize_log(logg: np.ndarray) -> np.ndarray:
    e = np.exp(logg - logg.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


def sample_dirichlet(dp: DirichletParams, rng: np.random.Generator) -> np.ndarray:
    """One probability vector drawn from ``dp`` via normalized Gamma variates."""
    return _normalize_log(_log_gamma_draws(dp.alphas, rng))


@dataclass(frozen=True, eq=False)
class NaiveBayesPrior:
    """Dirichlet priors for ``p(S)`` and for every row of each ``p(F_i | S)``."""

    class_prior: DirichletParams
    feature_priors: tuple[DirichletParams, ...]

    @classmethod
    def uniform(cls, k: int, cardinalities: Sequence[int], alpha: float = 1.0):
        return cls(
            DirichletParams(np.full(k, float(alpha))),
            tuple(DirichletParams(np.full(c, float(alpha))) for c in cardinalities),
        )


@dataclass(frozen=True)
class GibbsConfig:
    k: int
    seed: int | None = None
    burn_in: int = 500
    monitor: int = 1000
    increment: int = 500
    max_total: int = 5000
    geweke_window_frac: float = 0.10
    geweke_z_max: float = 2.0
    prior_alpha: float = 1.0
    prior: NaiveBayesPrior | None = None
    init_assignments: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.k < 1:
            raise InvalidK(f"k must be positive, got {self.k}")
        if min(self.burn_in, self.monitor, self.increment) <= 0:
            raise ValueError("burn_in, monitor and increment must be positive")
        if not 0 < self.geweke_window_frac < 0.5:
            raise ValueError("geweke_window_frac must lie in (0, 0.5)")
        if self.max_total < self.burn_in + self.monitor:
            raise ValueError("max_total must cover burn_in + monitor")


@dataclass
class Chains:
    """Post-burn-in samples.

    ``params`` has one column per entry of :meth:`ParameterSet.vector`;
    ``classes`` has one column per row of the data.
    """

    params: np.ndarray
    classes: np.ndarray
    burn_in: int

    @property
    def length(self) -> int:
        return self.params.shape[0]

    @property
    def total_iterations(self) -> int:
        return self.burn_in + self.length


@dataclass
class GibbsResult:
    assignments: np.ndarray
    params: nb.ParameterSet
    chains: Chains
    converged: bool
    checks: list[int] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return self.chains.total_iterations


def _counts(X, assignments, k, cards):
    class_counts = np.bincount(assignments, minlength=k)
    tables = []
    for i, card in enumerate(cards):
        flat = assignments * card + X[:, i]
        tables.append(np.bincount(flat, minlength=k * card).reshape(k, card))
    return class_counts, tables


def dirichlet_posteriors(X, assignments, k: int, prior: NaiveBayesPrior):
    """Posterior Dirichlet for ``p(S)`` and, per feature, one per class row.

    Returns ``(class_posterior, feature_posteriors)`` where
    ``feature_posteriors[i][s]`` is the posterior of ``p(F_i | S=s)``.
    """
    X = np.asarray(X)
    cards = [p.alphas.size for p in prior.feature_priors]
    class_counts, tables = _counts(X, np.asarray(assignments), k, cards)
    class_post = posterior_dirichlet(class_counts, prior.class_prior)
    feat_post = [
        [posterior_dirichlet(tab[s], fp) for s in range(k)]
        for tab, fp in zip(tables, prior.feature_priors)
    ]
    return class_post, feat_post


def _sample_params(X, assignments, k, cards, prior, rng) -> nb.ParameterSet:
    class_counts, tables = _counts(X, assignments, k, cards)
    # one batched Gamma draw per sweep, split back into distributions
    flat = np.concatenate([class_counts + prior.class_prior.alphas]
                          + [(tab + fp.alphas[None, :]).ravel()
                             for tab, fp in zip(tables, prior.feature_priors)])
    logg = _log_gamma_draws(flat, rng)
    prior_draw = _normalize_log(logg[:k])
    conds = []
    pos = k
    for card in cards:
        conds.append(_normalize_log(logg[pos:pos + k * card].reshape(k, card)))
        pos += k * card
    return nb.ParameterSet(prior_draw, tuple(conds), np.zeros(k, dtype=bool))


def stochastic_m_step(data: ObservationSet, assignments, k, prior, rng) -> nb.ParameterSet:
    """Draw a full parameter set from the Dirichlet posteriors."""
    return _sample_params(data.features, np.asarray(assignments), k,
                          data.feature_cardinalities, prior, rng)


def _draw_classes(post_rows: np.ndarray, rng) -> np.ndarray:
    cum = np.cumsum(post_rows, axis=1)
    u = rng.random(post_rows.shape[0])
    return np.minimum((cum < u[:, None] * cum[:, -1:]).sum(axis=1), post_rows.shape[1] - 1)


def stochastic_e_step(params: nb.ParameterSet, data: ObservationSet, rng) -> np.ndarray:
    """Draw each row's class from ``p(S | features)`` independently.

    Raises
    ------
    ZeroEvidence
        If some row has zero probability under every class.
    """
    X = data.features
    uniq, inverse = np.unique(X, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    try:
        post = nb.posterior_matrix(params, uniq)
    except ZeroEvidence as exc:
        rows = np.flatnonzero(np.isin(inverse, exc.rows))
        raise ZeroEvidence("all classes have zero probability", rows=rows) from None
    return _draw_classes(post[inverse], rng)


def geweke_z(chain, window_frac: float = 0.10) -> float:
    """z-score comparing the means of the first and last windows of ``chain``.

    Windows hold ``ceil(window_frac * len(chain))`` values each and their
    variances are treated as independent. Returns 0 when both windows are
    constant and equal, and infinity when they are constant but differ.
    """
    chain = np.asarray(chain, dtype=float)
    if chain.ndim != 1 or chain.size < 20:
        raise ChainTooShort(f"need at least 20 values, got {chain.size}")
    return float(_geweke_columns(chain[:, None], window_frac)[0])


def _geweke_columns(M: np.ndarray, window_frac: float) -> np.ndarray:
    n = M.shape[0]
    w = max(2, math.ceil(window_frac * n))
    a, b = M[:w], M[n - w:]
    diff = a.mean(axis=0) - b.mean(axis=0)
    se2 = a.var(axis=0, ddof=1) / w + b.var(axis=0, ddof=1) / w
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(se2 > 0, diff / np.sqrt(se2), np.where(diff == 0, 0.0, np.inf))
    return z


def geweke_converged(chain, window_frac: float = 0.10, z_max: float = 2.0) -> bool:
    """True when the early and late window means agree within ``z_max``."""
    return abs(geweke_z(chain, window_frac)) <= z_max


def chain_median(chain, discrete: bool | None = None):
    """Median of a chain.

    Integer chains (class labels) use the lower median, so the result is
    always a value that occurred; real chains use the arithmetic median.
    """
    arr = np.asarray(chain)
    if arr.size == 0:
        raise EmptyChain("cannot take the median of an empty chain")
    if discrete is None:
        discrete = np.issubdtype(arr.dtype, np.integer)
    if discrete:
        return np.sort(arr)[(arr.size - 1) // 2].item()
    return float(np.median(arr))


def _summarize_params(param_chain: np.ndarray, k: int, cards) -> nb.ParameterSet:
    med = np.median(param_chain, axis=0)
    ps = nb.ParameterSet.from_vector(med, k, cards)
    prior = ps.class_prior / ps.class_prior.sum()
    conds = tuple(c / c.sum(axis=1, keepdims=True) for c in ps.conditionals)
    return nb.ParameterSet(prior, conds, np.zeros(k, dtype=bool))


def run_gibbs(data: ObservationSet, config: GibbsConfig) -> GibbsResult:
    """Run the sampler with burn-in, monitoring and extension.

    After ``burn_in`` discarded sweeps, ``monitor`` sweeps are recorded and
    every parameter and class chain is checked. If any fails, ``increment``
    more sweeps are appended and all chains are re-checked, up to
    ``max_total`` sweeps overall. Non-convergence is reported through
    ``GibbsResult.converged``; the chains are returned either way.
    """
    X = data.features
    cards = data.feature_cardinalities
    k = config.k
    n = data.n_rows
    prior = config.prior or NaiveBayesPrior.uniform(k, cards, config.prior_alpha)
    if prior.class_prior.alphas.size != k or tuple(p.alphas.size for p in prior.feature_priors) != cards:
        raise ShapeMismatch("prior does not match k and the feature cardinalities")
    rng = np.random.default_rng(config.seed)

    if config.init_assignments is not None:
        assignments = np.asarray(config.init_assignments, dtype=np.int64)
        if assignments.shape != (n,) or assignments.min() < 0 or assignments.max() >= k:
            raise ShapeMismatch("init_assignments must give a class in [0, k) for every row")
    else:
        assignments = rng.integers(0, k, size=n)
    params = _sample_params(X, assignments, k, cards, prior, rng)

    uniq, inverse = np.unique(X, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    n_params = params.vector().size
    capacity = config.max_total - config.burn_in
    param_chain = np.empty((capacity, n_params))
    class_dtype = np.int8 if k <= 127 else np.int32
    class_chain = np.empty((capacity, n), dtype=class_dtype)

    done = 0
    recorded = 0
    target = config.burn_in + config.monitor
    checks = []
    converged = False
    while True:
        while done < target:
            post = nb.posterior_matrix(params, uniq)
            assignments = _draw_classes(post[inverse], rng)
            params = _sample_params(X, assignments, k, cards, prior, rng)
            done += 1
            if done > config.burn_in:
                param_chain[recorded] = params.vector()
                class_chain[recorded] = assignments
                recorded += 1
        checks.append(done)
        ok = np.abs(_geweke_columns(param_chain[:recorded], config.geweke_window_frac)) <= config.geweke_z_max
        ok_c = np.abs(_geweke_columns(class_chain[:recorded].astype(float), config.geweke_window_frac)) <= config.geweke_z_max
        if ok.all() and ok_c.all():
            converged = True
            break
        if done >= config.max_total:
            break
        target = min(done + config.increment, config.max_total)

    chains = Chains(param_chain[:recorded].copy(), class_chain[:recorded].astype(np.int64), config.burn_in)
    final = np.sort(chains.classes, axis=0)[(recorded - 1) // 2]
    summary = _summarize_params(chains.params, k, cards)
    return GibbsResult(final, summary, chains, converged, checks)
