"""Decomposable log-linear models and sequential model selection.

A model is an undirected chordal graph over the variables of a schema.
Its maximum likelihood joint is the product of clique marginals divided by
the product of separator marginals, so fitting needs nothing beyond
marginal counts. Forward and backward searches move one edge at a time,
scoring each step with AIC, BIC or a chi-squared test on the change in G².
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np
from scipy.special import gammaincc

from .errors import (
    MissingValue,
    NotChordal,
    ParseError,
    SchemaError,
    ZeroEvidence,
    ZeroExpectedNonzeroObserved,
)
from .events import ObservationSet, marginal_counts

FORWARD = "forward"
BACKWARD = "backward"
AIC = "aic"
BIC = "bic"
CHI2 = "chi2"
DOF_KINDS = ("adjusted", "unadjusted", "edges", "fitted_cells")


def _edge(a: int, b: int) -> tuple[int, int]:
    if a == b:
        raise SchemaError(f"self-loop on variable {a}")
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class ModelGraph:
    """Undirected graph over a subset of schema variables.

    ``names`` lists every variable of the schema; ``variables`` holds the
    column indices the model covers (all of them unless stated).
    """

    names: tuple[str, ...]
    edges: frozenset = frozenset()
    variables: frozenset | None = None

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        vars_ = frozenset(range(len(self.names))) if self.variables is None else frozenset(self.variables)
        if any(not 0 <= v < len(self.names) for v in vars_):
            raise SchemaError("model variable out of range")
        edges = frozenset(_edge(int(a), int(b)) for a, b in self.edges)
        if any(a not in vars_ or b not in vars_ for a, b in edges):
            raise SchemaError("edge references a variable outside the model")
        object.__setattr__(self, "variables", vars_)
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_cliques(cls, names, cliques: Iterable[Iterable[int]], variables=None) -> "ModelGraph":
        cliques = [tuple(c) for c in cliques]
        edges = {_edge(a, b) for c in cliques for a, b in combinations(c, 2)}
        if variables is None:
            variables = {v for c in cliques for v in c} or None
        return cls(tuple(names), frozenset(edges), variables)

    @classmethod
    def independence(cls, names, variables=None) -> "ModelGraph":
        return cls(tuple(names), frozenset(), variables)

    @classmethod
    def saturated(cls, names, variables=None) -> "ModelGraph":
        vs = sorted(range(len(names)) if variables is None else variables)
        return cls(tuple(names), frozenset(combinations(vs, 2)), frozenset(vs))

    def neighbors(self, v: int) -> set[int]:
        return {b if a == v else a for a, b in self.edges if v in (a, b)}

    def adjacency(self) -> dict[int, set[int]]:
        adj = {v: set() for v in self.variables}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def with_edge(self, a, b) -> "ModelGraph":
        return ModelGraph(self.names, self.edges | {_edge(a, b)}, self.variables)

    def without_edge(self, a, b) -> "ModelGraph":
        return ModelGraph(self.names, self.edges - {_edge(a, b)}, self.variables)

    def induced(self, variables) -> "ModelGraph":
        vs = frozenset(variables)
        return ModelGraph(self.names, frozenset(e for e in self.edges if e[0] in vs and e[1] in vs), vs)


def mcs_order(g: ModelGraph) -> list[int]:
    """Maximum cardinality search; ties go to the lowest variable index."""
    adj = g.adjacency()
    weight = {v: 0 for v in adj}
    order = []
    while weight:
        v = min(weight, key=lambda u: (-weight[u], u))
        order.append(v)
        del weight[v]
        for u in adj[v]:
            if u in weight:
                weight[u] += 1
    return order


def is_chordal(g: ModelGraph) -> bool:
    """True iff every cycle of four or more vertices has a chord.

    Uses the fact that a graph is chordal exactly when, in maximum
    cardinality search order, the earlier neighbours of each vertex are
    pairwise adjacent.
    """
    adj = g.adjacency()
    seen: set[int] = set()
    for v in mcs_order(g):
        earlier = adj[v] & seen
        for a, b in combinations(sorted(earlier), 2):
            if b not in adj[a]:
                return False
        seen.add(v)
    return True


def maximal_cliques(g: ModelGraph):
    """Maximal cliques of a chordal graph and their separators.

    Cliques come out in an order with the running intersection property;
    ``separators[j]`` is clique ``j`` intersected with all earlier cliques
    (empty for the first clique and for each new connected component).

    Raises
    ------
    NotChordal
    """
    if not is_chordal(g):
        raise NotChordal("graph has a chordless cycle")
    adj = g.adjacency()
    seen: set[int] = set()
    candidates = []
    for v in mcs_order(g):
        candidates.append(frozenset(adj[v] & seen) | {v})
        seen.add(v)
    cliques = [c for i, c in enumerate(candidates)
               if not any(c < d for d in candidates[i + 1:])]
    separators = []
    covered: frozenset = frozenset()
    for c in cliques:
        separators.append(c & covered)
        covered = covered | c
    return [tuple(sorted(c)) for c in cliques], [tuple(sorted(s)) for s in separators]


@dataclass(frozen=True)
class DecomposableModel:
    graph: ModelGraph
    cliques: tuple[tuple[int, ...], ...]
    separators: tuple[tuple[int, ...], ...]

    @classmethod
    def from_graph(cls, g: ModelGraph) -> "DecomposableModel":
        cliques, seps = maximal_cliques(g)
        return cls(g, tuple(cliques), tuple(seps))

    @classmethod
    def parse(cls, text: str, names) -> "DecomposableModel":
        return cls.from_graph(parse_model(text, names))

    @property
    def names(self):
        return self.graph.names

    @property
    def n_edges(self) -> int:
        return len(self.graph.edges)

    def __str__(self):
        return format_model(self)


_TOKEN = re.compile(r"\[([^\[\]()]+)\]|([^\s\[\]()])")


def parse_model(text: str, names: Sequence[str]) -> ModelGraph:
    """Read notation such as ``(AB)(BC)`` or ``([F1][S])([F2][S])``.

    Single-character variable names stand alone; longer names go in
    square brackets. Variables that appear in no clique are left out of
    the model.
    """
    names = tuple(names)
    lookup = {n: i for i, n in enumerate(names)}
    cliques = []
    pos = 0
    s = text.strip()
    while pos < len(s):
        if s[pos].isspace():
            pos += 1
            continue
        if s[pos] != "(":
            raise ParseError(f"expected '(' in model {text!r}", line=1, column=pos + 1)
        end = s.find(")", pos)
        if end < 0:
            raise ParseError(f"unclosed clique in model {text!r}", line=1, column=pos + 1)
        body = s[pos + 1:end]
        members = []
        i = 0
        while i < len(body):
            if body[i].isspace():
                i += 1
                continue
            m = _TOKEN.match(body, i)
            if m is None:
                raise ParseError(f"bad variable in model {text!r}", line=1, column=pos + 2 + i)
            name = m.group(1) or m.group(2)
            if name not in lookup:
                raise ParseError(f"unknown variable {name!r} in model {text!r}", line=1, column=pos + 2 + i)
            members.append(lookup[name])
            i = m.end()
        if not members:
            raise ParseError(f"empty clique in model {text!r}", line=1, column=pos + 1)
        cliques.append(members)
        pos = end + 1
    if not cliques:
        raise ParseError(f"no cliques in model {text!r}", line=1, column=1)
    return ModelGraph.from_cliques(names, cliques)


def _var_label(name: str) -> str:
    return name if len(name) == 1 else f"[{name}]"


def format_model(model) -> str:
    """Clique notation; variables in schema order, cliques sorted."""
    if isinstance(model, ModelGraph):
        model = DecomposableModel.from_graph(model)
    cliques = sorted(model.cliques)
    return "".join("(" + "".join(_var_label(model.names[v]) for v in c) + ")" for c in cliques)


@dataclass
class FitResult:
    joint: np.ndarray
    g_squared: float
    adjusted_dof: int
    model: DecomposableModel


def _require_labeled(data: ObservationSet, variables):
    ci = data.schema.class_index
    if ci is not None and ci in variables and not data.is_fully_labeled:
        raise MissingValue("model fitting needs every class value observed")


def _margin(data, vars_, shape, n):
    """Marginal relative frequencies broadcast to the full event space."""
    full = [1] * len(shape)
    if not vars_:
        return np.ones(full), 1
    counts = marginal_counts(data, list(vars_)).counts
    for v in vars_:
        full[v] = shape[v]
    return counts.reshape(full) / n, int(np.count_nonzero(counts))


def clique_product(data: ObservationSet, cliques, separators) -> np.ndarray:
    """Product of clique marginals over separator marginals, with 0/0 = 0.

    Axes follow the schema; variables outside every clique broadcast
    (size-1 axes expanded to full size).
    """
    shape = tuple(data.schema.cardinalities)
    n = data.n_rows
    num = np.ones(shape)
    den = np.ones(shape)
    for c in cliques:
        num = num * _margin(data, c, shape, n)[0]
    for s in separators:
        den = den * _margin(data, s, shape, n)[0]
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)


def g_squared(observed, joint, n) -> float:
    """``2 * sum f * ln(f / e)`` with ``e = n * joint``; cells with f = 0 drop out.

    Raises
    ------
    ZeroExpectedNonzeroObserved
        If a cell is observed but has zero fitted probability.
    """
    f = np.asarray(getattr(observed, "counts", observed), dtype=float)
    e = n * np.asarray(joint, dtype=float)
    mask = f > 0
    if np.any(e[mask] <= 0):
        raise ZeroExpectedNonzeroObserved("observed event has zero fitted probability")
    return float(2.0 * np.sum(f[mask] * np.log(f[mask] / e[mask])))


def dof(model: DecomposableModel, data: ObservationSet, kind: str = "adjusted") -> int:
    """Degrees of freedom of ``model`` on ``data``.

    ``unadjusted`` counts free parameters from the clique and separator
    table sizes. ``adjusted`` does the same but counts only marginal cells
    with nonzero frequency. ``fitted_cells`` is the number of full events
    with nonzero fitted probability minus one. ``edges`` is the number of
    edges, which as a difference counts the dependencies added or removed.
    """
    if kind == "edges":
        return model.n_edges
    cards = data.schema.cardinalities
    if kind == "fitted_cells":
        joint = clique_product(data, model.cliques, model.separators)
        return int(np.count_nonzero(joint)) - 1
    if kind not in ("adjusted", "unadjusted"):
        raise ValueError(f"unknown dof kind {kind!r}")
    shape = tuple(cards)

    def cells(vs):
        if not vs:
            return 1
        if kind == "unadjusted":
            return math.prod(cards[v] for v in vs)
        return _margin(data, vs, shape, data.n_rows)[1]

    # the first separator is always empty and supplies the normalization term
    return sum(cells(c) for c in model.cliques) - sum(cells(s) for s in model.separators)


def adjusted_dof(model: DecomposableModel, data: ObservationSet) -> int:
    return dof(model, data, "adjusted")


def fit(model: DecomposableModel, data: ObservationSet, dof_kind: str = "adjusted") -> FitResult:
    """Maximum likelihood joint of ``model`` with its G² and degrees of freedom."""
    _require_labeled(data, model.graph.variables)
    joint = clique_product(data, model.cliques, model.separators)
    observed = marginal_counts(data, sorted(model.graph.variables)).counts
    if len(model.graph.variables) == data.schema.n_vars:
        g2 = g_squared(observed, joint, data.n_rows)
    else:
        g2 = float("nan")
    return FitResult(joint, g2, dof(model, data, dof_kind), model)


def chi2_upper_tail(x: float, dof_: int) -> float:
    """P(X >= x) for X ~ chi-squared with ``dof_`` degrees of freedom."""
    if dof_ <= 0:
        return 1.0 if abs(x) <= 1e-9 else 0.0
    if x <= 0:
        return 1.0
    return float(gammaincc(dof_ / 2.0, x / 2.0))


def criterion_delta(kind: str, delta_g2: float, delta_dof: int, n=None, alpha: float = 0.0001,
                    direction: str = FORWARD):
    """Score one search step and say whether it is acceptable.

    AIC and BIC return the penalized change in G²; forward steps need a
    positive score and backward steps a negative one. CHI2 returns the
    upper-tail probability of ``delta_g2``: a forward step must be
    significant (below ``alpha``) and a backward step insignificant
    (above ``alpha``).
    """
    if kind == AIC:
        score = delta_g2 - 2.0 * delta_dof
    elif kind == BIC:
        if n is None or n <= 0:
            raise ValueError("BIC needs the sample size")
        score = delta_g2 - math.log(n) * delta_dof
    elif kind == CHI2:
        score = chi2_upper_tail(delta_g2, delta_dof)
        ok = score < alpha if direction == FORWARD else score > alpha
        return score, ok
    else:
        raise ValueError(f"unknown criterion {kind!r}")
    return score, (score > 0 if direction == FORWARD else score < 0)


def candidates(model: DecomposableModel, direction: str) -> list[DecomposableModel]:
    """Decomposable models one edge away, in lexicographic edge order."""
    g = model.graph
    vs = sorted(g.variables)
    out = []
    if direction == FORWARD:
        for a, b in combinations(vs, 2):
            if (a, b) not in g.edges:
                h = g.with_edge(a, b)
                if is_chordal(h):
                    out.append(DecomposableModel.from_graph(h))
    elif direction == BACKWARD:
        for e in sorted(g.edges):
            h = g.without_edge(*e)
            if is_chordal(h):
                out.append(DecomposableModel.from_graph(h))
    else:
        raise ValueError(f"unknown direction {direction!r}")
    return out


@dataclass
class StepScore:
    candidate: DecomposableModel
    g_squared: float
    delta_g2: float
    delta_dof: int
    score: float
    acceptable: bool


@dataclass
class SelectionResult:
    sequence: list[DecomposableModel]
    selected: DecomposableModel
    steps: list[list[StepScore]] = field(default_factory=list)

    @property
    def sequence_strings(self) -> list[str]:
        return [format_model(m) for m in self.sequence]


def _better(kind, direction, a: float, b: float) -> bool:
    if kind == CHI2:
        return a < b if direction == FORWARD else a > b
    return a > b if direction == FORWARD else a < b


def sequential_select(data: ObservationSet, direction: str = FORWARD, criterion: str = AIC,
                      alpha: float = 0.0001, dof_kind: str = "adjusted",
                      max_steps: int | None = None) -> SelectionResult:
    """Greedy one-edge-at-a-time search over decomposable models.

    Forward search starts from independence and backward search from the
    saturated model. Each step scores every candidate against the current
    model and moves to the best acceptable one; ties keep the earlier
    candidate. The search stops when no candidate is acceptable.
    """
    names = data.schema.names
    if not data.is_fully_labeled and data.schema.class_index is not None:
        raise MissingValue("model selection needs every class value observed")
    start = ModelGraph.independence(names) if direction == FORWARD else ModelGraph.saturated(names)
    current = DecomposableModel.from_graph(start)
    cache: dict[frozenset, tuple[float, int]] = {}

    def stats(m: DecomposableModel):
        key = m.graph.edges
        if key not in cache:
            r = fit(m, data, dof_kind)
            cache[key] = (r.g_squared, r.adjusted_dof)
        return cache[key]

    sequence = [current]
    steps = []
    n = data.n_rows
    while max_steps is None or len(steps) < max_steps:
        g_cur, d_cur = stats(current)
        scored = []
        for cand in candidates(current, direction):
            g_c, d_c = stats(cand)
            if direction == FORWARD:
                dg, dd = g_cur - g_c, d_c - d_cur
            else:
                dg, dd = g_c - g_cur, d_cur - d_c
            score, ok = criterion_delta(criterion, dg, dd, n, alpha, direction)
            scored.append(StepScore(cand, g_c, dg, dd, score, ok))
        if not scored:
            break
        steps.append(scored)
        best = None
        for s in scored:
            if s.acceptable and (best is None or _better(criterion, direction, s.score, best.score)):
                best = s
        if best is None:
            break
        current = best.candidate
        sequence.append(current)
    return SelectionResult(sequence, current, steps)


def class_cliques(model: DecomposableModel, class_index: int) -> DecomposableModel:
    """The model restricted to the cliques that contain the class variable."""
    keep = [c for c in model.cliques if class_index in c]
    if not keep:
        raise SchemaError("class variable is not part of the model")
    vs = {v for c in keep for v in c}
    return DecomposableModel.from_graph(model.graph.induced(vs))


def naive_mix(sequence: Sequence[DecomposableModel], data: ObservationSet) -> np.ndarray:
    """Cellwise average of the class-clique fits of every model in ``sequence``.

    Variables outside a model's class cliques do not affect its
    classifications; they are given a uniform distribution so that every
    model contributes a table summing to one.
    """
    if not sequence:
        raise ValueError("naive mix needs at least one model")
    ci = data.schema.class_index
    if ci is None:
        raise SchemaError("naive mix needs a class variable")
    _require_labeled(data, {ci})
    total = np.zeros(tuple(data.schema.cardinalities))
    for m in sequence:
        sub = class_cliques(m, ci)
        kept = {v for c in sub.cliques for v in c}
        spread = math.prod(n for v, n in enumerate(data.schema.cardinalities) if v not in kept)
        total = total + clique_product(data, sub.cliques, sub.separators) / spread
    return total / len(sequence)


def _class_slice(joint: np.ndarray, fv, class_index: int) -> np.ndarray:
    idx = list(int(v) for v in fv)
    idx.insert(class_index, slice(None))
    return joint[tuple(idx)]


def classify_joint(joint: np.ndarray, fv, class_index: int) -> int:
    """Most probable class given feature values ``fv`` (in feature order).

    Raises
    ------
    ZeroEvidence
        If every class has zero probability for ``fv``.
    """
    row = _class_slice(joint, fv, class_index)
    if not np.any(row > 0):
        raise ZeroEvidence(f"no support for feature vector {tuple(int(v) for v in fv)}")
    return int(np.argmax(row))


def classify_joint_many(joint: np.ndarray, X, class_index: int, fallback: int | None = None) -> np.ndarray:
    """Classify each row of ``X``; unsupported rows get ``fallback`` if given."""
    X = np.asarray(X, dtype=np.int64)
    moved = np.moveaxis(joint, class_index, -1)
    rows = moved[tuple(X.T)]
    pred = np.argmax(rows, axis=1)
    bad = ~np.any(rows > 0, axis=1)
    if bad.any():
        if fallback is None:
            raise ZeroEvidence("no support for some feature vectors", rows=np.flatnonzero(bad))
        pred[bad] = fallback
    return pred


def _majority(data: ObservationSet) -> int:
    return int(np.argmax(np.bincount(data.classes, minlength=data.schema.class_cardinality)))


def selection_learner(direction: str = FORWARD, criterion: str = AIC, alpha: float = 0.0001,
                      dof_kind: str = "adjusted", mix: bool = False):
    """Supervised learner: select a model, then classify with its joint
    (or with the Naive Mix of the whole search sequence).

    Feature vectors without support fall back to the training majority.
    """
    def train(data: ObservationSet):
        result = sequential_select(data, direction, criterion, alpha, dof_kind)
        ci = data.schema.class_index
        if mix:
            joint = naive_mix(result.sequence, data)
        else:
            joint = fit(result.selected, data, dof_kind).joint
        fallback = _majority(data)
        predict = lambda X: classify_joint_many(joint, X, ci, fallback)
        predict.model = result.selected
        predict.sequence = result.sequence
        return predict
    return train
