"""Discrete observations and marginal frequency counts.

Every learner in the package consumes an :class:`ObservationSet`: a dense
integer matrix whose columns are discrete variables with 0-based levels. At
most one column is the class variable; in that column, and only there, the
value :data:`MISSING` marks an unobserved class.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import MissingValue, NotSubset, SchemaError

MISSING = -1


@dataclass(frozen=True)
class FeatureSchema:
    """Names and level counts for the columns of an observation matrix.

    ``levels`` optionally keeps the original level labels of each column
    (used only when reading and writing files).
    """

    names: tuple[str, ...]
    cardinalities: tuple[int, ...]
    class_index: int | None = None
    levels: tuple[tuple[str, ...], ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(str(n) for n in self.names))
        object.__setattr__(self, "cardinalities", tuple(int(c) for c in self.cardinalities))
        if len(self.names) != len(self.cardinalities):
            raise SchemaError("names and cardinalities differ in length")
        if len(set(self.names)) != len(self.names):
            raise SchemaError(f"duplicate variable names in {self.names}")
        if any(c < 1 for c in self.cardinalities):
            raise SchemaError(f"every variable needs at least one level: {self.cardinalities}")
        if self.class_index is not None and not 0 <= self.class_index < len(self.names):
            raise SchemaError(f"class_index {self.class_index} out of range")

    @property
    def n_vars(self) -> int:
        return len(self.names)

    @property
    def class_name(self) -> str | None:
        return None if self.class_index is None else self.names[self.class_index]

    @property
    def class_cardinality(self) -> int | None:
        return None if self.class_index is None else self.cardinalities[self.class_index]

    @property
    def feature_indices(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n_vars) if i != self.class_index)

    @property
    def feature_names(self) -> tuple[str, ...]:
        return tuple(self.names[i] for i in self.feature_indices)

    @property
    def feature_cardinalities(self) -> tuple[int, ...]:
        return tuple(self.cardinalities[i] for i in self.feature_indices)

    def index(self, var) -> int:
        """Column index of ``var``, given either a name or an index."""
        if isinstance(var, (int, np.integer)):
            if not 0 <= var < self.n_vars:
                raise SchemaError(f"variable index {var} out of range")
            return int(var)
        try:
            return self.names.index(var)
        except ValueError:
            raise SchemaError(f"unknown variable {var!r}") from None

    def with_class_cardinality(self, k: int) -> "FeatureSchema":
        if self.class_index is None:
            raise SchemaError("schema has no class column")
        cards = list(self.cardinalities)
        cards[self.class_index] = int(k)
        levels = self.levels
        if levels is not None:
            levels = list(levels)
            cur = levels[self.class_index]
            if len(cur) < k:
                taken = set(cur)
                extra = [str(i + 1) for i in range(k) if str(i + 1) not in taken]
                levels[self.class_index] = tuple(cur) + tuple(extra[: k - len(cur)])
            levels = tuple(levels)
        return FeatureSchema(self.names, tuple(cards), self.class_index, levels)


class ObservationSet:
    """Immutable matrix of discrete observations.

    Parameters
    ----------
    schema : FeatureSchema
    values : array_like of int, shape (N, n_vars)
        0-based levels. The class column may hold ``MISSING``.
    """

    def __init__(self, schema: FeatureSchema, values):
        arr = np.array(values, dtype=np.int64, copy=True)
        if arr.ndim != 2 or arr.shape[1] != schema.n_vars:
            raise SchemaError(
                f"expected a matrix with {schema.n_vars} columns, got shape {arr.shape}"
            )
        if arr.shape[0] < 1:
            raise SchemaError("an observation set needs at least one row")
        for j, card in enumerate(schema.cardinalities):
            col = arr[:, j]
            if j == schema.class_index:
                bad = (col != MISSING) & ((col < 0) | (col >= card))
            else:
                if np.any(col == MISSING):
                    raise MissingValue(f"missing value in feature column {schema.names[j]!r}")
                bad = (col < 0) | (col >= card)
            if np.any(bad):
                row = int(np.flatnonzero(bad)[0])
                raise SchemaError(
                    f"value {col[row]} out of range for {schema.names[j]!r} "
                    f"(cardinality {card}) at row {row}"
                )
        arr.setflags(write=False)
        self._schema = schema
        self._values = arr

    @classmethod
    def from_rows(cls, rows, cardinalities=None, names=None, class_index=None):
        """Build a set from plain rows, inferring cardinalities when omitted."""
        arr = np.asarray(rows, dtype=np.int64)
        if arr.ndim != 2:
            raise SchemaError("rows must form a 2-d table")
        n_vars = arr.shape[1]
        if names is None:
            names = tuple(f"F{i + 1}" for i in range(n_vars))
            if class_index is not None:
                names = tuple("S" if i == class_index else f"F{i + 1}" for i in range(n_vars))
        if cardinalities is None:
            cardinalities = tuple(max(int(arr[:, j].max()) + 1, 1) for j in range(n_vars))
        return cls(FeatureSchema(tuple(names), tuple(cardinalities), class_index), arr)

    @property
    def schema(self) -> FeatureSchema:
        return self._schema

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def n_rows(self) -> int:
        return self._values.shape[0]

    def __len__(self):
        return self.n_rows

    @property
    def features(self) -> np.ndarray:
        """Feature columns only, shape (N, n_features)."""
        return self._values[:, list(self._schema.feature_indices)]

    @property
    def feature_cardinalities(self) -> tuple[int, ...]:
        return self._schema.feature_cardinalities

    @property
    def classes(self) -> np.ndarray | None:
        ci = self._schema.class_index
        return None if ci is None else self._values[:, ci]

    @property
    def is_fully_labeled(self) -> bool:
        c = self.classes
        return c is not None and not np.any(c == MISSING)

    @property
    def is_fully_unlabeled(self) -> bool:
        c = self.classes
        return c is None or bool(np.all(c == MISSING))

    def with_classes(self, classes, k: int | None = None) -> "ObservationSet":
        """Copy with the class column replaced; ``k`` resets the class cardinality.

        A set without a class column gains one, appended last and named ``S``.
        """
        classes = np.asarray(classes, dtype=np.int64)
        if classes.shape != (self.n_rows,):
            raise SchemaError("one class value per row is required")
        schema = self._schema
        values = self._values
        if schema.class_index is None:
            name = "S"
            while name in schema.names:
                name += "_"
            levels = schema.levels + ((),) if schema.levels is not None else None
            schema = FeatureSchema(
                schema.names + (name,), schema.cardinalities + (1,), schema.n_vars, levels
            )
            values = np.column_stack([values, np.zeros(self.n_rows, dtype=np.int64)])
        if k is None:
            observed = classes[classes != MISSING]
            k = max(schema.class_cardinality, int(observed.max()) + 1 if observed.size else 1)
        schema = schema.with_class_cardinality(k)
        values = np.array(values)
        values[:, schema.class_index] = classes
        return ObservationSet(schema, values)

    def without_class(self) -> "ObservationSet":
        """Copy holding only the feature columns."""
        sch = self._schema
        if sch.class_index is None:
            return self
        keep = list(sch.feature_indices)
        levels = None if sch.levels is None else tuple(sch.levels[i] for i in keep)
        schema = FeatureSchema(sch.feature_names, sch.feature_cardinalities, None, levels)
        return ObservationSet(schema, self._values[:, keep])

    def subset(self, rows) -> "ObservationSet":
        return ObservationSet(self._schema, self._values[np.asarray(rows, dtype=np.int64)])

    def __eq__(self, other):
        if not isinstance(other, ObservationSet):
            return NotImplemented
        return self._schema == other._schema and np.array_equal(self._values, other._values)

    __hash__ = None

    def __repr__(self):
        labeled = (
            "labeled" if self.is_fully_labeled
            else "unlabeled" if self.is_fully_unlabeled else "partially labeled"
        )
        return f"ObservationSet(N={self.n_rows}, vars={self._schema.names}, {labeled})"


@dataclass(frozen=True, eq=False)
class MarginalCounts:
    """Frequency table over an ordered subset of variables.

    ``counts`` has one axis per entry of ``variables`` (column indices in the
    source schema), in that order.
    """

    variables: tuple[int, ...]
    counts: np.ndarray
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        counts = np.asarray(self.counts)
        if counts.ndim != len(self.variables):
            raise SchemaError("one count axis per variable is required")
        if np.any(counts < 0):
            raise SchemaError("counts must be nonnegative")
        counts = counts.copy()
        counts.setflags(write=False)
        object.__setattr__(self, "variables", tuple(int(v) for v in self.variables))
        object.__setattr__(self, "counts", counts)

    @property
    def total(self):
        return self.counts.sum()

    def __eq__(self, other):
        if not isinstance(other, MarginalCounts):
            return NotImplemented
        return self.variables == other.variables and np.array_equal(self.counts, other.counts)

    __hash__ = None


def _resolve(schema: FeatureSchema, variables) -> tuple[int, ...]:
    if isinstance(variables, (str, int, np.integer)):
        variables = [variables]
    idx = tuple(schema.index(v) for v in variables)
    if len(set(idx)) != len(idx):
        raise SchemaError(f"repeated variable in {variables}")
    return idx


def marginal_counts(data: ObservationSet, variables) -> MarginalCounts:
    """Count rows per joint level of ``variables``.

    Raises
    ------
    MissingValue
        If the class variable is requested while some class entry is missing.
    """
    schema = data.schema
    idx = _resolve(schema, variables)
    if schema.class_index in idx and np.any(data.classes == MISSING):
        raise MissingValue("class variable requested but some rows have no class")
    shape = tuple(schema.cardinalities[i] for i in idx)
    if not idx:
        return MarginalCounts((), np.array(data.n_rows, dtype=np.int64), ())
    flat = np.ravel_multi_index(tuple(data.values[:, i] for i in idx), shape)
    counts = np.bincount(flat, minlength=int(np.prod(shape))).reshape(shape)
    return MarginalCounts(idx, counts, tuple(schema.names[i] for i in idx))


def project(counts: MarginalCounts, variables: Sequence[int] | Sequence[str]) -> MarginalCounts:
    """Marginalize ``counts`` onto ``variables`` (in the order given).

    Variables may be given as column indices or, when ``counts`` carries
    names, as names.
    """
    if isinstance(variables, (str, int, np.integer)):
        variables = [variables]
    idx = []
    for v in variables:
        if isinstance(v, str):
            if counts.names is None or v not in counts.names:
                raise NotSubset(f"{v!r} is not among {counts.names}")
            idx.append(counts.variables[counts.names.index(v)])
        else:
            idx.append(int(v))
    missing = [v for v in idx if v not in counts.variables]
    if missing:
        raise NotSubset(f"variables {missing} not in {counts.variables}")
    drop = tuple(a for a, v in enumerate(counts.variables) if v not in idx)
    reduced = counts.counts.sum(axis=drop) if drop else counts.counts
    kept = [v for v in counts.variables if v in idx]
    perm = [kept.index(v) for v in idx]
    reduced = np.transpose(reduced, perm) if perm else reduced
    names = None
    if counts.names is not None:
        names = tuple(counts.names[counts.variables.index(v)] for v in idx)
    return MarginalCounts(tuple(idx), reduced, names)
