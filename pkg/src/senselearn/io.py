"""Reading and writing observation files.

Files are UTF-8 CSV with a header row. Every column is categorical. When
all values of a column are integers its levels are numbered in numeric
order, otherwise in order of first appearance. In the class column ``?`` marks
an unobserved value. A gold column, when named, is pulled out and returned
separately so that unsupervised learners never see it.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParseError, RaggedRow, UnknownColumn
from .events import MISSING, FeatureSchema, ObservationSet

MISSING_MARK = "?"


@dataclass
class Dataset:
    data: ObservationSet
    gold: np.ndarray | None = None
    gold_levels: tuple[str, ...] | None = None


def _level_codes(cells) -> dict[str, int]:
    seen = list(dict.fromkeys(cells))
    try:
        seen = sorted(seen, key=int)
    except ValueError:
        pass
    return {c: i for i, c in enumerate(seen)}


def load_dataset(path, class_col: str | None = None, gold_col: str | None = None,
                 k: int | None = None) -> Dataset:
    """Read a CSV file into an :class:`ObservationSet`.

    ``k`` widens the class cardinality beyond the observed levels (needed
    for fully unlabeled files).

    Raises
    ------
    ParseError
        For an empty file, a blank header name or ``?`` outside the class column.
    RaggedRow
        When a row has the wrong number of fields.
    UnknownColumn
        When ``class_col`` or ``gold_col`` is not in the header.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path}: not valid UTF-8") from exc
    rows = list(csv.reader(text.splitlines()))
    if not rows or not any(h.strip() for h in rows[0]):
        raise ParseError(f"{path}: missing header", line=1)
    header = [h.strip() for h in rows[0]]
    for j, h in enumerate(header):
        if not h:
            raise ParseError(f"{path}: empty column name", line=1, column=j + 1)
    for name in (class_col, gold_col):
        if name is not None and name not in header:
            raise UnknownColumn(f"{path}: no column named {name!r}")
    width = len(header)
    body = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != width:
            raise RaggedRow(f"{path}: line {lineno} has {len(row)} fields, expected {width}")
        body.append([c.strip() for c in row])
    if not body:
        raise ParseError(f"{path}: no data rows", line=2)

    gold_idx = header.index(gold_col) if gold_col is not None else None
    keep = [j for j in range(width) if j != gold_idx]
    names = [header[j] for j in keep]
    class_index = names.index(class_col) if class_col is not None else None

    values = np.empty((len(body), len(keep)), dtype=np.int64)
    levels = []
    for out_j, j in enumerate(keep):
        is_class = out_j == class_index
        for i, row in enumerate(body):
            if row[j] == MISSING_MARK and not is_class:
                raise ParseError(f"{path}: '?' outside the class column", line=i + 2, column=j + 1)
        lookup = _level_codes(row[j] for row in body if row[j] != MISSING_MARK)
        for i, row in enumerate(body):
            values[i, out_j] = MISSING if row[j] == MISSING_MARK else lookup[row[j]]
        levels.append(tuple(lookup))
    cards = [max(len(lv), 1) for lv in levels]
    if class_index is not None and k is not None:
        cards[class_index] = max(cards[class_index], k)
    schema = FeatureSchema(tuple(names), tuple(cards), class_index, tuple(levels))
    if class_index is not None and k is not None:
        schema = schema.with_class_cardinality(cards[class_index])
    data = ObservationSet(schema, values)

    gold = gold_levels = None
    if gold_idx is not None:
        lookup = _level_codes(row[gold_idx] for row in body)
        gold = np.array([lookup[row[gold_idx]] for row in body], dtype=np.int64)
        gold_levels = tuple(lookup)
    return Dataset(data, gold, gold_levels)


def save_dataset(path, data: ObservationSet, gold=None, gold_col: str = "gold",
                 gold_levels=None) -> None:
    """Write ``data`` in the format read by :func:`load_dataset`.

    Without stored level labels, levels are written as 1-based integers.
    """
    schema = data.schema
    levels = schema.levels
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        header = list(schema.names) + ([gold_col] if gold is not None else [])
        w.writerow(header)
        for i, row in enumerate(data.values):
            cells = []
            for j, v in enumerate(row):
                if v == MISSING:
                    cells.append(MISSING_MARK)
                elif levels is not None and v < len(levels[j]):
                    cells.append(levels[j][v])
                else:
                    cells.append(str(int(v) + 1))
            if gold is not None:
                g = int(gold[i])
                cells.append(gold_levels[g] if gold_levels is not None else str(g + 1))
            w.writerow(cells)
