"""Small datasets shared across the test modules."""

import numpy as np

from senselearn.events import ObservationSet

# ten observations of two binary features, levels written 1-based
TOY_ROWS_1B = [(1, 2), (1, 2), (2, 2), (2, 2), (1, 2), (1, 1), (1, 1), (1, 1), (1, 2), (2, 2)]
TOY_INIT_1B = [1, 3, 2, 2, 1, 3, 1, 2, 2, 1]
# class imputed for each row during the second sampling sweep
GIBBS_SWEEP2_1B = [2, 3, 2, 2, 3, 3, 3, 3, 2, 2]

# event counts over (A, B, C) in order 000, 001, ..., 111
SELECTION_COUNTS = [0, 1, 5, 12, 0, 3, 2, 1]

SAMPLE_WORDS = [
    ("noun", "verb", "car"),
    ("adjective", "verb", "defeat"),
    ("adverb", "verb", "car"),
    ("noun", "verb", "car"),
]
SAMPLE_MATRIX = [[0, 2, 1, 0], [2, 0, 2, 2], [1, 2, 0, 1], [0, 2, 1, 0]]


def toy_data() -> ObservationSet:
    return ObservationSet.from_rows(np.array(TOY_ROWS_1B) - 1, (2, 2), ("F1", "F2"))


def toy_init():
    return tuple(int(v) - 1 for v in TOY_INIT_1B)


def selection_data() -> ObservationSet:
    rows = []
    for event, count in enumerate(SELECTION_COUNTS):
        rows += [[(event >> 2) & 1, (event >> 1) & 1, event & 1]] * count
    return ObservationSet.from_rows(rows, (2, 2, 2), ("A", "B", "C"), class_index=2)


def sample_word_data() -> ObservationSet:
    cols = list(zip(*SAMPLE_WORDS))
    coded = []
    for col in cols:
        levels = list(dict.fromkeys(col))
        coded.append([levels.index(v) for v in col])
    return ObservationSet.from_rows(np.array(coded).T)


def separable_data(seed=0):
    """40 rows, 3 features; class 0 uses levels {0,1}, class 1 uses {2,3}."""
    rng = np.random.default_rng(seed)
    gold = np.repeat([0, 1], 20)
    X = rng.integers(0, 2, size=(40, 3)) + 2 * gold[:, None]
    return ObservationSet.from_rows(X, (4, 4, 4)), gold


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for r in rows:
            fh.write(",".join(str(v) for v in r) + "\n")
    return path
