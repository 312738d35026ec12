"""Exception hierarchy.

Every error carries an ``exit_code`` so the command line front end can map
failures onto process exit statuses without a lookup table.
"""


class SenseLearnError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class DataError(SenseLearnError):
    """Malformed or inconsistent input data."""

    exit_code = 3


class NumericalError(SenseLearnError):
    """A computation could not produce a meaningful number."""

    exit_code = 4


class SchemaError(DataError):
    pass


class MissingValue(DataError):
    pass


class NotSubset(DataError):
    pass


class InconsistentCounts(DataError):
    pass


class ShapeMismatch(DataError):
    pass


class LengthMismatch(DataError):
    pass


class UnknownColumn(DataError):
    pass


class RaggedRow(DataError):
    pass


class ParseError(DataError):
    """Input file could not be parsed; ``line`` and ``column`` are 1-based."""

    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + loc)
        self.line = line
        self.column = column


class InvalidK(DataError):
    pass


class KTooLarge(DataError):
    pass


class SizeTooLarge(DataError):
    pass


class NotChordal(DataError):
    pass


class DegenerateClass(NumericalError):
    pass


class ZeroEvidence(NumericalError):
    """All classes have zero joint probability for some feature vector.

    ``rows`` holds the offending row indices when known.
    """

    def __init__(self, message, rows=None):
        if rows is not None and len(rows):
            shown = ", ".join(str(int(r)) for r in list(rows)[:10])
            more = "" if len(rows) <= 10 else f", ... ({len(rows)} rows)"
            message = f"{message} [rows {shown}{more}]"
        super().__init__(message)
        self.rows = None if rows is None else [int(r) for r in rows]


class ChainTooShort(NumericalError):
    pass


class EmptyChain(NumericalError):
    pass


class NotConverged(NumericalError):
    pass


class LearnerFailure(SenseLearnError):
    """A learner raised inside an evaluation loop; ``fold`` or ``trial`` says where."""

    def __init__(self, message, fold=None, trial=None):
        super().__init__(message)
        self.fold = fold
        self.trial = trial


class ZeroExpectedNonzeroObserved(NumericalError):
    pass
