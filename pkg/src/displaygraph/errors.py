"""Exception types raised across the package."""


class DisplayGraphError(Exception):
    """Base class for all package errors."""


class PreconditionError(DisplayGraphError, ValueError):
    pass


class TaxonMismatch(DisplayGraphError, ValueError):
    pass


class DegreeViolation(DisplayGraphError, ValueError):
    pass


class DuplicateTaxon(DisplayGraphError, ValueError):
    pass


class Disconnected(DisplayGraphError, ValueError):
    pass


class NotATree(DisplayGraphError, ValueError):
    pass


class NotSimple(DisplayGraphError, ValueError):
    pass


class NotCubic(DisplayGraphError, ValueError):
    pass


class TaxonMissing(DisplayGraphError, ValueError):
    pass


class TooFewTaxa(DisplayGraphError, ValueError):
    pass


class InvalidParams(DisplayGraphError, ValueError):
    pass


class InvalidCertificate(DisplayGraphError, ValueError):
    pass


class InvalidDecomposition(DisplayGraphError, ValueError):
    pass


class InvalidPartition(DisplayGraphError, ValueError):
    pass


class ParseError(DisplayGraphError, ValueError):
    """Malformed input text. ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NewickSyntaxError(ParseError):
    def __init__(self, message, offset):
        self.offset = offset
        super().__init__(f"offset {offset}: {message}")


class FormatIndexError(ParseError, IndexError):
    """A vertex or bag index outside the declared range."""


class BudgetExceeded(DisplayGraphError):
    """Exact treewidth gave up; ``lb``/``ub`` bracket the true value."""

    def __init__(self, message, lb, ub, decomposition=None):
        self.lb = lb
        self.ub = ub
        self.decomposition = decomposition
        super().__init__(f"{message} (lb={lb}, ub={ub})")


class LimitExceeded(DisplayGraphError):
    """A search hit its node budget before reaching a verdict."""

    def __init__(self, message, stats=None):
        self.stats = dict(stats or {})
        super().__init__(message)
