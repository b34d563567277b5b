"""Exception hierarchy.

Errors are grouped so the command line can map them onto exit codes:
``DataError`` subclasses describe bad input files or inconsistent data,
``BudgetExceeded`` subclasses describe runs aborted by a resource guard, and
``UsageError`` subclasses describe invalid parameters.
"""


class FlipmineError(Exception):
    """Base class for every error raised by this package."""


class UsageError(FlipmineError, ValueError):
    """Invalid parameters supplied by the caller."""


class DataError(FlipmineError, ValueError):
    """Malformed or inconsistent input data."""


# taxonomy

class TaxonomyError(DataError):
    pass


class EmptyInput(TaxonomyError):
    pass


class CycleDetected(TaxonomyError):
    pass


class MultipleParents(TaxonomyError):
    pass


class DisconnectedNode(TaxonomyError):
    pass


class LevelOutOfRange(FlipmineError, IndexError):
    def __init__(self, h, low, high):
        super().__init__(f"level {h} outside [{low}, {high}]")
        self.h = h


# transactions

class _LineError(DataError):
    def __init__(self, label, line):
        super().__init__(f"{self._what}: {label!r} (line {line})")
        self.label = label
        self.line = line


class UnknownItem(_LineError):
    _what = "unknown item"


class NotALeaf(_LineError):
    _what = "item is an internal taxonomy node"


class ItemLevelMismatch(DataError):
    pass


class LevelMismatch(DataError):
    pass


class ColumnMismatch(DataError):
    pass


# measures

class ZeroItemSupport(DataError):
    pass


class SupExceedsItemSup(DataError):
    pass


class ZeroN(DataError):
    pass


# datagen

class InvalidParams(UsageError):
    pass


class UnknownProfile(UsageError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


# budgets

class BudgetExceeded(FlipmineError, RuntimeError):
    def __init__(self, limit, what="candidates"):
        super().__init__(f"{what} budget of {limit} exceeded")
        self.limit = limit


class CandidateBudgetExceeded(BudgetExceeded):
    pass


class MismatchedOutputs(FlipmineError, RuntimeError):
    pass
