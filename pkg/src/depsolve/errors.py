"""Exception types shared across the package."""


class DepsolveError(Exception):
    """Base class for all depsolve errors."""


class MalformedDependency(DepsolveError):
    """A dependency references unknown attributes or breaks a structural invariant."""


class SchemaMismatch(DepsolveError):
    """Rule premises do not match the rule schema under the given instantiation."""


class NotIndIa(DepsolveError):
    """Operation requires a set of inclusion dependencies and independence atoms only."""


class NotFdIa(DepsolveError):
    """Operation requires a set of functional dependencies and independence atoms only."""


class NotUnary(DepsolveError):
    """Operation requires unary functional and unary inclusion dependencies."""


class UnsupportedClass(DepsolveError):
    """No complete decision engine exists for the requested dependency class."""


class UnsupportedQuery(DepsolveError):
    """The query dependency is outside the engine's supported class."""


class TooManyAttributes(DepsolveError):
    """Schema exceeds the enumeration limit of an exhaustive construction."""


class CombinatorialBlowup(DepsolveError):
    """A product construction exceeded its configured row cap."""


class EmptyRelation(DepsolveError):
    """Relations must be non-empty sets of tuples."""


class RaggedRow(DepsolveError):
    """A CSV row has a different number of fields than the header."""


class BudgetExceeded(DepsolveError):
    """A bounded search ran out of budget before reaching a definite answer."""

    def __init__(self, message: str, frontier: int = 0):
        super().__init__(message)
        self.frontier = frontier
