"""Exception types shared across qperm."""


class QpermError(Exception):
    """Base class for all qperm errors."""


class DomainError(QpermError, ValueError):
    """An argument lies outside the domain of an operation."""


class ResourceError(QpermError, RuntimeError):
    """A requested computation exceeds the configured size cap."""


class SingularityError(QpermError, ArithmeticError):
    """An exact matrix that must be inverted is singular."""


class ValidationError(QpermError, ValueError):
    """A structured object (Latin rectangle, model, ...) violates its invariants."""


class InconclusiveError(QpermError, RuntimeError):
    """A numerical rank or eigenvalue count sits too close to its tolerance."""
