"""Verification engine for the calculus of quantum permutation and reflection groups."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DomainError,
    InconclusiveError,
    QpermError,
    ResourceError,
    SingularityError,
    ValidationError,
)
from .partitions import ColoredWord, Partition, enumerate_partitions  # noqa: E402

__all__ = [
    "ColoredWord",
    "DomainError",
    "InconclusiveError",
    "Partition",
    "QpermError",
    "ResourceError",
    "SingularityError",
    "ValidationError",
    "enumerate_partitions",
]
