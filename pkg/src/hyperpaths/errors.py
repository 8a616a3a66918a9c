"""Exception types shared across the package."""

from __future__ import annotations


class HyperpathsError(Exception):
    """Base class for all package errors."""


class InvalidPointError(HyperpathsError, ValueError):
    """A point does not belong to the ground space."""


class InvalidSetError(HyperpathsError, ValueError):
    """A finite subset is empty or malformed."""


class DomainError(HyperpathsError, ValueError):
    """A numeric argument lies outside its admissible range."""


class PreconditionError(HyperpathsError, ValueError):
    """An operation was called on inputs violating its contract."""


class CapacityError(HyperpathsError, RuntimeError):
    """An exhaustive search exceeds its enumeration budget."""


class CapViolationError(HyperpathsError, ValueError):
    """An evaluated set has more points than the cardinality cap allows."""


class CapabilityError(HyperpathsError, NotImplementedError):
    """The ground space does not support the requested operation."""
