"""Exception hierarchy shared across the package."""


class QWHashError(Exception):
    """Base class for all errors raised by :mod:`qwhash`."""


class InvalidDimensionError(QWHashError, ValueError):
    """A matrix/vector/graph size is out of range or mismatched."""


class InvalidParameterError(QWHashError, ValueError):
    """A scalar parameter (t, l, scale, ...) is outside its domain."""


class ContractViolationError(QWHashError, ValueError):
    """An input breaks a documented precondition (non-Hermitian, non-unitary, ...)."""


class InvalidInputError(QWHashError, ValueError):
    """User-level input (message, byte strings) is malformed."""


class DegenerateStateError(QWHashError, ArithmeticError):
    """The walk state collapsed to the zero vector and cannot be renormalized."""
