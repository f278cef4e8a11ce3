"""
Exception hierarchy for the binary forms toolkit.

Every domain failure raised by the library derives from BinaryFormError so
the CLI can map it to exit code 1; EncodingError is the one usage-level
failure and maps to exit code 2.
"""

from typing import Any, Optional


class BinaryFormError(ValueError):
    """Base class for all domain errors."""


class EncodingError(BinaryFormError):
    """Malformed text encoding of a form, matrix or rational."""


class AllZeroError(BinaryFormError):
    """A form was built from an all-zero coefficient sequence."""


class SingularMatrixError(BinaryFormError):
    """A transformation matrix has determinant zero."""


class NotSquarefreeError(BinaryFormError):
    """The form has a repeated projective root (discriminant zero)."""


class PrecisionExhaustedError(BinaryFormError):
    """Numeric certification failed within the precision budget."""

    def __init__(self, message: str, precision_bits: Optional[int] = None):
        super().__init__(message)
        self.precision_bits = precision_bits


class DegenerateError(BinaryFormError):
    """Cross ratio requested for points that are not four distinct points."""


class ReducibleError(BinaryFormError):
    """The form factors over the rationals."""


class ClosureViolationError(BinaryFormError):
    """A structure constant of an invariant order came out non-integral."""


class FieldMismatchError(BinaryFormError):
    """Two order presentations live over different field polynomials."""


class DegreeTooSmallError(BinaryFormError):
    """The operation needs a form of higher degree."""


class UnknownPairError(BinaryFormError):
    """Equivalence of a pair could not be decided within the precision ladder."""

    def __init__(self, first: Any, second: Any, precision_bits: Optional[int] = None):
        super().__init__(
            f"equivalence of {first} and {second} undecided at {precision_bits} bits"
        )
        self.first = first
        self.second = second
        self.precision_bits = precision_bits


class CacheError(BinaryFormError):
    """A census cache record could not be read back."""


class ReportValidationError(BinaryFormError):
    """A finished census report failed its consistency checks."""

    def __init__(self, message: str, document: Optional[dict] = None):
        super().__init__(message)
        self.document = document if document is not None else {}
