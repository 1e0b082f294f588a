"""
Exception classes for the fuzzy limit toolkit.

Provides a hierarchy of exceptions for the different failure scenarios of
construction, parsing, evaluation and limit certification.
"""

from __future__ import annotations

from typing import Any, Iterable, Optional


class FuzzyLimitError(Exception):
    """Base exception for all fuzzy limit errors.

    All other exceptions inherit from this class, allowing catch-all error handling:

        try:
            calculator.limit("1/x", at=singleton)
        except FuzzyLimitError as e:
            print(f"fuzzy limit error: {e}")
    """

    def __init__(self, message: str, details: Optional[dict[str, Any]] = None):
        """Initialize exception with message and optional structured details.

        Args:
            message: Error message
            details: Extra context (offending α, sub-expression, position, ...)
        """
        self.message = message
        self.details = details or {}
        super().__init__(message)

    def __str__(self) -> str:
        """String representation includes details if available."""
        if self.details:
            return f"{self.message} | {self.details}"
        return self.message


# ============================================================================
# Input validation
# ============================================================================


class ValidationError(FuzzyLimitError):
    """Raised when user supplied values cannot form a valid object."""


class InvalidShapeError(ValidationError):
    """Raised when a fuzzy number shape is malformed.

    This occurs when:
    - a triangular number violates a <= b <= c
    - a level stack has no core level (α = 1)
    - an interval has lo > hi
    """


class InvalidValueError(ValidationError):
    """Raised when a numeric input is not finite."""


class AlphaDomainError(ValidationError):
    """Raised when an α-level lies outside (0, 1]."""

    def __init__(self, alpha: float) -> None:
        self.alpha = alpha
        super().__init__(f"alpha level {alpha!r} is outside (0, 1]", {"alpha": alpha})


class InconsistentCutsError(ValidationError):
    """Raised when a stack of α-cuts is not nested.

    Example:
        >>> try:
        ...     reconstruct([(0.5, Interval(0, 1)), (1.0, Interval(2, 3))])
        ... except InconsistentCutsError as e:
        ...     print(e.pairs)
    """

    def __init__(self, message: str, pairs: Iterable[tuple[float, float]] = ()) -> None:
        self.pairs = list(pairs)
        super().__init__(message, {"alpha_pairs": self.pairs[:5]} if self.pairs else None)


class InvalidApproachError(ValidationError):
    """Raised when an approach specification is contradictory."""


class ConfigurationError(FuzzyLimitError):
    """Raised when grid or schedule configuration is invalid.

    Example:
        >>> try:
        ...     LimitConfig(ratio=1.5).validate()
        ... except ConfigurationError as e:
        ...     print(f"Config error: {e}")
    """

    def __init__(self, message: str = "Invalid configuration") -> None:
        super().__init__(message)


# ============================================================================
# Expression text
# ============================================================================


class ExpressionError(FuzzyLimitError):
    """Base class for errors that point at a position in expression text."""

    def __init__(self, message: str, position: int, source: str = "") -> None:
        self.position = position
        self.source = source
        super().__init__(message, {"position": position})

    def annotate(self) -> str:
        """Render the source with a caret under the offending character."""
        if not self.source:
            return self.message
        return f"{self.message}\n  {self.source}\n  {' ' * self.position}^"


class LexError(ExpressionError):
    """Raised when the tokenizer meets a character it does not know.

    ``position`` counts characters; ``offset`` is the same place in the UTF-8
    encoded source.
    """

    def __init__(self, message: str, position: int, source: str = "") -> None:
        self.offset = len(source[:position].encode("utf-8"))
        super().__init__(message, position, source)
        self.details["offset"] = self.offset


class ParseError(ExpressionError):
    """Raised on a syntax error; carries the set of tokens that would have fit."""

    def __init__(
        self, message: str, position: int, source: str = "", expected: Iterable[str] = ()
    ) -> None:
        self.expected = sorted(set(expected))
        super().__init__(message, position, source)
        if self.expected:
            self.details["expected"] = self.expected


# ============================================================================
# Evaluation
# ============================================================================


class EvaluationError(FuzzyLimitError):
    """Raised when an expression cannot be evaluated on a box or point.

    Attributes:
        expression: Text of the offending sub-expression
        alpha: α-level being evaluated, when known
    """

    def __init__(self, message: str, expression: str = "", alpha: Optional[float] = None):
        self.expression = expression
        self.alpha = alpha
        details: dict[str, Any] = {}
        if expression:
            details["expression"] = expression
        if alpha is not None:
            details["alpha"] = alpha
        super().__init__(message, details)

    def at_alpha(self, alpha: float) -> "EvaluationError":
        """Return a copy of this error tagged with the failing α-level."""
        return type(self)(self.message, self.expression, alpha)


class DivisionByZeroIntervalError(EvaluationError):
    """Raised when a divisor (interval) contains zero."""


class DomainViolationError(EvaluationError):
    """Raised when a unary function or piecewise guard is outside its domain."""


class OccurrenceCapError(EvaluationError):
    """Raised when vertex enumeration would need more than the index cap."""


class NestednessError(EvaluationError):
    """Raised when an evaluated α-cut stack is not nested.

    The offending (α, β) pairs are available as ``pairs``; pass ``repair=True``
    to ``eval_fuzzy`` to hull-repair instead.
    """

    def __init__(
        self,
        message: str,
        expression: str = "",
        alpha: Optional[float] = None,
        pairs: Iterable[tuple[float, float]] = (),
    ) -> None:
        super().__init__(message, expression, alpha)
        self.pairs = list(pairs)
        if self.pairs:
            self.details["alpha_pairs"] = self.pairs[:5]


class PreconditionError(FuzzyLimitError):
    """Raised when an operation is called on input it is not defined for."""
