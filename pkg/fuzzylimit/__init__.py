"""
Fuzzy Limits
~~~~~~~~~~~~

Fuzzy numbers as α-cut stacks, fuzzy arithmetic by the resolution principle,
and numerically certified fuzzy limits of expression-defined fuzzy functions.

Example:
    >>> from fuzzylimit import FuzzyLimitCalculator, LimitConfig, from_singleton
    >>> calc = FuzzyLimitCalculator(LimitConfig())
    >>> calc.limit("x^2 + x - 3", from_singleton(1)).value
    singleton(-1.0)

:license: MIT
"""

__version__ = "1.0.0"
__author__ = "Fuzzy Limits Contributors"

from fuzzylimit.config import AlphaGridConfig, LimitConfig
from fuzzylimit.exceptions import (
    FuzzyLimitError,
    ValidationError,
    InvalidShapeError,
    InvalidValueError,
    AlphaDomainError,
    InconsistentCutsError,
    InvalidApproachError,
    ConfigurationError,
    ExpressionError,
    LexError,
    ParseError,
    EvaluationError,
    DivisionByZeroIntervalError,
    DomainViolationError,
    OccurrenceCapError,
    NestednessError,
    PreconditionError,
)
from fuzzylimit.fuzzy import (
    Interval,
    DistancePair,
    FuzzyNumber,
    from_triangular,
    from_singleton,
    from_levels,
    alpha_cut,
    membership,
    decompose,
    reconstruct,
    distance_pair,
    pair_norm,
    fuzzy_leq,
)
from fuzzylimit.expr import parse, to_text, eval_scalar
from fuzzylimit.engine.intervals import EvalMode
from fuzzylimit.engine.evaluation import vertex_eval, eval_fuzzy
from fuzzylimit.engine.limits import (
    ApproachSpec,
    Side,
    Infinity,
    Outcome,
    NoLimitReason,
    LimitResult,
    Certificate,
    fuzzy_limit,
    certify,
    sequential_check,
)
from fuzzylimit.engine.theorems import Theorem, Status, TheoremReport, run_suite
from fuzzylimit.calculator import FuzzyLimitCalculator

__all__ = [
    # Version info
    "__version__",
    "__author__",
    # Configuration
    "AlphaGridConfig",
    "LimitConfig",
    # Exceptions
    "FuzzyLimitError",
    "ValidationError",
    "InvalidShapeError",
    "InvalidValueError",
    "AlphaDomainError",
    "InconsistentCutsError",
    "InvalidApproachError",
    "ConfigurationError",
    "ExpressionError",
    "LexError",
    "ParseError",
    "EvaluationError",
    "DivisionByZeroIntervalError",
    "DomainViolationError",
    "OccurrenceCapError",
    "NestednessError",
    "PreconditionError",
    # Fuzzy numbers
    "Interval",
    "DistancePair",
    "FuzzyNumber",
    "from_triangular",
    "from_singleton",
    "from_levels",
    "alpha_cut",
    "membership",
    "decompose",
    "reconstruct",
    "distance_pair",
    "pair_norm",
    "fuzzy_leq",
    # Expressions and evaluation
    "parse",
    "to_text",
    "eval_scalar",
    "EvalMode",
    "vertex_eval",
    "eval_fuzzy",
    # Limits
    "ApproachSpec",
    "Side",
    "Infinity",
    "Outcome",
    "NoLimitReason",
    "LimitResult",
    "Certificate",
    "fuzzy_limit",
    "certify",
    "sequential_check",
    # Theorems
    "Theorem",
    "Status",
    "TheoremReport",
    "run_suite",
    # Main calculator
    "FuzzyLimitCalculator",
]
