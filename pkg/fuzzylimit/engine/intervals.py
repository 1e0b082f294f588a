"""
Interval kernels and evaluation modes.

Every kernel exists twice: an array form working on per-row bound arrays
(used by the batch evaluator) and an :class:`Interval` form for single
intervals. The array forms never raise; they return NaN or infinite bounds
and leave domain checks to their callers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np

from fuzzylimit.exceptions import (
    DivisionByZeroIntervalError,
    DomainViolationError,
    InvalidValueError,
    PreconditionError,
)
from fuzzylimit.expr import Indexing
from fuzzylimit.fuzzy import FuzzyNumber, Interval, from_levels

# A divisor interval counts as containing zero when it comes within this
# absolute distance of 0.
ZERO_TOL = 1e-12

TWO_PI = 2.0 * math.pi
MONOTONE_FUNCTIONS = ("exp", "sqrt")

Bounds = tuple[np.ndarray, np.ndarray]


# ============================================================================
# Evaluation modes
# ============================================================================


class ModeKind(str, Enum):
    PAPER_VERTEX = "paper"
    NATURAL_INTERVAL = "natural"
    RIGOROUS_SUBDIVIDE = "rigorous"


@dataclass(frozen=True)
class EvalMode:
    """How an expression is extended from points to α-cut boxes.

    Attributes:
        kind: PaperVertex (endpoint enumeration), NaturalInterval (one interval
            operation per node) or RigorousSubdivide (natural evaluation on
            2^depth sub-boxes, then the hull)
        depth: Subdivision depth, at least 1 for RigorousSubdivide
        indexing: Endpoint index assignment of PaperVertex
    """

    kind: ModeKind = ModeKind.PAPER_VERTEX
    depth: int = 0
    indexing: Indexing = Indexing.POSITIONAL

    def __post_init__(self) -> None:
        if self.kind is ModeKind.RIGOROUS_SUBDIVIDE and self.depth < 1:
            raise InvalidValueError(f"subdivision depth must be at least 1, got {self.depth}")

    @classmethod
    def paper_vertex(cls, indexing: Indexing = Indexing.POSITIONAL) -> "EvalMode":
        return cls(ModeKind.PAPER_VERTEX, indexing=indexing)

    @classmethod
    def natural(cls) -> "EvalMode":
        return cls(ModeKind.NATURAL_INTERVAL)

    @classmethod
    def rigorous(cls, depth: int = 4) -> "EvalMode":
        return cls(ModeKind.RIGOROUS_SUBDIVIDE, depth=depth)

    @classmethod
    def parse(cls, text: str) -> "EvalMode":
        """Parse ``paper``, ``paper:occurrence``, ``natural`` or ``rigorous:<depth>``.

        Raises:
            InvalidValueError: On any other text
        """
        name, _, option = text.strip().lower().partition(":")
        if name == "paper":
            try:
                return cls.paper_vertex(Indexing(option) if option else Indexing.POSITIONAL)
            except ValueError:
                raise InvalidValueError(f"unknown vertex indexing {option!r}")
        if name == "natural" and not option:
            return cls.natural()
        if name == "rigorous":
            if not option:
                return cls.rigorous()
            try:
                return cls.rigorous(int(option))
            except ValueError:
                raise InvalidValueError(f"subdivision depth must be an integer, got {option!r}")
        raise InvalidValueError(
            f"unknown evaluation mode {text!r} (expected paper|natural|rigorous:<depth>)"
        )

    @property
    def is_vertex(self) -> bool:
        return self.kind is ModeKind.PAPER_VERTEX

    def __str__(self) -> str:
        if self.kind is ModeKind.RIGOROUS_SUBDIVIDE:
            return f"rigorous:{self.depth}"
        if self.kind is ModeKind.PAPER_VERTEX and self.indexing is Indexing.OCCURRENCE:
            return "paper:occurrence"
        return self.kind.value


DEFAULT_MODE = EvalMode.paper_vertex()


# ============================================================================
# Array kernels
# ============================================================================


def add_arrays(alo: np.ndarray, ahi: np.ndarray, blo: np.ndarray, bhi: np.ndarray) -> Bounds:
    return alo + blo, ahi + bhi


def sub_arrays(alo: np.ndarray, ahi: np.ndarray, blo: np.ndarray, bhi: np.ndarray) -> Bounds:
    return alo - bhi, ahi - blo


def mul_arrays(alo: np.ndarray, ahi: np.ndarray, blo: np.ndarray, bhi: np.ndarray) -> Bounds:
    with np.errstate(invalid="ignore", over="ignore"):
        products = np.stack(np.broadcast_arrays(alo * blo, alo * bhi, ahi * blo, ahi * bhi))
    return products.min(axis=0), products.max(axis=0)


def contains_zero(lo: np.ndarray, hi: np.ndarray, tol: float = ZERO_TOL) -> np.ndarray:
    """Rows whose interval comes within ``tol`` of zero."""
    with np.errstate(invalid="ignore"):
        return (lo - tol <= 0.0) & (hi + tol >= 0.0)


def div_arrays(
    alo: np.ndarray, ahi: np.ndarray, blo: np.ndarray, bhi: np.ndarray, zero_tol: float = ZERO_TOL
) -> Bounds:
    """Quotient bounds; rows whose divisor contains zero come back as NaN."""
    bad = contains_zero(blo, bhi, zero_tol)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv_lo = np.where(bad, np.nan, 1.0 / bhi)
        inv_hi = np.where(bad, np.nan, 1.0 / blo)
    return mul_arrays(alo, ahi, inv_lo, inv_hi)


def neg_arrays(lo: np.ndarray, hi: np.ndarray) -> Bounds:
    return -hi, -lo


def vertex_power(lo: np.ndarray, hi: np.ndarray, n: int) -> Bounds:
    """Min and max over all products of n endpoint choices (cross terms included)."""
    if n == 0:
        return np.ones_like(lo), np.ones_like(hi)
    with np.errstate(over="ignore", invalid="ignore"):
        products = np.stack([lo**k * hi ** (n - k) for k in range(n + 1)])
    return products.min(axis=0), products.max(axis=0)


def range_power(lo: np.ndarray, hi: np.ndarray, n: int) -> Bounds:
    """True range of t -> t^n over [lo, hi]."""
    if n == 0:
        return np.ones_like(lo), np.ones_like(hi)
    with np.errstate(over="ignore"):
        plo, phi = lo**n, hi**n
    if n % 2 == 1:
        return plo, phi
    low = np.where(lo >= 0.0, plo, np.where(hi <= 0.0, phi, 0.0))
    return low, np.maximum(plo, phi)


def abs_arrays(lo: np.ndarray, hi: np.ndarray) -> Bounds:
    low = np.where(lo >= 0.0, lo, np.where(hi <= 0.0, -hi, 0.0))
    return low, np.maximum(np.abs(lo), np.abs(hi))


def sin_arrays(lo: np.ndarray, hi: np.ndarray) -> Bounds:
    """Exact range of sin, including interior extrema."""
    slo, shi = np.sin(lo), np.sin(hi)
    low, high = np.minimum(slo, shi), np.maximum(slo, shi)
    with np.errstate(invalid="ignore"):
        peak = np.ceil((lo - math.pi / 2) / TWO_PI) * TWO_PI + math.pi / 2
        trough = np.ceil((lo + math.pi / 2) / TWO_PI) * TWO_PI - math.pi / 2
        wide = (hi - lo) >= TWO_PI
    high = np.where(wide | (peak <= hi), 1.0, high)
    low = np.where(wide | (trough <= hi), -1.0, low)
    return low, high


def exp_arrays(lo: np.ndarray, hi: np.ndarray) -> Bounds:
    with np.errstate(over="ignore"):
        return np.exp(lo), np.exp(hi)


def sqrt_arrays(lo: np.ndarray, hi: np.ndarray) -> Bounds:
    """Square root bounds; rows reaching below zero come back as NaN."""
    with np.errstate(invalid="ignore"):
        return np.where(lo < 0.0, np.nan, np.sqrt(np.maximum(lo, 0.0))), np.sqrt(hi)


UNARY_ARRAYS: dict[str, Callable[[np.ndarray, np.ndarray], Bounds]] = {
    "exp": exp_arrays,
    "sqrt": sqrt_arrays,
    "abs": abs_arrays,
    "sin": sin_arrays,
}

POINT_FUNCTIONS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "exp": np.exp,
    "sqrt": np.sqrt,
    "abs": np.abs,
    "sin": np.sin,
}


# ============================================================================
# Interval kernels
# ============================================================================


def _interval(bounds: Bounds) -> Interval:
    lo, hi = bounds
    return Interval(float(np.asarray(lo).reshape(-1)[0]), float(np.asarray(hi).reshape(-1)[0]))


def _arrays(a: Interval) -> Bounds:
    return np.array([a.lo]), np.array([a.hi])


def iv_add(a: Interval, b: Interval) -> Interval:
    """[a.lo + b.lo, a.hi + b.hi]."""
    return _interval(add_arrays(*_arrays(a), *_arrays(b)))


def iv_sub(a: Interval, b: Interval) -> Interval:
    return _interval(sub_arrays(*_arrays(a), *_arrays(b)))


def iv_neg(a: Interval) -> Interval:
    return Interval(-a.hi, -a.lo)


def iv_mul(a: Interval, b: Interval) -> Interval:
    """Min and max of the four endpoint products."""
    return _interval(mul_arrays(*_arrays(a), *_arrays(b)))


def iv_div(a: Interval, b: Interval) -> Interval:
    """``iv_mul(a, [1/b.hi, 1/b.lo])``.

    Raises:
        DivisionByZeroIntervalError: If b contains zero
    """
    if contains_zero(*_arrays(b))[0]:
        raise DivisionByZeroIntervalError(f"divisor {b!r} contains zero")
    return _interval(div_arrays(*_arrays(a), *_arrays(b)))


def iv_pow_int(a: Interval, n: int, mode: Optional[EvalMode] = None) -> Interval:
    """Integer power; PaperVertex keeps the cross terms, other modes use the true range.

    Examples:
        >>> iv_pow_int(Interval(-1, 2), 2)
        [-2.0, 4.0]
        >>> iv_pow_int(Interval(-1, 2), 2, EvalMode.rigorous(1))
        [0.0, 4.0]
    """
    if n < 0:
        raise PreconditionError(f"integer power needs a nonnegative exponent, got {n}")
    mode = mode or DEFAULT_MODE
    kernel = vertex_power if mode.is_vertex else range_power
    return _interval(kernel(*_arrays(a), n))


def iv_monotone_unary(func: str, a: Interval) -> Interval:
    """Image of a nondecreasing function (exp, sqrt) as [f(lo), f(hi)].

    Raises:
        DomainViolationError: If a leaves the function's domain
        PreconditionError: If func is not a supported monotone function
    """
    if func not in MONOTONE_FUNCTIONS:
        raise PreconditionError(f"{func!r} is not a monotone function tag")
    if func == "sqrt" and a.lo < 0.0:
        raise DomainViolationError(f"sqrt of interval {a!r} reaching below zero", "sqrt")
    return _interval(UNARY_ARRAYS[func](*_arrays(a)))


def iv_abs(a: Interval) -> Interval:
    return _interval(abs_arrays(*_arrays(a)))


def iv_sin(a: Interval) -> Interval:
    return _interval(sin_arrays(*_arrays(a)))


# ============================================================================
# Level-wise fuzzy arithmetic
# ============================================================================

_BINARY_ARRAYS = {"add": add_arrays, "sub": sub_arrays, "mul": mul_arrays, "div": div_arrays}


def fuzzy_binary(f: FuzzyNumber, g: FuzzyNumber, op: str) -> FuzzyNumber:
    """Apply an interval operation cut by cut on the grid of ``f``.

    Args:
        f: Left operand; its grid is the grid of the result
        g: Right operand, resampled on the grid of ``f`` when needed
        op: One of "add", "sub", "mul", "div"

    Raises:
        DivisionByZeroIntervalError: If some cut of ``g`` contains zero under "div"
    """
    if op not in _BINARY_ARRAYS:
        raise PreconditionError(f"unknown operation {op!r}")
    glo, ghi = g.cuts_at(f.alphas)
    if op == "div":
        bad = np.flatnonzero(contains_zero(glo, ghi))
        if bad.size:
            raise DivisionByZeroIntervalError(
                "divisor cut contains zero", alpha=float(f.alphas[bad[0]])
            )
    lo, hi = _BINARY_ARRAYS[op](f.lo, f.hi, glo, ghi)
    return from_levels(f.alphas, lo, np.maximum(hi, lo))


def fuzzy_scale(scalar: FuzzyNumber, f: FuzzyNumber) -> FuzzyNumber:
    """Fuzzy scalar multiple ``scalar · f`` with min/max endpoint products, on the grid of ``f``."""
    return fuzzy_binary(f, scalar, "mul")
