"""
Fuzzy numbers as α-cut stacks.

A fuzzy number is stored as its α-cuts on a finite uniform grid of levels in
(0, 1]. Membership grades are recovered from the cuts as the sup over the
stored levels of ``α ∧ χ_cut(α)(x)``, so decomposition and reconstruction are
exact inverses on the grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Sequence

import numpy as np

from fuzzylimit.config import AlphaGridConfig
from fuzzylimit.exceptions import (
    AlphaDomainError,
    InconsistentCutsError,
    InvalidShapeError,
    InvalidValueError,
)

DEFAULT_GRID = AlphaGridConfig()

# Slack allowed when checking nestedness of computed (not constructed) stacks.
NESTING_SLACK = 1e-12


def check_alpha(alpha: float) -> float:
    """Return ``alpha`` as a float, raising if it is not an α-level in (0, 1]."""
    value = float(alpha)
    if not 0.0 < value <= 1.0:
        raise AlphaDomainError(value)
    return value


# ============================================================================
# Intervals and metric pairs
# ============================================================================


@dataclass(frozen=True)
class Interval:
    """Closed real interval [lo, hi]; degenerate intervals are allowed."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi):
            raise InvalidValueError("interval endpoints must not be NaN")
        if lo > hi:
            raise InvalidShapeError(f"interval lower bound {lo} exceeds upper bound {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, value: float) -> "Interval":
        return cls(value, value)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def is_degenerate(self) -> bool:
        return self.lo == self.hi

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= x <= self.hi + tol

    def is_subset(self, other: "Interval", tol: float = 0.0) -> bool:
        """True when this interval lies inside ``other``."""
        return other.lo - tol <= self.lo and self.hi <= other.hi + tol

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def intersect(self, other: "Interval") -> Optional["Interval"]:
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return Interval(lo, hi) if lo <= hi else None

    def __iter__(self):
        yield self.lo
        yield self.hi

    def __repr__(self) -> str:
        return f"[{self.lo!r}, {self.hi!r}]"


@dataclass(frozen=True)
class DistancePair:
    """Pair (d1, d2) of min/max endpoint distances between two intervals."""

    d1: float
    d2: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "d1", float(self.d1))
        object.__setattr__(self, "d2", float(self.d2))
        if not 0.0 <= self.d1 <= self.d2:
            raise InvalidValueError(f"distance pair needs 0 <= d1 <= d2, got ({self.d1}, {self.d2})")

    @property
    def norm(self) -> float:
        return pair_norm(self)


@dataclass(frozen=True)
class MembershipSample:
    """Membership grade of a point."""

    x: float
    grade: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.grade <= 1.0:
            raise InvalidValueError(f"membership grade {self.grade} outside [0, 1]")


def distance_pair(a: Interval, b: Interval) -> DistancePair:
    """Min and max over the four endpoint distances |a_i - b_j|.

    Examples:
        >>> distance_pair(Interval(0, 0), Interval(3, 4))
        DistancePair(d1=3.0, d2=4.0)
        >>> distance_pair(Interval(1, 3), Interval(1, 3))
        DistancePair(d1=0.0, d2=2.0)
    """
    distances = [abs(x - y) for x in (a.lo, a.hi) for y in (b.lo, b.hi)]
    return DistancePair(min(distances), max(distances))


def endpoint_distance(a: Interval, b: Interval) -> DistancePair:
    """Aligned endpoint distances (|a.lo - b.lo|, |a.hi - b.hi|), sorted.

    Equals :func:`distance_pair` whenever ``b`` is degenerate, and vanishes iff
    the two intervals coincide, which makes it the gauge for fuzzy limits whose
    cuts have positive width.
    """
    first, second = sorted((abs(a.lo - b.lo), abs(a.hi - b.hi)))
    return DistancePair(first, second)


def pair_norm(pair: DistancePair) -> float:
    """Euclidean norm sqrt(d1^2 + d2^2) of a distance pair."""
    return math.hypot(pair.d1, pair.d2)


# ============================================================================
# Fuzzy numbers
# ============================================================================


class FuzzyKind(str, Enum):
    SINGLETON = "singleton"
    TRIANGULAR = "triangular"
    GENERAL = "general"


def _frozen(values: Iterable[float] | np.ndarray) -> np.ndarray:
    array = np.array(values, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class FuzzyNumber:
    """Normal convex fuzzy number stored as nested α-cuts.

    Attributes:
        alphas: Strictly increasing stored α-levels, the last one equal to 1
        lo: Lower cut endpoints, nondecreasing in α
        hi: Upper cut endpoints, nonincreasing in α
        kind: Shape the stack was built from
        params: (value,) for singletons, (a, b, c) for triangular numbers
    """

    alphas: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    kind: FuzzyKind = FuzzyKind.GENERAL
    params: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        alphas, lo, hi = _frozen(self.alphas), _frozen(self.lo), _frozen(self.hi)
        if alphas.ndim != 1 or alphas.shape != lo.shape or alphas.shape != hi.shape:
            raise InvalidShapeError("alphas, lo and hi must be 1-D arrays of equal length")
        if alphas.size == 0:
            raise InvalidShapeError("a fuzzy number needs at least the core level")
        if np.any(np.isnan(lo)) or np.any(np.isnan(hi)):
            raise InvalidValueError("α-cut endpoints must not be NaN")
        if alphas[0] <= 0.0 or np.any(np.diff(alphas) <= 0.0):
            raise InvalidShapeError("α-levels must be strictly increasing inside (0, 1]")
        if alphas[-1] != 1.0:
            raise InvalidShapeError("the core level α = 1 must be stored")
        scale = NESTING_SLACK * max(1.0, float(np.max(np.abs(np.concatenate([lo, hi])))))
        if np.any(lo > hi + scale):
            bad = np.flatnonzero(lo > hi + scale)
            raise InconsistentCutsError(
                f"empty α-cut at α={float(alphas[bad[0]])!r}",
                [(float(alphas[i]), float(alphas[i])) for i in bad],
            )
        pairs = nesting_violations(alphas, lo, hi, scale)
        if pairs:
            raise InconsistentCutsError("α-cuts are not nested", pairs)
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", _frozen(np.maximum(hi, lo)))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))

    # ------------------------------------------------------------------
    # Views
    # ------------------------------------------------------------------

    @property
    def levels(self) -> list[tuple[float, Interval]]:
        return decompose(self)

    @property
    def core(self) -> Interval:
        return Interval(self.lo[-1], self.hi[-1])

    @property
    def support(self) -> Interval:
        """Lowest stored cut; α = 0 itself is never stored."""
        return Interval(self.lo[0], self.hi[0])

    @property
    def is_crisp(self) -> bool:
        return bool(np.all(self.lo == self.lo[-1]) and np.all(self.hi == self.lo[-1]))

    def cut(self, alpha: float) -> Interval:
        return alpha_cut(self, alpha)

    def cuts_at(self, alphas: np.ndarray | Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized α-cuts at arbitrary levels in (0, 1]."""
        levels = np.asarray(alphas, dtype=float)
        if np.any(levels <= 0.0) or np.any(levels > 1.0):
            bad = levels[(levels <= 0.0) | (levels > 1.0)][0]
            raise AlphaDomainError(float(bad))
        if self.kind is FuzzyKind.SINGLETON:
            value = self.params[0] if self.params else self.lo[-1]
            return np.full_like(levels, value), np.full_like(levels, value)
        if self.kind is FuzzyKind.TRIANGULAR:
            a, b, c = self.params
            return a + levels * (b - a), c - levels * (c - b)
        return _interpolate(self.alphas, self.lo, levels), _interpolate(self.alphas, self.hi, levels)

    # ------------------------------------------------------------------
    # Equality and display
    # ------------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FuzzyNumber):
            return NotImplemented
        return (
            np.array_equal(self.alphas, other.alphas)
            and np.array_equal(self.lo, other.lo)
            and np.array_equal(self.hi, other.hi)
        )

    def __hash__(self) -> int:
        return hash(tuple((array + 0.0).tobytes() for array in (self.alphas, self.lo, self.hi)))

    def __repr__(self) -> str:
        if self.kind is FuzzyKind.SINGLETON:
            return f"singleton({float(self.lo[-1])!r})"
        if self.kind is FuzzyKind.TRIANGULAR:
            a, b, c = self.params
            return f"triangular({a!r}, {b!r}, {c!r})"
        return (
            f"FuzzyNumber(levels={self.alphas.size}, support={self.support!r}, "
            f"core={self.core!r})"
        )


def _interpolate(alphas: np.ndarray, values: np.ndarray, levels: np.ndarray) -> np.ndarray:
    """Linear interpolation between stored levels, linear extrapolation below them."""
    result = np.interp(levels, alphas, values)
    below = levels < alphas[0]
    if np.any(below) and alphas.size >= 2:
        slope = (values[1] - values[0]) / (alphas[1] - alphas[0])
        result = np.where(below, values[0] + slope * (levels - alphas[0]), result)
    return result


def nesting_violations(
    alphas: np.ndarray, lo: np.ndarray, hi: np.ndarray, slack: float
) -> list[tuple[float, float]]:
    """(α, β) pairs of consecutive levels where cut(β) is not inside cut(α)."""
    bad = np.flatnonzero((np.diff(lo) < -slack) | (np.diff(hi) > slack))
    return [(float(alphas[i]), float(alphas[i + 1])) for i in bad]


# ============================================================================
# Construction
# ============================================================================


def _grid_alphas(grid: Optional[AlphaGridConfig]) -> np.ndarray:
    grid = grid or DEFAULT_GRID
    grid.validate()
    return grid.alphas()


def from_triangular(
    a: float, b: float, c: float, grid: Optional[AlphaGridConfig] = None
) -> FuzzyNumber:
    """Triangular fuzzy number (a, b, c) with cut(α) = [a + α(b−a), c − α(c−b)].

    Raises:
        InvalidValueError: If a point is not finite
        InvalidShapeError: If a <= b <= c does not hold
    """
    a, b, c = float(a), float(b), float(c)
    if not all(math.isfinite(v) for v in (a, b, c)):
        raise InvalidValueError(f"triangular points must be finite, got ({a}, {b}, {c})")
    if not a <= b <= c:
        raise InvalidShapeError(f"triangular number needs a <= b <= c, got ({a}, {b}, {c})")
    alphas = _grid_alphas(grid)
    return FuzzyNumber(
        alphas,
        a + alphas * (b - a),
        c - alphas * (c - b),
        kind=FuzzyKind.TRIANGULAR,
        params=(a, b, c),
    )


def from_singleton(r: float, grid: Optional[AlphaGridConfig] = None) -> FuzzyNumber:
    """Crisp number embedded as a fuzzy number whose every cut is [r, r].

    Raises:
        InvalidValueError: If r is not finite
    """
    r = float(r)
    if not math.isfinite(r):
        raise InvalidValueError(f"singleton value must be finite, got {r}")
    alphas = _grid_alphas(grid)
    values = np.full_like(alphas, r)
    return FuzzyNumber(alphas, values, values, kind=FuzzyKind.SINGLETON, params=(r,))


def from_levels(
    alphas: Sequence[float] | np.ndarray,
    lo: Sequence[float] | np.ndarray,
    hi: Sequence[float] | np.ndarray,
) -> FuzzyNumber:
    """General α-cut stack; stacks whose cuts are all one point become singletons."""
    lo_array = np.asarray(lo, dtype=float)
    hi_array = np.asarray(hi, dtype=float)
    if lo_array.size and np.all(lo_array == lo_array[-1]) and np.all(hi_array == lo_array[-1]):
        value = float(lo_array[-1])
        return FuzzyNumber(alphas, lo_array, hi_array, FuzzyKind.SINGLETON, (value,))
    return FuzzyNumber(alphas, lo_array, hi_array)


def decompose(number: FuzzyNumber) -> list[tuple[float, Interval]]:
    """The stored (α, cut(α)) pairs in increasing α."""
    return [
        (float(alpha), Interval(lo, hi))
        for alpha, lo, hi in zip(number.alphas, number.lo, number.hi)
    ]


def reconstruct(samples: Iterable[tuple[float, Interval]]) -> FuzzyNumber:
    """Rebuild a fuzzy number as the sup-union of its α-level sets.

    Raises:
        InvalidShapeError: If no samples are given or the core level is missing
        InconsistentCutsError: If the cuts are not nested
    """
    ordered = sorted(((check_alpha(alpha), cut) for alpha, cut in samples), key=lambda s: s[0])
    if not ordered:
        raise InvalidShapeError("cannot reconstruct a fuzzy number from no α-cuts")
    if ordered[-1][0] != 1.0:
        raise InvalidShapeError("the α = 1 cut (core) is required for reconstruction")
    alphas = [alpha for alpha, _ in ordered]
    if len(set(alphas)) != len(alphas):
        raise InconsistentCutsError("duplicate α-levels in samples")
    lo = np.array([cut.lo for _, cut in ordered])
    hi = np.array([cut.hi for _, cut in ordered])
    pairs = nesting_violations(np.array(alphas), lo, hi, 0.0)
    if pairs:
        raise InconsistentCutsError("α-cuts are not nested", pairs)
    return from_levels(alphas, lo, hi)


def resample(number: FuzzyNumber, grid: AlphaGridConfig) -> FuzzyNumber:
    """Cuts of ``number`` on another grid."""
    alphas = _grid_alphas(grid)
    lo, hi = number.cuts_at(alphas)
    if number.kind is FuzzyKind.GENERAL:
        return from_levels(alphas, lo, hi)
    return FuzzyNumber(alphas, lo, hi, number.kind, number.params)


# ============================================================================
# Queries
# ============================================================================


def alpha_cut(number: FuzzyNumber, alpha: float) -> Interval:
    """The α-cut of ``number``; levels between stored ones are interpolated.

    Raises:
        AlphaDomainError: If alpha is outside (0, 1]
    """
    level = check_alpha(alpha)
    index = np.searchsorted(number.alphas, level)
    if index < number.alphas.size and number.alphas[index] == level:
        return Interval(number.lo[index], number.hi[index])
    lo, hi = number.cuts_at([level])
    return Interval(lo[0], max(hi[0], lo[0]))


def membership(number: FuzzyNumber, x: float) -> float:
    """Grade sup over stored α of α ∧ χ_cut(α)(x)."""
    inside = (number.lo <= x) & (x <= number.hi)
    if not np.any(inside):
        return 0.0
    return float(number.alphas[inside].max())


def membership_samples(
    number: FuzzyNumber, start: float, stop: float, points: int
) -> list[MembershipSample]:
    """``points + 1`` equally spaced membership samples over [start, stop]."""
    if not start < stop:
        raise InvalidShapeError(f"sampling range needs start < stop, got [{start}, {stop}]")
    if points < 1:
        raise InvalidValueError(f"need at least one sampling step, got {points}")
    xs = np.linspace(start, stop, points + 1)
    return [MembershipSample(float(x), membership(number, float(x))) for x in xs]


def fuzzy_leq(left: FuzzyNumber, right: FuzzyNumber, tol: float = 0.0) -> bool:
    """Componentwise order: every cut of ``left`` lies below the matching cut of ``right``.

    Incomparable pairs answer False in both directions. ``right`` is resampled
    on the grid of ``left`` when the grids differ.
    """
    lo, hi = right.cuts_at(left.alphas)
    return bool(np.all(left.lo <= lo + tol) and np.all(left.hi <= hi + tol))


def max_alpha_gap(left: FuzzyNumber, right: FuzzyNumber) -> tuple[float, float]:
    """Largest endpointwise distance over the grid of ``left``, and the α where it occurs."""
    lo, hi = right.cuts_at(left.alphas)
    with np.errstate(invalid="ignore"):
        gaps = np.maximum(np.abs(left.lo - lo), np.abs(left.hi - hi))
    gaps = np.where(np.isnan(gaps), np.inf, gaps)
    index = int(np.argmax(gaps))
    return float(gaps[index]), float(left.alphas[index])


def equals_within(left: FuzzyNumber, right: FuzzyNumber, tau: float = 1e-9) -> bool:
    """True when every cut endpoint differs by at most ``tau``."""
    return max_alpha_gap(left, right)[0] <= tau
