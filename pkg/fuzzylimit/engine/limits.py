"""
Numerical fuzzy limits.

For every stored α-level the engine walks a geometric schedule of boxes
shrinking towards the target cut (or running off to ±∞), evaluates the
expression on all levels of a step in one batch, and classifies each level's
trace as converging, diverging, oscillating or undetermined. Two-sided limits
at a finite target are assembled from the left and the right one-sided runs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from itertools import zip_longest
from typing import Optional, Sequence, Union

import numpy as np

from fuzzylimit.config import LimitConfig
from fuzzylimit.exceptions import (
    EvaluationError,
    InvalidApproachError,
    InvalidValueError,
    PreconditionError,
)
from fuzzylimit.engine.evaluation import evaluate_boxes
from fuzzylimit.engine.intervals import DEFAULT_MODE, EvalMode
from fuzzylimit.expr import Comparison, Expr, Piecewise, Var, parse, to_text, walk
from fuzzylimit.fuzzy import FuzzyNumber, from_levels, max_alpha_gap, nesting_violations

logger = logging.getLogger(__name__)

CONVERGENCE_WINDOW = 3
DIVERGENCE_WINDOW = 5
DEFAULT_EPS_GRID = (1e-1, 1e-2, 1e-3, 1e-4)

# Approach boxes exclude the target, so their divisors are rejected only when
# they contain 0 exactly.
APPROACH_ZERO_TOL = 0.0


class Side(str, Enum):
    BOTH = "both"
    LEFT = "left"
    RIGHT = "right"


class Infinity(str, Enum):
    PLUS = "inf"
    MINUS = "-inf"


Target = Union[FuzzyNumber, Infinity]


@dataclass(frozen=True)
class ApproachSpec:
    """Where the argument goes: a fuzzy point (from one or both sides) or ±∞.

    Raises:
        InvalidApproachError: If a one-sided approach to ±∞ is requested
    """

    target: Target
    side: Side = Side.BOTH

    def __post_init__(self) -> None:
        object.__setattr__(self, "side", Side(self.side))
        if isinstance(self.target, Infinity) and self.side is not Side.BOTH:
            raise InvalidApproachError(
                f"approach to {self.target.value} cannot be one-sided ({self.side.value})"
            )
        if not isinstance(self.target, (FuzzyNumber, Infinity)):
            raise InvalidApproachError(f"unsupported approach target {self.target!r}")

    @property
    def is_infinite(self) -> bool:
        return isinstance(self.target, Infinity)

    def with_side(self, side: Side) -> "ApproachSpec":
        return replace(self, side=side)

    def __str__(self) -> str:
        if isinstance(self.target, Infinity):
            return f"x -> {self.target.value}"
        suffix = {Side.BOTH: "", Side.LEFT: "-", Side.RIGHT: "+"}[self.side]
        return f"x -> {self.target!r}{suffix}"


class Outcome(str, Enum):
    CONVERGED = "Converged"
    DIVERGES_PLUS = "DivergesPlus"
    DIVERGES_MINUS = "DivergesMinus"
    NO_LIMIT = "NoLimit"
    UNDETERMINED = "Undetermined"


class NoLimitReason(str, Enum):
    ONE_SIDED_MISMATCH = "OneSidedMismatch"
    OSCILLATION = "Oscillation"
    NON_NESTED = "NonNested"


class WitnessKind(str, Enum):
    DELTA = "delta"
    K = "K"


@dataclass(frozen=True)
class CertificateEntry:
    """Witness for one (α, ε) pair; ``witness`` is None when none was found."""

    alpha: float
    eps: float
    witness: Optional[float]

    @property
    def certified(self) -> bool:
        return self.witness is not None


@dataclass
class Certificate:
    """ε-δ (or ε-K) witnesses per α-level, plus the residual trace of the run.

    Attributes:
        kind: DELTA for finite targets, K for targets at infinity
        entries: One entry per (α, ε), α ascending then ε descending
        residuals: Largest pair-norm residual over α at each schedule step
    """

    kind: WitnessKind = WitnessKind.DELTA
    entries: list[CertificateEntry] = field(default_factory=list)
    residuals: list[float] = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return bool(self.entries) and all(entry.certified for entry in self.entries)

    def failures(self) -> list[CertificateEntry]:
        return [entry for entry in self.entries if not entry.certified]

    def witnesses(self, alpha: float) -> list[tuple[float, Optional[float]]]:
        return [(entry.eps, entry.witness) for entry in self.entries if entry.alpha == alpha]


@dataclass
class LimitResult:
    """Outcome of a limit computation.

    ``value`` is set only for CONVERGED and ``reason`` only for NO_LIMIT.
    Two-sided results keep the one-sided runs they were assembled from in
    ``left`` and ``right``; ``error`` is the first evaluation error met.
    """

    outcome: Outcome
    value: Optional[FuzzyNumber] = None
    reason: Optional[NoLimitReason] = None
    certificate: Certificate = field(default_factory=Certificate)
    approach: Optional[ApproachSpec] = None
    mode: EvalMode = DEFAULT_MODE
    left: Optional["LimitResult"] = None
    right: Optional["LimitResult"] = None
    error: Optional[EvaluationError] = None
    steps: int = 0

    @property
    def converged(self) -> bool:
        return self.outcome is Outcome.CONVERGED

    def __str__(self) -> str:
        if self.outcome is Outcome.CONVERGED:
            return f"Converged({self.value!r})"
        if self.outcome is Outcome.NO_LIMIT and self.reason is not None:
            return f"NoLimit({self.reason.value})"
        return self.outcome.value


# ============================================================================
# Schedule
# ============================================================================


def schedule_boxes(
    approach: ApproachSpec,
    side: Side,
    k: int,
    cfg: LimitConfig,
    plo: np.ndarray,
    phi: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, float]:
    """Boxes of schedule step k for every level, and the step's scale."""
    if isinstance(approach.target, Infinity):
        big = 2.0**k / cfg.h0
        if approach.target is Infinity.PLUS:
            lo, hi = np.full_like(plo, big), np.full_like(plo, 2.0 * big)
        else:
            lo, hi = np.full_like(plo, -2.0 * big), np.full_like(plo, -big)
        return lo, hi, 1.0 / big
    h = cfg.h0 * cfg.ratio**k
    shift = h if side is Side.RIGHT else -h
    return plo + shift, phi + shift, h


def _collapsed(
    approach: ApproachSpec, lo: np.ndarray, hi: np.ndarray, plo: np.ndarray, phi: np.ndarray
) -> np.ndarray:
    """Levels whose box no longer differs from the target in floating point."""
    if approach.is_infinite:
        return ~(np.isfinite(lo) & np.isfinite(hi))
    return (lo == plo) | (hi == phi)


def guard_bounds(expr: Expr) -> list[FuzzyNumber]:
    """Bounds of the strict piecewise guards that compare the variable itself."""
    bounds: list[FuzzyNumber] = []
    for node in walk(expr):
        if not isinstance(node, Piecewise):
            continue
        for guard, _ in node.branches:
            strict = guard.op is not Comparison.EQ
            if strict and isinstance(guard.subject, Var) and guard.bound not in bounds:
                bounds.append(guard.bound)
    return bounds


def clip_to_branches(
    bounds: Sequence[FuzzyNumber],
    side: Side,
    lo: np.ndarray,
    hi: np.ndarray,
    alphas: np.ndarray,
    offset: np.ndarray | float,
) -> tuple[np.ndarray, np.ndarray]:
    """Pull boxes that overlap a guard bound's cut back to the approach side of it.

    A box reaching into the cut of a bound at its level ends at ``blo - offset``
    when approached from the left and starts at ``bhi + offset`` from the
    right. Boxes clear of every bound come back unchanged.

    Args:
        bounds: Guard bounds from :func:`guard_bounds`
        side: LEFT or RIGHT; other sides are returned unchanged
        lo: Lower box ends, first axis over ``alphas``
        hi: Upper box ends, same shape as ``lo``
        alphas: Level of each row
        offset: Distance kept from the bound, broadcastable to ``lo``
    """
    if side not in (Side.LEFT, Side.RIGHT):
        return lo, hi
    rows = (-1,) + (1,) * (lo.ndim - 1)
    for bound in bounds:
        blo, bhi = bound.cuts_at(alphas)
        blo, bhi = blo.reshape(rows), bhi.reshape(rows)
        overlaps = (hi >= blo) & (lo <= bhi)
        if side is Side.LEFT:
            edge = blo - offset
            lo = np.where(overlaps, np.minimum(lo, edge), lo)
            hi = np.where(overlaps, np.minimum(hi, edge), hi)
        else:
            edge = bhi + offset
            lo = np.where(overlaps, np.maximum(lo, edge), lo)
            hi = np.where(overlaps, np.maximum(hi, edge), hi)
    return lo, hi


def target_cuts(approach: ApproachSpec, alphas: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(approach.target, Infinity):
        zeros = np.zeros_like(alphas)
        return zeros, zeros.copy()
    return approach.target.cuts_at(alphas)


# ============================================================================
# Trace classification
# ============================================================================


def _extrapolate(scales: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> tuple[float, float]:
    """Richardson step on the last two values, assuming error linear in the scale."""
    r = scales[-1] / scales[-2]
    value_lo = (lo[-1] - r * lo[-2]) / (1.0 - r)
    value_hi = (hi[-1] - r * hi[-2]) / (1.0 - r)
    if value_lo > value_hi:
        value_lo = value_hi = 0.5 * (value_lo + value_hi)
    return float(value_lo), float(value_hi)


def _classify(
    scales: np.ndarray, lo: np.ndarray, hi: np.ndarray, cfg: LimitConfig, exhausted: bool
) -> tuple[Optional[Outcome], Optional[tuple[float, float]]]:
    """Classify one level's trace; NaN entries are failed steps and are skipped.

    Returns (None, None) while the trace is still undecided. Oscillating
    traces come back as NO_LIMIT.
    """
    valid = ~np.isnan(lo)
    scales, lo, hi = scales[valid], lo[valid], hi[valid]
    if lo.size == 0:
        return (Outcome.UNDETERMINED, None) if exhausted else (None, None)
    if lo[-1] < -cfg.blowup and hi[-1] > cfg.blowup:
        return Outcome.NO_LIMIT, None

    if lo.size >= DIVERGENCE_WINDOW:
        tail_lo, tail_hi = lo[-DIVERGENCE_WINDOW:], hi[-DIVERGENCE_WINDOW:]
        if np.all(tail_lo > cfg.blowup) and np.all(tail_lo[1:] >= tail_lo[:-1]):
            return Outcome.DIVERGES_PLUS, None
        if np.all(tail_hi < -cfg.blowup) and np.all(tail_hi[1:] <= tail_hi[:-1]):
            return Outcome.DIVERGES_MINUS, None

    finite = np.isfinite(lo) & np.isfinite(hi)
    window = CONVERGENCE_WINDOW + 1
    if lo.size >= window and np.all(finite[-window:]):
        residuals = np.hypot(np.diff(lo[-window:]), np.diff(hi[-window:]))
        settling = np.all(residuals[1:] <= residuals[:-1] + 1e-3 * cfg.tol)
        if np.all(residuals < cfg.tol) and settling:
            return Outcome.CONVERGED, _extrapolate(scales, lo, hi)

    if not exhausted:
        return None, None
    bounded = np.all(finite) and np.all(np.abs(lo) <= cfg.blowup) and np.all(np.abs(hi) <= cfg.blowup)
    if bounded and lo.size >= window:
        residuals = np.hypot(np.diff(lo), np.diff(hi))
        signs = np.sign(np.diff(lo))
        signs = signs[signs != 0]
        flips = int(np.count_nonzero(signs[1:] != signs[:-1]))
        if residuals[-CONVERGENCE_WINDOW:].max() >= cfg.tol and flips >= 2:
            return Outcome.NO_LIMIT, None
    return Outcome.UNDETERMINED, None


def _classify_clean(
    scales: np.ndarray, lo: np.ndarray, hi: np.ndarray, cfg: LimitConfig
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized :func:`_classify` for traces (columns) without failed steps.

    Returns an object array of states (None where undecided) and the
    extrapolated lower and upper values (NaN unless CONVERGED).
    """
    steps, rows = lo.shape
    states = np.full(rows, None, dtype=object)
    value_lo, value_hi = np.full(rows, np.nan), np.full(rows, np.nan)

    undecided = np.ones(rows, dtype=bool)
    oscillating = (lo[-1] < -cfg.blowup) & (hi[-1] > cfg.blowup)
    states[oscillating] = Outcome.NO_LIMIT
    undecided &= ~oscillating

    if steps >= DIVERGENCE_WINDOW:
        tail_lo, tail_hi = lo[-DIVERGENCE_WINDOW:], hi[-DIVERGENCE_WINDOW:]
        plus = np.all(tail_lo > cfg.blowup, axis=0) & np.all(tail_lo[1:] >= tail_lo[:-1], axis=0)
        minus = np.all(tail_hi < -cfg.blowup, axis=0) & np.all(tail_hi[1:] <= tail_hi[:-1], axis=0)
        plus &= undecided
        states[plus] = Outcome.DIVERGES_PLUS
        undecided &= ~plus
        minus &= undecided
        states[minus] = Outcome.DIVERGES_MINUS
        undecided &= ~minus

    window = CONVERGENCE_WINDOW + 1
    if steps >= window:
        tail_lo, tail_hi = lo[-window:], hi[-window:]
        finite = np.all(np.isfinite(tail_lo) & np.isfinite(tail_hi), axis=0)
        with np.errstate(invalid="ignore"):
            residuals = np.hypot(np.diff(tail_lo, axis=0), np.diff(tail_hi, axis=0))
            settling = np.all(residuals[1:] <= residuals[:-1] + 1e-3 * cfg.tol, axis=0)
            small = np.all(residuals < cfg.tol, axis=0)
        converged = undecided & finite & small & settling
        if np.any(converged):
            r = scales[-1] / scales[-2]
            vlo = (lo[-1] - r * lo[-2]) / (1.0 - r)
            vhi = (hi[-1] - r * hi[-2]) / (1.0 - r)
            middle = 0.5 * (vlo + vhi)
            crossed = vlo > vhi
            vlo, vhi = np.where(crossed, middle, vlo), np.where(crossed, middle, vhi)
            states[converged] = Outcome.CONVERGED
            value_lo[converged], value_hi[converged] = vlo[converged], vhi[converged]
    return states, value_lo, value_hi


def _assemble(
    alphas: np.ndarray, lo: np.ndarray, hi: np.ndarray, tol: float
) -> Optional[FuzzyNumber]:
    """Per-level limits as a fuzzy number, or None if they are not nested within tol.

    Violations below tol are removed by intersecting each cut with all lower
    ones; cuts that end up empty collapse onto one common point.
    """
    if np.any(lo > hi + tol) or nesting_violations(alphas, lo, hi, tol):
        return None
    lo, hi = np.maximum.accumulate(lo), np.minimum.accumulate(hi)
    crossed = np.flatnonzero(lo > hi)
    if crossed.size:
        start = int(crossed[0])
        centre = 0.5 * (lo[-1] + hi[-1])
        if start > 0:
            centre = min(max(centre, lo[start - 1]), hi[start - 1])
        lo[start:] = centre
        hi[start:] = centre
    return from_levels(alphas, lo, hi)


def _residual_trace(history_lo: np.ndarray, history_hi: np.ndarray) -> list[float]:
    trace: list[float] = []
    steps = history_lo.shape[0]
    worst = np.full(steps, np.nan)
    for row in range(history_lo.shape[1]):
        index = np.flatnonzero(~np.isnan(history_lo[:, row]))
        if index.size < 2:
            continue
        with np.errstate(invalid="ignore"):
            residuals = np.hypot(
                np.diff(history_lo[index, row]), np.diff(history_hi[index, row])
            )
        residuals = np.where(np.isfinite(residuals), residuals, np.nan)
        worst[index[1:]] = np.fmax(worst[index[1:]], residuals)
    for value in worst:
        if np.isfinite(value):
            trace.append(float(value))
    return trace


# ============================================================================
# Limit computation
# ============================================================================


def _one_sided(
    expr: Expr, approach: ApproachSpec, side: Side, mode: EvalMode, cfg: LimitConfig
) -> LimitResult:
    alphas = cfg.grid.alphas()
    rows = alphas.size
    plo, phi = target_cuts(approach, alphas)
    history_lo = np.full((cfg.max_steps, rows), np.nan)
    history_hi = np.full((cfg.max_steps, rows), np.nan)
    scales = np.full(cfg.max_steps, np.nan)
    states: list[Optional[Outcome]] = [None] * rows
    values: list[Optional[tuple[float, float]]] = [None] * rows
    done = np.zeros(rows, dtype=bool)
    first_error: Optional[EvaluationError] = None
    steps = 0
    bounds = [] if approach.is_infinite else guard_bounds(expr)

    for k in range(cfg.max_steps):
        pending = np.flatnonzero(~done)
        if not pending.size:
            break
        lo, hi, scale = schedule_boxes(approach, side, k, cfg, plo, phi)
        if bounds:
            lo, hi = clip_to_branches(bounds, side, lo, hi, alphas, scale)
        collapsed = _collapsed(approach, lo, hi, plo, phi)
        if np.any(collapsed[pending]):
            logger.warning(
                "schedule truncated at step %d for %s: boxes no longer differ from the target",
                k,
                to_text(expr),
            )
            done[pending[collapsed[pending]]] = True
            pending = pending[~collapsed[pending]]
            if not pending.size:
                break
        scales[k] = scale
        batch = evaluate_boxes(
            expr, lo[pending], hi[pending], alphas[pending], mode, APPROACH_ZERO_TOL
        )
        history_lo[k, pending] = batch.lo
        history_hi[k, pending] = batch.hi
        failure = batch.first_error()
        if failure is not None and first_error is None:
            row, error = failure
            first_error = error.at_alpha(float(alphas[pending[row]]))
        steps = k + 1
        clean = ~np.any(np.isnan(history_lo[:steps, pending]), axis=0)
        found, found_lo, found_hi = _classify_clean(
            scales[:steps], history_lo[:steps, pending[clean]], history_hi[:steps, pending[clean]], cfg
        )
        for row, state, vlo, vhi in zip(pending[clean], found, found_lo, found_hi):
            if state is not None:
                states[row] = state
                values[row] = (float(vlo), float(vhi)) if state is Outcome.CONVERGED else None
                done[row] = True
        for row in pending[~clean]:
            state, value = _classify(
                scales[:steps], history_lo[:steps, row], history_hi[:steps, row], cfg, False
            )
            if state is not None:
                states[row], values[row] = state, value
                done[row] = True

    for row in range(rows):
        if states[row] is None:
            states[row], values[row] = _classify(
                scales[:steps], history_lo[:steps, row], history_hi[:steps, row], cfg, True
            )

    certificate = Certificate(
        WitnessKind.K if approach.is_infinite else WitnessKind.DELTA,
        residuals=_residual_trace(history_lo[:steps], history_hi[:steps]),
    )
    result = LimitResult(
        Outcome.UNDETERMINED,
        certificate=certificate,
        approach=approach.with_side(side) if not approach.is_infinite else approach,
        mode=mode,
        error=first_error,
        steps=steps,
    )
    if Outcome.NO_LIMIT in states:
        result.outcome, result.reason = Outcome.NO_LIMIT, NoLimitReason.OSCILLATION
    elif all(state is Outcome.CONVERGED for state in states):
        lo = np.array([value[0] for value in values if value is not None])
        hi = np.array([value[1] for value in values if value is not None])
        number = _assemble(alphas, lo, hi, cfg.tol)
        if number is None:
            result.outcome, result.reason = Outcome.NO_LIMIT, NoLimitReason.NON_NESTED
        else:
            result.outcome, result.value = Outcome.CONVERGED, number
    elif all(state is Outcome.DIVERGES_PLUS for state in states):
        result.outcome = Outcome.DIVERGES_PLUS
    elif all(state is Outcome.DIVERGES_MINUS for state in states):
        result.outcome = Outcome.DIVERGES_MINUS
    logger.debug("%s side=%s: %s after %d steps", to_text(expr), side.value, result, steps)
    return result


def _merge_residuals(left: Certificate, right: Certificate) -> list[float]:
    return [
        max(a if a is not None else 0.0, b if b is not None else 0.0)
        for a, b in zip_longest(left.residuals, right.residuals)
    ]


def _two_sided(
    left: LimitResult, right: LimitResult, approach: ApproachSpec, mode: EvalMode, cfg: LimitConfig
) -> LimitResult:
    """Two-sided limit from the one-sided ones: it exists iff both exist and agree."""
    result = LimitResult(
        Outcome.NO_LIMIT,
        certificate=Certificate(residuals=_merge_residuals(left.certificate, right.certificate)),
        approach=approach,
        mode=mode,
        left=left,
        right=right,
        error=left.error or right.error,
        steps=max(left.steps, right.steps),
    )
    outcomes = {left.outcome, right.outcome}
    if Outcome.UNDETERMINED in outcomes:
        result.outcome = Outcome.UNDETERMINED
    elif left.outcome is Outcome.NO_LIMIT or right.outcome is Outcome.NO_LIMIT:
        result.reason = (left.reason if left.outcome is Outcome.NO_LIMIT else right.reason)
    elif left.value is not None and right.value is not None:
        gap, alpha = max_alpha_gap(left.value, right.value)
        if gap <= cfg.suite_tolerance:
            alphas = left.value.alphas
            result.outcome = Outcome.CONVERGED
            result.value = from_levels(
                alphas,
                0.5 * (left.value.lo + right.value.lo),
                0.5 * (left.value.hi + right.value.hi),
            )
        else:
            logger.info("one-sided limits differ by %.3g at alpha=%g", gap, alpha)
            result.reason = NoLimitReason.ONE_SIDED_MISMATCH
    elif left.outcome is right.outcome:
        result.outcome = left.outcome
    else:
        result.reason = NoLimitReason.ONE_SIDED_MISMATCH
    return result


def fuzzy_limit(
    expr: Expr,
    approach: ApproachSpec,
    mode: EvalMode = DEFAULT_MODE,
    cfg: Optional[LimitConfig] = None,
) -> LimitResult:
    """Compute the fuzzy limit of ``expr`` for the given approach.

    Args:
        expr: Expression in one variable
        approach: Target point (or ±∞) and side
        mode: Evaluation mode used on every schedule box
        cfg: Schedule, tolerances and α-grid (default: LimitConfig())

    Returns:
        LimitResult; evaluation errors never raise, they leave the affected
        levels undetermined and are attached as ``error``

    Raises:
        ConfigurationError: If cfg is invalid

    Example:
        >>> result = fuzzy_limit(parse("x^2 + x - 3"), ApproachSpec(from_singleton(1)))
        >>> result.outcome, result.value
        (<Outcome.CONVERGED: 'Converged'>, singleton(-1.0))
    """
    cfg = cfg or LimitConfig()
    cfg.validate()
    if approach.is_infinite:
        result = _one_sided(expr, approach, Side.BOTH, mode, cfg)
    elif approach.side is Side.BOTH:
        left = _one_sided(expr, approach, Side.LEFT, mode, cfg)
        right = _one_sided(expr, approach, Side.RIGHT, mode, cfg)
        result = _two_sided(left, right, approach, mode, cfg)
    else:
        result = _one_sided(expr, approach, approach.side, mode, cfg)
    logger.info("limit of %s as %s: %s", to_text(expr), approach, result)
    return result


# ============================================================================
# Certificates
# ============================================================================


def _check_eps_grid(eps_grid: Sequence[float]) -> np.ndarray:
    eps = np.asarray(list(eps_grid), dtype=float)
    if (
        eps.size == 0
        or not np.all(np.isfinite(eps))
        or np.any(eps <= 0.0)
        or np.any(np.diff(eps) >= 0.0)
    ):
        raise InvalidValueError(f"eps grid must be strictly decreasing positives, got {list(eps)}")
    return eps


_PROBE_SIDES = {
    Side.LEFT: (Side.LEFT,),
    Side.RIGHT: (Side.RIGHT,),
    Side.BOTH: (Side.LEFT, Side.RIGHT),
}


def _probe_boxes(
    approach: ApproachSpec, j: int, cfg: LimitConfig, plo: np.ndarray, phi: np.ndarray
) -> tuple[np.ndarray, np.ndarray, float]:
    """Probe boxes of candidate j, shaped (levels, sides, probes), and the candidate."""
    if isinstance(approach.target, Infinity):
        big = 2.0**j / cfg.h0
        spread = np.logspace(0.0, 3.0, cfg.certify_probes)[None, None, :]
        near, far = big * spread, 2.0 * big * spread
        shape = (plo.size, 1, cfg.certify_probes)
        if approach.target is Infinity.PLUS:
            return np.broadcast_to(near, shape), np.broadcast_to(far, shape), big
        return np.broadcast_to(-far, shape), np.broadcast_to(-near, shape), big
    delta = cfg.h0 * cfg.ratio**j
    offsets = delta * np.logspace(-3.0, 0.0, cfg.certify_probes)
    signs = [-1.0 if side is Side.LEFT else 1.0 for side in _PROBE_SIDES[approach.side]]
    shift = np.array(signs)[None, :, None] * offsets[None, None, :]
    return plo[:, None, None] + shift, phi[:, None, None] + shift, delta


def certify(
    expr: Expr,
    approach: ApproachSpec,
    result: LimitResult,
    eps_grid: Sequence[float] = DEFAULT_EPS_GRID,
    cfg: Optional[LimitConfig] = None,
    mode: Optional[EvalMode] = None,
) -> Certificate:
    """Find ε-δ (or ε-K) witnesses for a converged limit by sampling.

    Candidates are the schedule offsets δ_j = h0·ratio^j (K_j = 2^j / h0 at
    infinity). A candidate passes for a level and ε when every one of the
    log-spaced probe boxes inside its region evaluates within pair-norm ε of
    the limit cut; the witness is the largest passing δ (the smallest
    passing K). Levels without a witness are recorded as failures.

    Raises:
        PreconditionError: If ``result`` is not CONVERGED
        InvalidValueError: If eps_grid is not strictly decreasing positives
    """
    if result.outcome is not Outcome.CONVERGED or result.value is None:
        raise PreconditionError(f"can only certify a converged limit, got {result}")
    cfg = cfg or LimitConfig()
    mode = mode or result.mode
    eps = _check_eps_grid(eps_grid)
    alphas = cfg.grid.alphas()
    limit_lo, limit_hi = result.value.cuts_at(alphas)
    plo, phi = target_cuts(approach, alphas)
    witness = np.full((alphas.size, eps.size), np.nan)
    bounds = [] if approach.is_infinite else guard_bounds(expr)

    for j in range(cfg.max_steps):
        lo, hi, candidate = _probe_boxes(approach, j, cfg, plo, phi)
        if bounds:
            offset = np.abs(lo - plo[:, None, None])
            for index, side in enumerate(_PROBE_SIDES[approach.side]):
                lo[:, index], hi[:, index] = clip_to_branches(
                    bounds, side, lo[:, index], hi[:, index], alphas, offset[:, index]
                )
        if approach.is_infinite:
            failed = ~(np.isfinite(lo) & np.isfinite(hi))
        else:
            failed = (lo == plo[:, None, None]) | (hi == phi[:, None, None])
        levels = np.broadcast_to(alphas[:, None, None], lo.shape)
        batch = evaluate_boxes(
            expr, lo.reshape(-1), hi.reshape(-1), levels.reshape(-1), mode, APPROACH_ZERO_TOL
        )
        with np.errstate(invalid="ignore"):
            norms = np.hypot(
                batch.lo.reshape(lo.shape) - limit_lo[:, None, None],
                batch.hi.reshape(lo.shape) - limit_hi[:, None, None],
            )
        norms = np.where(failed | np.isnan(norms), np.inf, norms)
        worst = norms.reshape(alphas.size, -1).max(axis=1)
        found = np.isnan(witness) & (worst[:, None] < eps[None, :])
        witness[found] = candidate
        if not np.any(np.isnan(witness)):
            break

    entries = [
        CertificateEntry(
            float(alpha), float(e), None if np.isnan(witness[i, m]) else float(witness[i, m])
        )
        for i, alpha in enumerate(alphas)
        for m, e in enumerate(eps)
    ]
    certificate = Certificate(
        WitnessKind.K if approach.is_infinite else WitnessKind.DELTA,
        entries,
        list(result.certificate.residuals),
    )
    failures = certificate.failures()
    if failures:
        logger.info("%d of %d certificate entries have no witness", len(failures), len(entries))
    return certificate


# ============================================================================
# Sequential criterion
# ============================================================================


@dataclass(frozen=True)
class SequentialViolation:
    """A sequence whose final terms stay away from the limit (or fail to evaluate)."""

    sequence: int
    direction: int
    gap: float
    alpha: Optional[float] = None
    error: Optional[str] = None


@dataclass
class SequentialReport:
    sequences: int
    terms: int
    seed: Optional[int] = None
    violations: list[SequentialViolation] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def sequential_check(
    expr: Expr,
    point: FuzzyNumber,
    limit: FuzzyNumber,
    n_seqs: int = 20,
    cfg: Optional[LimitConfig] = None,
    mode: EvalMode = DEFAULT_MODE,
    seed: Optional[int] = None,
) -> SequentialReport:
    """Check that the image of random fuzzy sequences tending to ``point`` tends to ``limit``.

    Each sequence picks a side and per-level offset weights u in [0.5, 1];
    its n-th term has cuts [p₁ + h_n·u_lo, p₂ + h_n·u_hi] (mirrored below for
    the left side), weights ordered so every term is a nested fuzzy number
    distinct from ``point``. The last three terms up to the first offset below
    tol/100 are evaluated and compared endpointwise against ``limit``.
    """
    cfg = cfg or LimitConfig()
    if n_seqs < 1:
        raise InvalidValueError(f"need at least one sequence, got {n_seqs}")
    rng = np.random.default_rng(seed)
    alphas = cfg.grid.alphas()
    plo, phi = point.cuts_at(alphas)
    limit_lo, limit_hi = limit.cuts_at(alphas)
    final = cfg.max_steps
    for n in range(cfg.max_steps + 1):
        if cfg.h0 * cfg.ratio**n <= cfg.tol * 1e-2:
            final = n
            break
    terms = np.arange(max(0, final - 2), final + 1)
    offsets = cfg.h0 * cfg.ratio ** terms.astype(float)

    report = SequentialReport(sequences=n_seqs, terms=final, seed=seed)
    for index in range(n_seqs):
        direction = int(rng.choice([-1, 1]))
        weights = np.sort(rng.uniform(0.5, 1.0, 2 * alphas.size))
        u_lo, u_hi = weights[: alphas.size], weights[alphas.size :][::-1]
        if direction > 0:
            lo = plo[None, :] + offsets[:, None] * u_lo[None, :]
            hi = phi[None, :] + offsets[:, None] * u_hi[None, :]
        else:
            lo = plo[None, :] - offsets[:, None] * u_hi[None, :]
            hi = phi[None, :] - offsets[:, None] * u_lo[None, :]
        levels = np.broadcast_to(alphas[None, :], lo.shape)
        batch = evaluate_boxes(
            expr, lo.reshape(-1), hi.reshape(-1), levels.reshape(-1), mode, APPROACH_ZERO_TOL
        )
        failure = batch.first_error()
        if failure is not None:
            row, error = failure
            alpha = float(levels.reshape(-1)[row])
            report.violations.append(
                SequentialViolation(index, direction, float("inf"), alpha, error.message)
            )
            continue
        gaps = np.maximum(
            np.abs(batch.lo.reshape(lo.shape) - limit_lo[None, :]),
            np.abs(batch.hi.reshape(lo.shape) - limit_hi[None, :]),
        )
        gaps = np.where(np.isnan(gaps), np.inf, gaps)
        worst = int(np.argmax(gaps))
        gap = float(gaps.reshape(-1)[worst])
        if gap > cfg.tol:
            alpha = float(levels.reshape(-1)[worst])
            report.violations.append(SequentialViolation(index, direction, gap, alpha))
    logger.info(
        "sequential check of %s: %d/%d sequences violate", to_text(expr), len(report.violations), n_seqs
    )
    return report


# ============================================================================
# Engine
# ============================================================================


class LimitEngine:
    """Limit computations bound to one configuration and evaluation mode.

    Example:
        >>> engine = LimitEngine(LimitConfig(), EvalMode.paper_vertex())
        >>> result = engine.limit("1/x", ApproachSpec(Infinity.MINUS))
        >>> result.value
        singleton(0.0)
    """

    def __init__(self, config: LimitConfig, mode: EvalMode = DEFAULT_MODE):
        """Initialize the engine.

        Args:
            config: LimitConfig instance
            mode: Evaluation mode for every box
        """
        self._config = config
        self._mode = mode

    def _expr(self, expr: Union[Expr, str]) -> Expr:
        return parse(expr, self._config.grid) if isinstance(expr, str) else expr

    def limit(self, expr: Union[Expr, str], approach: ApproachSpec) -> LimitResult:
        return fuzzy_limit(self._expr(expr), approach, self._mode, self._config)

    def certify(
        self,
        expr: Union[Expr, str],
        approach: ApproachSpec,
        result: LimitResult,
        eps_grid: Sequence[float] = DEFAULT_EPS_GRID,
    ) -> Certificate:
        return certify(self._expr(expr), approach, result, eps_grid, self._config, self._mode)

    def sequential_check(
        self,
        expr: Union[Expr, str],
        point: FuzzyNumber,
        limit: FuzzyNumber,
        n_seqs: int = 20,
        seed: Optional[int] = None,
    ) -> SequentialReport:
        return sequential_check(
            self._expr(expr), point, limit, n_seqs, self._config, self._mode, seed
        )
