"""
Executable checks of the basic fuzzy limit theorems.

Each check computes both sides of an identity (or the conclusion of an
implication) numerically and reports Holds, Fails or Inapplicable. Failed
hypotheses and non-convergent inputs are reported as Inapplicable, never
raised, so a report stream separates real theorem violations from inputs the
theorem says nothing about.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional, Union

import numpy as np

from fuzzylimit.config import LimitConfig
from fuzzylimit.exceptions import EvaluationError, FuzzyLimitError, InvalidValueError
from fuzzylimit.engine.evaluation import MAX_INDICES, eval_fuzzy, evaluate_boxes
from fuzzylimit.engine.intervals import (
    DEFAULT_MODE,
    EvalMode,
    contains_zero,
    fuzzy_binary,
    fuzzy_scale,
)
from fuzzylimit.engine.limits import (
    APPROACH_ZERO_TOL,
    ApproachSpec,
    Infinity,
    LimitResult,
    NoLimitReason,
    Outcome,
    Side,
    fuzzy_limit,
    schedule_boxes,
    sequential_check,
    target_cuts,
)
from fuzzylimit.expr import (
    Add,
    Const,
    Div,
    Expr,
    Mul,
    PowInt,
    Var,
    count_indices,
    parse,
    substitute,
    to_text,
)
from fuzzylimit.fuzzy import (
    FuzzyNumber,
    from_singleton,
    from_triangular,
    fuzzy_leq,
    max_alpha_gap,
)

logger = logging.getLogger(__name__)

HYPOTHESIS_PROBES = 8
HYPOTHESIS_TOL = 1e-12
UNIQUENESS_SCHEDULES = ((0.1, 0.5), (0.05, 0.7))
FUZZY_BOUNDARY_PIECEWISE = (
    "{x^2 if x < (1/6, 1/5, 1/4) ; (1/36, 1/25, 1/16) if x > (1/6, 1/5, 1/4)}"
)
SUITES = ("all", "algebra", "order", "composition", "uniqueness")

ExprLike = Union[Expr, str]
At = Union[ApproachSpec, FuzzyNumber, Infinity]


class Theorem(str, Enum):
    UNIQUENESS = "Uniqueness"
    SUM_RULE = "SumRule"
    SCALAR_RULE = "ScalarRule"
    PRODUCT_RULE = "ProductRule"
    QUOTIENT_RULE = "QuotientRule"
    COMPOSITION = "Composition"
    AGREEMENT = "Agreement"
    COMPARISON = "Comparison"
    SQUEEZE = "Squeeze"
    ONE_SIDED_EQUIV = "OneSidedEquiv"
    SEQUENTIAL = "Sequential"


class Status(str, Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    INAPPLICABLE = "Inapplicable"


@dataclass
class TheoremReport:
    """Result of one theorem check.

    Attributes:
        theorem: Which theorem was checked
        status: Holds, Fails or Inapplicable
        lhs: Limit side of the identity, when computed
        rhs: Value side of the identity, when computed
        max_alpha_gap: Largest endpointwise gap over α between lhs and rhs
        notes: Human-readable detail (failed precondition, witness box, ...)
        witness_alpha: α where the gap is largest, for failures
        known_effect: Failure explained by the dependency effect of vertex evaluation
    """

    theorem: Theorem
    status: Status
    lhs: Optional[FuzzyNumber] = None
    rhs: Optional[FuzzyNumber] = None
    max_alpha_gap: Optional[float] = None
    notes: str = ""
    witness_alpha: Optional[float] = None
    known_effect: bool = False

    @property
    def is_failure(self) -> bool:
        return self.status is Status.FAILS and not self.known_effect


def _inapplicable(theorem: Theorem, notes: str) -> TheoremReport:
    return TheoremReport(theorem, Status.INAPPLICABLE, notes=notes)


def _compare(
    theorem: Theorem, lhs: FuzzyNumber, rhs: FuzzyNumber, tol: float, notes: str = ""
) -> TheoremReport:
    gap, alpha = max_alpha_gap(lhs, rhs)
    if gap <= tol:
        return TheoremReport(theorem, Status.HOLDS, lhs, rhs, gap, notes)
    return TheoremReport(theorem, Status.FAILS, lhs, rhs, gap, notes, witness_alpha=alpha)


def _approach(at: At) -> ApproachSpec:
    return at if isinstance(at, ApproachSpec) else ApproachSpec(at)


def _describe(result: LimitResult) -> str:
    if result.error is not None and result.outcome is Outcome.UNDETERMINED:
        return f"{result} ({result.error.message})"
    return str(result)


# ============================================================================
# Hypothesis probes
# ============================================================================


def _probe(
    exprs: list[Expr], approach: ApproachSpec, cfg: LimitConfig, mode: EvalMode
) -> tuple[list[tuple[np.ndarray, np.ndarray]], Optional[str]]:
    """Evaluate expressions on the first schedule boxes around the target.

    Returns the per-expression (lo, hi) arrays over all probe boxes, or a note
    describing the first box where some expression cannot be evaluated.
    """
    alphas = cfg.grid.alphas()
    plo, phi = target_cuts(approach, alphas)
    if approach.is_infinite or approach.side is not Side.BOTH:
        sides = [approach.side]
    else:
        sides = [Side.LEFT, Side.RIGHT]
    boxes_lo, boxes_hi, labels = [], [], []
    for side in sides:
        for k in range(HYPOTHESIS_PROBES):
            lo, hi, _ = schedule_boxes(approach, side, k, cfg, plo, phi)
            boxes_lo.append(lo)
            boxes_hi.append(hi)
            labels.extend((side, k, float(alpha)) for alpha in alphas)
    lo, hi = np.concatenate(boxes_lo), np.concatenate(boxes_hi)
    levels = np.tile(alphas, len(boxes_lo))
    results = []
    for expr in exprs:
        batch = evaluate_boxes(expr, lo, hi, levels, mode, APPROACH_ZERO_TOL)
        failure = batch.first_error()
        if failure is not None:
            row, error = failure
            side, k, alpha = labels[row]
            return [], (
                f"{to_text(expr)} fails on probe box [{lo[row]:.6g}, {hi[row]:.6g}] "
                f"(side {side.value}, step {k}, alpha {alpha:g}): {error.message}"
            )
        results.append((batch.lo, batch.hi))
    return results, None


def _probe_slack(*arrays: np.ndarray) -> np.ndarray:
    magnitude = np.max(np.abs(np.stack(arrays)), axis=0)
    return HYPOTHESIS_TOL * np.maximum(1.0, magnitude)


# ============================================================================
# Individual checks
# ============================================================================


def check_limit_algebra(
    f: Expr,
    g: Expr,
    scalar: FuzzyNumber,
    at: At,
    cfg: Optional[LimitConfig] = None,
    mode: EvalMode = DEFAULT_MODE,
) -> list[TheoremReport]:
    """Sum, scalar, product and quotient rules for limits.

    Each rule compares the limit of the combined expression against the
    level-wise interval operation on the separate limits.
    """
    cfg = cfg or LimitConfig()
    approach = _approach(at)
    tol = cfg.suite_tolerance
    limit_f = fuzzy_limit(f, approach, mode, cfg)
    limit_g = fuzzy_limit(g, approach, mode, cfg)
    rules = (Theorem.SUM_RULE, Theorem.SCALAR_RULE, Theorem.PRODUCT_RULE, Theorem.QUOTIENT_RULE)
    if limit_f.value is None or limit_g.value is None:
        notes = f"lim f: {_describe(limit_f)}; lim g: {_describe(limit_g)}"
        return [_inapplicable(rule, notes) for rule in rules]
    lf, lg = limit_f.value, limit_g.value

    def rule(theorem: Theorem, combined: Expr, rhs: FuzzyNumber) -> TheoremReport:
        limit = fuzzy_limit(combined, approach, mode, cfg)
        if limit.value is None:
            report = TheoremReport(
                theorem, Status.FAILS, rhs=rhs, notes=f"combined limit: {_describe(limit)}"
            )
        else:
            report = _compare(theorem, limit.value, rhs, tol)
        if report.status is Status.FAILS and mode.is_vertex and theorem in (
            Theorem.PRODUCT_RULE,
            Theorem.QUOTIENT_RULE,
        ):
            report.known_effect = True
            report.notes = (report.notes + "; " if report.notes else "") + (
                "vertex evaluation dependency effect"
            )
        return report

    reports = [
        rule(Theorem.SUM_RULE, Add(f, g), fuzzy_binary(lf, lg, "add")),
        rule(Theorem.SCALAR_RULE, Mul(Const(scalar), f), fuzzy_scale(scalar, lf)),
        rule(Theorem.PRODUCT_RULE, Mul(f, g), fuzzy_binary(lf, lg, "mul")),
    ]
    if np.any(contains_zero(lg.lo, lg.hi)):
        reports.append(_inapplicable(Theorem.QUOTIENT_RULE, f"lim g = {lg!r} has a cut containing 0"))
    else:
        reports.append(rule(Theorem.QUOTIENT_RULE, Div(f, g), fuzzy_binary(lf, lg, "div")))
    return reports


def check_composition(
    f: Expr,
    g: Expr,
    at: At,
    cfg: Optional[LimitConfig] = None,
    mode: EvalMode = DEFAULT_MODE,
) -> TheoremReport:
    """lim f(g(x)) = f(lim g(x)) for f continuous at the inner limit."""
    cfg = cfg or LimitConfig()
    approach = _approach(at)
    inner = fuzzy_limit(g, approach, mode, cfg)
    if inner.value is None:
        return _inapplicable(Theorem.COMPOSITION, f"lim g: {_describe(inner)}")
    composite = substitute(f, g)
    if mode.is_vertex and count_indices(composite, mode.indexing) > MAX_INDICES:
        return _inapplicable(
            Theorem.COMPOSITION,
            f"{to_text(composite)} needs more than {MAX_INDICES} vertex indices",
        )
    try:
        rhs = eval_fuzzy(f, inner.value, mode)
    except EvaluationError as e:
        return _inapplicable(Theorem.COMPOSITION, f"f(lim g) cannot be evaluated: {e.message}")
    outer = fuzzy_limit(composite, approach, mode, cfg)
    if outer.value is None:
        return TheoremReport(
            Theorem.COMPOSITION,
            Status.INAPPLICABLE,
            rhs=rhs,
            notes=f"lim f(g): {_describe(outer)}; f is not continuous at lim g",
        )
    return _compare(Theorem.COMPOSITION, outer.value, rhs, cfg.suite_tolerance)


def check_agreement(
    f: Expr,
    g: Expr,
    at: At,
    cfg: Optional[LimitConfig] = None,
    mode: EvalMode = DEFAULT_MODE,
) -> TheoremReport:
    """Functions that agree near the target (target excluded) have the same limit."""
    cfg = cfg or LimitConfig()
    approach = _approach(at)
    probes, failure = _probe([f, g], approach, cfg, mode)
    if failure is not None:
        return _inapplicable(Theorem.AGREEMENT, failure)
    (flo, fhi), (glo, ghi) = probes
    differs = (np.abs(flo - glo) > _probe_slack(flo, glo)) | (
        np.abs(fhi - ghi) > _probe_slack(fhi, ghi)
    )
    if np.any(differs):
        row = int(np.flatnonzero(differs)[0])
        return _inapplicable(
            Theorem.AGREEMENT,
            f"f and g differ near the target: [{flo[row]:.6g}, {fhi[row]:.6g}] "
            f"vs [{glo[row]:.6g}, {ghi[row]:.6g}]",
        )
    limit_g = fuzzy_limit(g, approach, mode, cfg)
    if limit_g.value is None:
        return _inapplicable(Theorem.AGREEMENT, f"lim g: {_describe(limit_g)}")
    limit_f = fuzzy_limit(f, approach, mode, cfg)
    if limit_f.value is None:
        return TheoremReport(
            Theorem.AGREEMENT, Status.FAILS, rhs=limit_g.value, notes=f"lim f: {_describe(limit_f)}"
        )
    return _compare(Theorem.AGREEMENT, limit_f.value, limit_g.value, cfg.suite_tolerance)


def _order_violation(lower: FuzzyNumber, upper: FuzzyNumber) -> tuple[float, float]:
    """How far ``lower`` rises above ``upper`` at worst, and where."""
    lo, hi = upper.cuts_at(lower.alphas)
    excess = np.maximum(np.maximum(lower.lo - lo, lower.hi - hi), 0.0)
    index = int(np.argmax(excess))
    return float(excess[index]), float(lower.alphas[index])


def check_order_theorems(
    f: Expr,
    g: Expr,
    h: Optional[Expr],
    at: At,
    cfg: Optional[LimitConfig] = None,
    mode: EvalMode = DEFAULT_MODE,
) -> list[TheoremReport]:
    """Comparison (f ≤ g near the target ⟹ lim f ≤ lim g) and, with ``h``, squeeze.

    The order hypotheses are checked on probe boxes around the target.
    """
    cfg = cfg or LimitConfig()
    approach = _approach(at)
    tol = cfg.suite_tolerance
    exprs = [f, g] if h is None else [f, g, h]
    probes, failure = _probe(exprs, approach, cfg, mode)
    reports: list[TheoremReport] = []

    def below(lower: tuple[np.ndarray, np.ndarray], upper: tuple[np.ndarray, np.ndarray]) -> bool:
        slack_lo = _probe_slack(lower[0], upper[0])
        slack_hi = _probe_slack(lower[1], upper[1])
        return bool(np.all(lower[0] <= upper[0] + slack_lo) and np.all(lower[1] <= upper[1] + slack_hi))

    limit_f = fuzzy_limit(f, approach, mode, cfg)
    limit_g = fuzzy_limit(g, approach, mode, cfg)
    if failure is not None:
        reports.append(_inapplicable(Theorem.COMPARISON, failure))
    elif not below(probes[0], probes[1]):
        reports.append(_inapplicable(Theorem.COMPARISON, "f <= g does not hold near the target"))
    elif limit_f.value is None or limit_g.value is None:
        reports.append(
            _inapplicable(
                Theorem.COMPARISON, f"lim f: {_describe(limit_f)}; lim g: {_describe(limit_g)}"
            )
        )
    else:
        excess, alpha = _order_violation(limit_f.value, limit_g.value)
        holds = fuzzy_leq(limit_f.value, limit_g.value, tol=tol)
        reports.append(
            TheoremReport(
                Theorem.COMPARISON,
                Status.HOLDS if holds else Status.FAILS,
                limit_f.value,
                limit_g.value,
                excess,
                "max_alpha_gap is the largest excess of lim f over lim g",
                None if holds else alpha,
            )
        )

    if h is None:
        return reports
    if failure is not None:
        reports.append(_inapplicable(Theorem.SQUEEZE, failure))
        return reports
    if not (below(probes[0], probes[2]) and below(probes[2], probes[1])):
        reports.append(_inapplicable(Theorem.SQUEEZE, "f <= h <= g does not hold near the target"))
        return reports
    if limit_f.value is None or limit_g.value is None:
        reports.append(
            _inapplicable(Theorem.SQUEEZE, f"lim f: {_describe(limit_f)}; lim g: {_describe(limit_g)}")
        )
        return reports
    gap, _ = max_alpha_gap(limit_f.value, limit_g.value)
    if gap > tol:
        reports.append(_inapplicable(Theorem.SQUEEZE, f"lim f and lim g differ by {gap:.3g}"))
        return reports
    limit_h = fuzzy_limit(h, approach, mode, cfg)
    if limit_h.value is None:
        reports.append(
            TheoremReport(
                Theorem.SQUEEZE, Status.FAILS, rhs=limit_f.value, notes=f"lim h: {_describe(limit_h)}"
            )
        )
    else:
        reports.append(_compare(Theorem.SQUEEZE, limit_h.value, limit_f.value, tol))
    return reports


def _alternate_config(cfg: LimitConfig, h0: float, ratio: float) -> LimitConfig:
    """Schedule (h0, ratio) run long enough to reach the final offset of ``cfg``."""
    final = cfg.h0 * cfg.ratio**cfg.max_steps
    steps = max(cfg.max_steps, math.ceil(math.log(final / h0) / math.log(ratio)))
    alternate = cfg.with_schedule(h0, ratio)
    return LimitConfig(
        h0=alternate.h0,
        ratio=alternate.ratio,
        max_steps=steps,
        tol=cfg.tol,
        blowup=cfg.blowup,
        grid=cfg.grid,
        certify_probes=cfg.certify_probes,
    )


def _same_limit(first: LimitResult, second: LimitResult, tol: float) -> tuple[bool, Optional[float]]:
    if first.value is not None and second.value is not None:
        gap, _ = max_alpha_gap(first.value, second.value)
        return gap <= tol, gap
    return (first.outcome is second.outcome and first.reason is second.reason), None


def check_uniqueness_and_sides(
    expr: Expr,
    at: At,
    cfg: Optional[LimitConfig] = None,
    mode: EvalMode = DEFAULT_MODE,
) -> list[TheoremReport]:
    """Schedule independence of the limit, and two-sided ⟺ matching one-sided limits."""
    cfg = cfg or LimitConfig()
    approach = _approach(at)
    tol = cfg.suite_tolerance
    reports: list[TheoremReport] = []

    (h0, ratio), (h0_alt, ratio_alt) = UNIQUENESS_SCHEDULES
    first = fuzzy_limit(expr, approach, mode, cfg.with_schedule(h0, ratio))
    second = fuzzy_limit(expr, approach, mode, _alternate_config(cfg, h0_alt, ratio_alt))
    notes = f"schedules ({h0}, {ratio}): {first}; ({h0_alt}, {ratio_alt}): {second}"
    if Outcome.UNDETERMINED in (first.outcome, second.outcome):
        reports.append(_inapplicable(Theorem.UNIQUENESS, notes))
    else:
        agree, gap = _same_limit(first, second, tol)
        if first.value is not None and second.value is not None:
            report = _compare(Theorem.UNIQUENESS, first.value, second.value, tol, notes)
        else:
            report = TheoremReport(
                Theorem.UNIQUENESS, Status.HOLDS if agree else Status.FAILS, max_alpha_gap=gap, notes=notes
            )
        reports.append(report)

    if approach.is_infinite:
        reports.append(_inapplicable(Theorem.ONE_SIDED_EQUIV, "no one-sided approach at infinity"))
        return reports
    both = fuzzy_limit(expr, approach.with_side(Side.BOTH), mode, cfg)
    left = fuzzy_limit(expr, approach.with_side(Side.LEFT), mode, cfg)
    right = fuzzy_limit(expr, approach.with_side(Side.RIGHT), mode, cfg)
    notes = f"both: {both}; left: {left}; right: {right}"
    if Outcome.UNDETERMINED in (left.outcome, right.outcome):
        reports.append(_inapplicable(Theorem.ONE_SIDED_EQUIV, notes))
        return reports
    sides_agree, gap = _same_limit(left, right, tol)
    sides_converge = left.value is not None and right.value is not None
    both_converged = both.value is not None
    mismatch = both.outcome is Outcome.NO_LIMIT and both.reason is NoLimitReason.ONE_SIDED_MISMATCH
    one_sided_no_limit = Outcome.NO_LIMIT in (left.outcome, right.outcome)
    consistent = both_converged == (sides_converge and sides_agree) and (
        one_sided_no_limit or mismatch == (not sides_agree)
    )
    if both_converged and sides_converge:
        assert both.value is not None and left.value is not None and right.value is not None
        gap = max(max_alpha_gap(both.value, left.value)[0], max_alpha_gap(both.value, right.value)[0])
        consistent = consistent and gap <= tol
    reports.append(
        TheoremReport(
            Theorem.ONE_SIDED_EQUIV,
            Status.HOLDS if consistent else Status.FAILS,
            both.value,
            None,
            gap,
            notes,
        )
    )
    return reports


def check_sequential(
    expr: Expr,
    at: At,
    cfg: Optional[LimitConfig] = None,
    mode: EvalMode = DEFAULT_MODE,
    n_seqs: int = 20,
    seed: Optional[int] = None,
) -> TheoremReport:
    """Sequential criterion: every fuzzy sequence tending to the point maps onto the limit."""
    cfg = cfg or LimitConfig()
    approach = _approach(at)
    if approach.is_infinite or approach.side is not Side.BOTH:
        return _inapplicable(Theorem.SEQUENTIAL, "needs a two-sided finite target")
    limit = fuzzy_limit(expr, approach, mode, cfg)
    if limit.value is None:
        return _inapplicable(Theorem.SEQUENTIAL, f"limit: {_describe(limit)}")
    assert isinstance(approach.target, FuzzyNumber)
    report = sequential_check(expr, approach.target, limit.value, n_seqs, cfg, mode, seed)
    notes = f"{n_seqs} sequences up to term {report.terms}, seed {seed}"
    if report.passed:
        return TheoremReport(Theorem.SEQUENTIAL, Status.HOLDS, limit.value, notes=notes)
    worst = report.violations[0]
    return TheoremReport(
        Theorem.SEQUENTIAL,
        Status.FAILS,
        limit.value,
        max_alpha_gap=worst.gap,
        notes=f"{notes}; {len(report.violations)} violating sequence(s)",
        witness_alpha=worst.alpha,
    )


# ============================================================================
# Fixtures and suites
# ============================================================================


@dataclass(frozen=True)
class Fixture:
    """A worked limit example with its known outcome."""

    name: str
    expr: str
    approach: ApproachSpec
    expected: Outcome
    value: Optional[FuzzyNumber] = None
    reason: Optional[NoLimitReason] = None


def builtin_fixtures(cfg: Optional[LimitConfig] = None) -> list[Fixture]:
    """Worked limit examples used by the built-in suites."""
    grid = (cfg or LimitConfig()).grid
    one, zero = from_singleton(1.0, grid), from_singleton(0.0, grid)
    triangle = from_triangular(0.0, 0.5, 1.0, grid)
    pole = from_triangular(1 / 4, 1 / 3, 1 / 2, grid)
    boundary = from_triangular(1 / 6, 1 / 5, 1 / 4, grid)
    return [
        Fixture(
            "cubic-quotient-at-triangle",
            "(x^3 - 4)/(x^2 + 1)",
            ApproachSpec(triangle),
            Outcome.CONVERGED,
        ),
        Fixture(
            "fuzzy-shift-at-triangle",
            "x + (1, 2, 3)",
            ApproachSpec(triangle),
            Outcome.CONVERGED,
            from_triangular(1.0, 2.5, 4.0, grid),
        ),
        Fixture(
            "quadratic-at-one",
            "x^2 + x - 3",
            ApproachSpec(one),
            Outcome.CONVERGED,
            from_singleton(-1.0, grid),
        ),
        Fixture(
            "exp-reciprocal-from-left",
            "exp(1/x)",
            ApproachSpec(zero, Side.LEFT),
            Outcome.CONVERGED,
            from_singleton(0.0, grid),
        ),
        Fixture("exp-reciprocal-from-right", "exp(1/x)", ApproachSpec(zero, Side.RIGHT), Outcome.DIVERGES_PLUS),
        Fixture(
            "sign-of-sine-at-zero",
            "abs(sin(x))/sin(x)",
            ApproachSpec(zero),
            Outcome.NO_LIMIT,
            reason=NoLimitReason.ONE_SIDED_MISMATCH,
        ),
        Fixture(
            "piecewise-at-one",
            "{2*x + 1 if x > 1 ; 5 if x == 1 ; 7*x^2 - 4 if x < 1}",
            ApproachSpec(one),
            Outcome.CONVERGED,
            from_singleton(3.0, grid),
        ),
        Fixture(
            "rational-at-plus-infinity",
            "(2*x^2 - 1)/(1 - x^2)",
            ApproachSpec(Infinity.PLUS),
            Outcome.CONVERGED,
            from_singleton(-2.0, grid),
        ),
        Fixture(
            "reciprocal-at-plus-infinity",
            "1/x",
            ApproachSpec(Infinity.PLUS),
            Outcome.CONVERGED,
            from_singleton(0.0, grid),
        ),
        Fixture(
            "reciprocal-at-minus-infinity",
            "1/x",
            ApproachSpec(Infinity.MINUS),
            Outcome.CONVERGED,
            from_singleton(0.0, grid),
        ),
        Fixture("reciprocal-square-at-zero", "1/x^2", ApproachSpec(zero), Outcome.DIVERGES_PLUS),
        Fixture(
            "rational-pole-from-left",
            "(x + 2)/(2*x^2 - 3*x + 1)",
            ApproachSpec(one, Side.LEFT),
            Outcome.DIVERGES_MINUS,
        ),
        Fixture(
            "shifted-reciprocal-at-triangle",
            "1/(x - (1/4, 1/3, 1/2))",
            ApproachSpec(pole),
            Outcome.UNDETERMINED,
        ),
        Fixture(
            "shifted-reciprocal-at-core",
            "1/(x - 1/3)",
            ApproachSpec(from_singleton(1 / 3, grid)),
            Outcome.NO_LIMIT,
            reason=NoLimitReason.ONE_SIDED_MISMATCH,
        ),
        Fixture(
            "piecewise-fuzzy-boundary-from-right",
            FUZZY_BOUNDARY_PIECEWISE,
            ApproachSpec(boundary, Side.RIGHT),
            Outcome.CONVERGED,
            from_triangular(1 / 36, 1 / 25, 1 / 16, grid),
        ),
        Fixture(
            "piecewise-fuzzy-boundary",
            FUZZY_BOUNDARY_PIECEWISE,
            ApproachSpec(boundary),
            Outcome.NO_LIMIT,
            reason=NoLimitReason.NON_NESTED,
        ),
    ]


@dataclass(frozen=True)
class SuiteOverrides:
    """User supplied expressions replacing the built-in cases of a suite."""

    f: Optional[str] = None
    g: Optional[str] = None
    h: Optional[str] = None
    at: Optional[ApproachSpec] = None
    scalar: Optional[FuzzyNumber] = None

    @property
    def empty(self) -> bool:
        return self.f is None and self.g is None and self.h is None and self.at is None


def _expr(text: str, cfg: LimitConfig) -> Expr:
    return parse(text, cfg.grid)


def _default_scalar(cfg: LimitConfig) -> FuzzyNumber:
    return from_triangular(1.0, 2.0, 3.0, cfg.grid)


def _algebra_cases(cfg: LimitConfig) -> list[tuple[str, str, ApproachSpec]]:
    one = ApproachSpec(from_singleton(1.0, cfg.grid))
    return [
        ("x^2", "x", one),
        ("x^2 + 1", "x - 1", one),
        ("(1, 2, 3)*x^2 + x", "x - 3", one),
    ]


def _order_cases(cfg: LimitConfig) -> list[tuple[str, str, Optional[str], ApproachSpec]]:
    zero = ApproachSpec(from_singleton(0.0, cfg.grid))
    return [
        ("x", "x + 1", None, zero),
        ("-x^2", "x^2", "x^2*sin(1/x)", zero),
    ]


def _composition_cases(cfg: LimitConfig) -> list[tuple[str, str, ApproachSpec]]:
    one = from_singleton(1.0, cfg.grid)
    zero = from_singleton(0.0, cfg.grid)
    return [
        ("u^2", "x + 1", ApproachSpec(one)),
        ("sqrt(u)", "x^2 + 3", ApproachSpec(one)),
        ("exp(u)", "1/x", ApproachSpec(zero, Side.LEFT)),
    ]


def _agreement_cases(cfg: LimitConfig) -> list[tuple[str, str, ApproachSpec]]:
    one = ApproachSpec(from_singleton(1.0, cfg.grid))
    return [("(x^2 - 1)/(x - 1)", "x + 1", one)]


def run_suite(
    name: str,
    overrides: Optional[SuiteOverrides] = None,
    seed: Optional[int] = None,
    cfg: Optional[LimitConfig] = None,
    mode: EvalMode = DEFAULT_MODE,
) -> Iterator[TheoremReport]:
    """Yield the reports of a named suite.

    Suites: ``algebra``, ``order``, ``composition``, ``uniqueness`` (which
    also runs the agreement and sequential checks) and ``all``. Without
    overrides the built-in cases run; with them the suite runs once on the
    given expressions (``at`` defaults to the singleton 0).

    Raises:
        InvalidValueError: On an unknown suite name
    """
    if name not in SUITES:
        raise InvalidValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    cfg = cfg or LimitConfig()
    overrides = overrides or SuiteOverrides()
    selected = ("uniqueness", "algebra", "order", "composition") if name == "all" else (name,)
    scalar = overrides.scalar or _default_scalar(cfg)
    at = overrides.at or ApproachSpec(from_singleton(0.0, cfg.grid))
    custom = not overrides.empty
    logger.info("running suite %s (mode %s, custom=%s)", name, mode, custom)

    for suite in selected:
        if suite == "uniqueness":
            if custom and overrides.f is not None:
                f = _expr(overrides.f, cfg)
                yield from check_uniqueness_and_sides(f, at, cfg, mode)
                yield check_sequential(f, at, cfg, mode, seed=seed)
                if overrides.g is not None:
                    yield check_agreement(f, _expr(overrides.g, cfg), at, cfg, mode)
                continue
            if custom:
                continue
            for index, fixture in enumerate(builtin_fixtures(cfg)):
                expr = _expr(fixture.expr, cfg)
                yield from check_uniqueness_and_sides(expr, fixture.approach, cfg, mode)
                if fixture.expected is Outcome.CONVERGED and not fixture.approach.is_infinite:
                    sequence_seed = None if seed is None else seed + index
                    yield check_sequential(expr, fixture.approach, cfg, mode, seed=sequence_seed)
            for f_text, g_text, approach in _agreement_cases(cfg):
                yield check_agreement(_expr(f_text, cfg), _expr(g_text, cfg), approach, cfg, mode)
        elif suite == "algebra":
            cases = (
                [(overrides.f, overrides.g, at)]
                if custom
                else _algebra_cases(cfg)
            )
            for f_text, g_text, approach in cases:
                if f_text is None or g_text is None:
                    continue
                yield from check_limit_algebra(
                    _expr(f_text, cfg), _expr(g_text, cfg), scalar, approach, cfg, mode
                )
        elif suite == "order":
            order_cases = (
                [(overrides.f, overrides.g, overrides.h, at)] if custom else _order_cases(cfg)
            )
            for f_text, g_text, h_text, approach in order_cases:
                if f_text is None or g_text is None:
                    continue
                h = _expr(h_text, cfg) if h_text is not None else None
                yield from check_order_theorems(
                    _expr(f_text, cfg), _expr(g_text, cfg), h, approach, cfg, mode
                )
        else:
            cases = (
                [(overrides.f, overrides.g, at)] if custom else _composition_cases(cfg)
            )
            for f_text, g_text, approach in cases:
                if f_text is None or g_text is None:
                    continue
                yield check_composition(_expr(f_text, cfg), _expr(g_text, cfg), approach, cfg, mode)


# ============================================================================
# Randomized campaign
# ============================================================================


@dataclass
class CampaignSummary:
    """Tally of a randomized limit-algebra campaign.

    ``failures`` holds the reports that count against the theorems;
    dependency-effect deviations of vertex evaluation go to ``known_effects``.
    """

    cases: int
    seed: Optional[int]
    counts: dict[str, dict[str, int]] = field(default_factory=dict)
    failures: list[TheoremReport] = field(default_factory=list)
    known_effects: list[TheoremReport] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def record(self, report: TheoremReport, mode: EvalMode) -> None:
        tally = self.counts.setdefault(f"{report.theorem.value}[{mode}]", {})
        tally[report.status.value] = tally.get(report.status.value, 0) + 1
        if report.is_failure:
            self.failures.append(report)
        elif report.status is Status.FAILS:
            self.known_effects.append(report)


def random_polynomial(rng: np.random.Generator, cfg: LimitConfig, degree: int = 4) -> Expr:
    """Polynomial of degree at most ``degree``; each coefficient is triangular with probability 1/2."""
    terms: list[Expr] = []
    for power in range(rng.integers(0, degree + 1) + 1):
        centre = float(np.round(rng.uniform(-2.0, 2.0), 3))
        if rng.random() < 0.5:
            left, right = np.round(rng.uniform(0.0, 1.0, 2), 3)
            coefficient = from_triangular(centre - left, centre, centre + right, cfg.grid)
        else:
            coefficient = from_singleton(centre, cfg.grid)
        factor: Expr = Const(coefficient)
        if power:
            factor = Mul(factor, PowInt(Var(), power) if power > 1 else Var())
        terms.append(factor)
    expr = terms[0]
    for term in terms[1:]:
        expr = Add(expr, term)
    return expr


def algebra_campaign(
    n_cases: int = 100,
    seed: Optional[int] = None,
    cfg: Optional[LimitConfig] = None,
    depth: int = 2,
) -> CampaignSummary:
    """Check the limit algebra on random polynomial pairs at random singleton points.

    All four rules run with vertex evaluation, where product and quotient
    deviations count as known dependency effects; product and quotient rules
    run again with subdivision, where they must hold.
    """
    base = cfg or LimitConfig()
    rng = np.random.default_rng(seed)
    summary = CampaignSummary(cases=n_cases, seed=seed)
    vertex, rigorous = EvalMode.paper_vertex(), EvalMode.rigorous(depth)
    for case in range(n_cases):
        case_cfg = base.with_grid(int(rng.integers(5, 12)))
        f = random_polynomial(rng, case_cfg)
        g = random_polynomial(rng, case_cfg)
        centre = float(np.round(rng.uniform(-1.5, 1.5), 3))
        approach = ApproachSpec(from_singleton(centre, case_cfg.grid))
        left, right = np.round(rng.uniform(0.0, 1.0, 2), 3)
        scalar = from_triangular(1.0 - left, 1.0, 1.0 + right, case_cfg.grid)
        try:
            for report in check_limit_algebra(f, g, scalar, approach, case_cfg, vertex):
                summary.record(report, vertex)
            for report in check_limit_algebra(f, g, scalar, approach, case_cfg, rigorous)[2:]:
                summary.record(report, rigorous)
        except FuzzyLimitError as e:
            logger.warning("campaign case %d raised %s", case, e)
            summary.failures.append(
                TheoremReport(Theorem.SUM_RULE, Status.FAILS, notes=f"case {case} raised: {e}")
            )
    logger.info(
        "algebra campaign: %d cases, %d failures, %d known effects",
        n_cases,
        len(summary.failures),
        len(summary.known_effects),
    )
    return summary


# ============================================================================
# Suite facade
# ============================================================================


class TheoremSuite:
    """Theorem checks bound to one configuration and evaluation mode.

    Example:
        >>> suite = TheoremSuite(LimitConfig())
        >>> [r.status for r in suite.uniqueness("x^2 + x - 3", from_singleton(1))]
        [<Status.HOLDS: 'Holds'>, <Status.HOLDS: 'Holds'>]
    """

    def __init__(self, config: LimitConfig, mode: EvalMode = DEFAULT_MODE):
        """Initialize the suite.

        Args:
            config: LimitConfig instance
            mode: Evaluation mode for every limit
        """
        self._config = config
        self._mode = mode

    def _expr(self, expr: ExprLike) -> Expr:
        return _expr(expr, self._config) if isinstance(expr, str) else expr

    def algebra(self, f: ExprLike, g: ExprLike, scalar: FuzzyNumber, at: At) -> list[TheoremReport]:
        return check_limit_algebra(self._expr(f), self._expr(g), scalar, at, self._config, self._mode)

    def composition(self, f: ExprLike, g: ExprLike, at: At) -> TheoremReport:
        return check_composition(self._expr(f), self._expr(g), at, self._config, self._mode)

    def agreement(self, f: ExprLike, g: ExprLike, at: At) -> TheoremReport:
        return check_agreement(self._expr(f), self._expr(g), at, self._config, self._mode)

    def order(self, f: ExprLike, g: ExprLike, h: Optional[ExprLike], at: At) -> list[TheoremReport]:
        h_expr = self._expr(h) if h is not None else None
        return check_order_theorems(
            self._expr(f), self._expr(g), h_expr, at, self._config, self._mode
        )

    def uniqueness(self, expr: ExprLike, at: At) -> list[TheoremReport]:
        return check_uniqueness_and_sides(self._expr(expr), at, self._config, self._mode)

    def sequential(self, expr: ExprLike, at: At, n_seqs: int = 20, seed: Optional[int] = None) -> TheoremReport:
        return check_sequential(self._expr(expr), at, self._config, self._mode, n_seqs, seed)

    def run(
        self, name: str, overrides: Optional[SuiteOverrides] = None, seed: Optional[int] = None
    ) -> Iterator[TheoremReport]:
        return run_suite(name, overrides, seed, self._config, self._mode)

    def campaign(self, n_cases: int = 100, seed: Optional[int] = None) -> CampaignSummary:
        return algebra_campaign(n_cases, seed, self._config)
