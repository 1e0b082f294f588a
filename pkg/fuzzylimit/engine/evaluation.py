"""
Whole-expression evaluation over α-cut boxes.

Many boxes (one per row, each tagged with the α-level its fuzzy constants are
cut at) are evaluated at once. Errors are collected per row instead of being
raised, so a schedule step where a few boxes leave the domain still yields
the others.

PaperVertex evaluation broadcasts the scalar expression over all endpoint
assignments: every enumeration index is an array axis of length two, and a
row's range is the min/max over those axes.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from fuzzylimit.exceptions import (
    DivisionByZeroIntervalError,
    DomainViolationError,
    EvaluationError,
    NestednessError,
    OccurrenceCapError,
    PreconditionError,
)
from fuzzylimit.engine.intervals import (
    DEFAULT_MODE,
    POINT_FUNCTIONS,
    UNARY_ARRAYS,
    ZERO_TOL,
    EvalMode,
    ModeKind,
    add_arrays,
    contains_zero,
    div_arrays,
    mul_arrays,
    neg_arrays,
    range_power,
    sub_arrays,
)
from fuzzylimit.expr import (
    Add,
    Comparison,
    Const,
    Div,
    Expr,
    Guard,
    Indexing,
    Mul,
    Neg,
    Piecewise,
    PowInt,
    Sub,
    Unary,
    Var,
    count_indices,
    positions,
    to_text,
)
from fuzzylimit.fuzzy import NESTING_SLACK, FuzzyNumber, Interval, from_levels, nesting_violations

logger = logging.getLogger(__name__)

MAX_INDICES = 20
# Upper bound on rows × vertices materialized per node at once.
CHUNK_ELEMENTS = 1 << 22
EQ_GUARD_TOL = 1e-12

EndpointAssignment = tuple[int, ...]


@dataclass
class BoxBatch:
    """Per-row results of a batch evaluation.

    Rows with an error carry NaN bounds and the first error met while
    evaluating them.
    """

    lo: np.ndarray
    hi: np.ndarray
    errors: list[Optional[EvaluationError]]

    @property
    def ok(self) -> np.ndarray:
        return np.array([error is None for error in self.errors], dtype=bool)

    def first_error(self) -> Optional[tuple[int, EvaluationError]]:
        for row, error in enumerate(self.errors):
            if error is not None:
                return row, error
        return None

    def interval(self, row: int) -> Interval:
        error = self.errors[row]
        if error is not None:
            raise error
        return Interval(self.lo[row], self.hi[row])

    def __len__(self) -> int:
        return self.lo.size


@dataclass
class VertexReport:
    """Range of an expression over one box.

    ``attained_at`` holds the endpoint assignments (0 = lower, 1 = upper
    endpoint, one entry per enumeration index) realizing the lower and the
    upper bound; it is empty outside PaperVertex mode.
    """

    result: Interval
    attained_at: list[EndpointAssignment] = field(default_factory=list)
    mode: EvalMode = DEFAULT_MODE


# ============================================================================
# Shared helpers
# ============================================================================


class _ErrorTable:
    """Per-row error codes indexing into a list of raised errors."""

    def __init__(self) -> None:
        self.errors: list[EvaluationError] = []

    def empty(self, rows: int) -> np.ndarray:
        return np.full(rows, -1, dtype=np.int64)

    def flag(self, codes: np.ndarray, mask: np.ndarray, error: EvaluationError) -> np.ndarray:
        if not np.any(mask & (codes < 0)):
            return codes
        self.errors.append(error)
        return np.where((codes < 0) & mask, len(self.errors) - 1, codes)

    def resolve(self, codes: np.ndarray) -> list[Optional[EvaluationError]]:
        return [self.errors[code] if code >= 0 else None for code in codes]


def _merge(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    return np.where(first >= 0, first, second)


def guard_mask(guard: Guard, lo: np.ndarray, hi: np.ndarray, alphas: np.ndarray) -> np.ndarray:
    """Rows whose subject range satisfies the guard against the bound's cut at their α.

    ``x < B`` holds for a box when box.hi < B.lo(α), ``x > B`` when
    box.lo > B.hi(α), and ``x == B`` when the box is B's cut.
    """
    blo, bhi = guard.bound.cuts_at(alphas)
    with np.errstate(invalid="ignore"):
        if guard.op is Comparison.LT:
            return hi < blo
        if guard.op is Comparison.GT:
            return lo > bhi
        scale = EQ_GUARD_TOL * np.maximum(1.0, np.maximum(np.abs(blo), np.abs(bhi)))
        return (np.abs(lo - blo) <= scale) & (np.abs(hi - bhi) <= scale)


def _divisor_error(node: Div) -> DivisionByZeroIntervalError:
    text = to_text(node.right)
    return DivisionByZeroIntervalError(f"divisor {text} contains zero", text)


def _sqrt_error(node: Unary) -> DomainViolationError:
    return DomainViolationError("sqrt of a range reaching below zero", to_text(node))


def _branch_error(node: Piecewise) -> DomainViolationError:
    return DomainViolationError("no piecewise branch applies on the box", to_text(node))


# ============================================================================
# PaperVertex
# ============================================================================


class _VertexEvaluator:
    """Broadcast evaluation over all endpoint assignments."""

    def __init__(
        self,
        expr: Expr,
        lo: np.ndarray,
        hi: np.ndarray,
        alphas: np.ndarray,
        indexing: Indexing,
        zero_tol: float = ZERO_TOL,
    ):
        self.expr = expr
        self.zero_tol = zero_tol
        self.lo, self.hi, self.alphas = lo, hi, alphas
        self.rows = lo.size
        self.indexing = indexing
        self.axes = count_indices(expr, indexing)
        self.table = _ErrorTable()
        self._fresh = positions(expr) if indexing is Indexing.POSITIONAL else 0

    def _shape(self, axis: Optional[int]) -> tuple[int, ...]:
        shape = [self.rows] + [1] * self.axes
        if axis is not None:
            shape[axis + 1] = 2
        return tuple(shape)

    def _leaf(self, lo: np.ndarray, hi: np.ndarray, axis: int) -> np.ndarray:
        return np.stack([lo, hi], axis=1).reshape(self._shape(axis))

    def _constant(self, value: float) -> np.ndarray:
        return np.full(self._shape(None), value)

    def _next_axis(self) -> int:
        axis = self._fresh
        self._fresh += 1
        return axis

    def row_range(self, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        flat = np.broadcast_to(values, (self.rows,) + values.shape[1:]).reshape(self.rows, -1)
        return flat.min(axis=1), flat.max(axis=1)

    def _row_mask(self, mask: np.ndarray) -> np.ndarray:
        return mask.reshape(self._shape(None))

    def run(self) -> tuple[np.ndarray, np.ndarray]:
        values, codes = self.eval(self.expr, 0)
        return values, codes

    def eval(self, node: Expr, offset: int) -> tuple[np.ndarray, np.ndarray]:
        codes = self.table.empty(self.rows)
        if isinstance(node, Var):
            axis = offset if self.indexing is Indexing.POSITIONAL else self._next_axis()
            return self._leaf(self.lo, self.hi, axis), codes
        if isinstance(node, Const):
            number = node.value
            if number.is_crisp:
                return self._constant(float(number.lo[-1])), codes
            clo, chi = number.cuts_at(self.alphas)
            return self._leaf(clo, chi, self._next_axis()), codes
        if isinstance(node, Neg):
            values, codes = self.eval(node.operand, offset)
            return -values, codes
        if isinstance(node, PowInt):
            return self._power(node, offset)
        if isinstance(node, (Add, Sub, Mul, Div)):
            left, lcodes = self.eval(node.left, offset)
            right, rcodes = self.eval(node.right, offset)
            codes = _merge(lcodes, rcodes)
            with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
                if isinstance(node, Add):
                    return left + right, codes
                if isinstance(node, Sub):
                    return left - right, codes
                if isinstance(node, Mul):
                    return left * right, codes
                bad = contains_zero(*self.row_range(right), self.zero_tol)
                codes = self.table.flag(codes, bad, _divisor_error(node))
                return left / np.where(self._row_mask(bad), np.nan, right), codes
        if isinstance(node, Unary):
            values, codes = self.eval(node.operand, offset)
            if node.func == "sqrt":
                bad = self.row_range(values)[0] < 0.0
                codes = self.table.flag(codes, bad, _sqrt_error(node))
                values = np.where(self._row_mask(bad), np.nan, values)
            with np.errstate(over="ignore", invalid="ignore"):
                return POINT_FUNCTIONS[node.func](values), codes
        if isinstance(node, Piecewise):
            return self._piecewise(node, offset)
        raise PreconditionError(f"not an expression node: {node!r}")

    def _power(self, node: PowInt, offset: int) -> tuple[np.ndarray, np.ndarray]:
        codes = self.table.empty(self.rows)
        if node.exponent == 0:
            return self._constant(1.0), codes
        stride = positions(node.base)
        result: Optional[np.ndarray] = None
        for copy in range(node.exponent):
            factor, fcodes = self.eval(node.base, offset + copy * stride)
            codes = _merge(codes, fcodes)
            with np.errstate(over="ignore", invalid="ignore"):
                result = factor if result is None else result * factor
        assert result is not None
        return result, codes

    def _piecewise(self, node: Piecewise, offset: int) -> tuple[np.ndarray, np.ndarray]:
        codes = self.table.empty(self.rows)
        chosen = np.zeros(self.rows, dtype=bool)
        result = self._constant(np.nan)
        for guard, branch in node.branches:
            subject, scodes = self.eval(guard.subject, offset)
            values, bcodes = self.eval(branch, offset)
            holds = guard_mask(guard, *self.row_range(subject), self.alphas) & ~chosen
            holds &= scodes < 0
            codes = np.where(scodes >= 0, _merge(codes, scodes), codes)
            codes = np.where(holds, _merge(codes, bcodes), codes)
            result = np.where(self._row_mask(holds), values, result)
            chosen |= holds
        codes = self.table.flag(codes, ~chosen, _branch_error(node))
        return result, codes


def _vertex_batch(
    expr: Expr,
    lo: np.ndarray,
    hi: np.ndarray,
    alphas: np.ndarray,
    indexing: Indexing,
    zero_tol: float = ZERO_TOL,
) -> tuple[np.ndarray, np.ndarray, list[Optional[EvaluationError]]]:
    axes = count_indices(expr, indexing)
    chunk = max(1, CHUNK_ELEMENTS >> axes)
    out_lo, out_hi = np.empty(lo.size), np.empty(lo.size)
    errors: list[Optional[EvaluationError]] = []
    for start in range(0, lo.size, chunk):
        part = slice(start, start + chunk)
        evaluator = _VertexEvaluator(expr, lo[part], hi[part], alphas[part], indexing, zero_tol)
        values, codes = evaluator.run()
        out_lo[part], out_hi[part] = evaluator.row_range(values)
        errors.extend(evaluator.table.resolve(codes))
    return out_lo, out_hi, errors


# ============================================================================
# NaturalInterval and RigorousSubdivide
# ============================================================================


class _NaturalEvaluator:
    """One interval operation per node, integer powers and unary functions by their true range."""

    def __init__(
        self, lo: np.ndarray, hi: np.ndarray, alphas: np.ndarray, zero_tol: float = ZERO_TOL
    ):
        self.lo, self.hi, self.alphas = lo, hi, alphas
        self.zero_tol = zero_tol
        self.rows = lo.size
        self.table = _ErrorTable()

    def eval(self, node: Expr) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        codes = self.table.empty(self.rows)
        if isinstance(node, Var):
            return self.lo, self.hi, codes
        if isinstance(node, Const):
            clo, chi = node.value.cuts_at(self.alphas)
            return clo, chi, codes
        if isinstance(node, Neg):
            lo, hi, codes = self.eval(node.operand)
            return (*neg_arrays(lo, hi), codes)
        if isinstance(node, PowInt):
            lo, hi, codes = self.eval(node.base)
            return (*range_power(lo, hi, node.exponent), codes)
        if isinstance(node, (Add, Sub, Mul, Div)):
            alo, ahi, lcodes = self.eval(node.left)
            blo, bhi, rcodes = self.eval(node.right)
            codes = _merge(lcodes, rcodes)
            with np.errstate(over="ignore", invalid="ignore"):
                if isinstance(node, Add):
                    return (*add_arrays(alo, ahi, blo, bhi), codes)
                if isinstance(node, Sub):
                    return (*sub_arrays(alo, ahi, blo, bhi), codes)
                if isinstance(node, Mul):
                    return (*mul_arrays(alo, ahi, blo, bhi), codes)
            bad = contains_zero(blo, bhi, self.zero_tol)
            codes = self.table.flag(codes, bad, _divisor_error(node))
            return (*div_arrays(alo, ahi, blo, bhi, self.zero_tol), codes)
        if isinstance(node, Unary):
            lo, hi, codes = self.eval(node.operand)
            if node.func == "sqrt":
                codes = self.table.flag(codes, lo < 0.0, _sqrt_error(node))
            return (*UNARY_ARRAYS[node.func](lo, hi), codes)
        if isinstance(node, Piecewise):
            return self._piecewise(node)
        raise PreconditionError(f"not an expression node: {node!r}")

    def _piecewise(self, node: Piecewise) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        codes = self.table.empty(self.rows)
        chosen = np.zeros(self.rows, dtype=bool)
        lo, hi = np.full(self.rows, np.nan), np.full(self.rows, np.nan)
        for guard, branch in node.branches:
            slo, shi, scodes = self.eval(guard.subject)
            blo, bhi, bcodes = self.eval(branch)
            holds = guard_mask(guard, slo, shi, self.alphas) & ~chosen & (scodes < 0)
            codes = np.where(scodes >= 0, _merge(codes, scodes), codes)
            codes = np.where(holds, _merge(codes, bcodes), codes)
            lo, hi = np.where(holds, blo, lo), np.where(holds, bhi, hi)
            chosen |= holds
        codes = self.table.flag(codes, ~chosen, _branch_error(node))
        return lo, hi, codes


def _natural_batch(
    expr: Expr, lo: np.ndarray, hi: np.ndarray, alphas: np.ndarray, zero_tol: float = ZERO_TOL
) -> tuple[np.ndarray, np.ndarray, list[Optional[EvaluationError]]]:
    evaluator = _NaturalEvaluator(lo, hi, alphas, zero_tol)
    out_lo, out_hi, codes = evaluator.eval(expr)
    out_lo = np.broadcast_to(out_lo, lo.shape).astype(float)
    out_hi = np.broadcast_to(out_hi, lo.shape).astype(float)
    return out_lo, out_hi, evaluator.table.resolve(codes)


def _subdivided_batch(
    expr: Expr,
    lo: np.ndarray,
    hi: np.ndarray,
    alphas: np.ndarray,
    depth: int,
    zero_tol: float = ZERO_TOL,
    shared_edges: bool = False,
) -> tuple[np.ndarray, np.ndarray, list[Optional[EvaluationError]]]:
    """Natural evaluation on 2^depth sub-boxes per row, then the hull.

    Rows are split into equal pieces, or with ``shared_edges`` along one
    partition of the hull of all rows clipped to each row. Shared edges put
    every piece of a narrower row inside a piece of any row containing it, so
    nested rows give nested hulls.
    """
    pieces = 1 << depth
    chunk = max(1, CHUNK_ELEMENTS // pieces)
    out_lo, out_hi = np.empty(lo.size), np.empty(lo.size)
    errors: list[Optional[EvaluationError]] = []
    fractions = np.arange(pieces + 1) / pieces
    common: Optional[np.ndarray] = None
    if shared_edges and lo.size:
        low, high = float(lo.min()), float(hi.max())
        common = low + (high - low) * fractions
        common[-1] = high
    for start in range(0, lo.size, chunk):
        part = slice(start, start + chunk)
        plo, phi = lo[part], hi[part]
        if common is None:
            edges = plo[:, None] + (phi - plo)[:, None] * fractions[None, :]
        else:
            edges = np.clip(common[None, :], plo[:, None], phi[:, None])
        edges[:, 0] = plo
        edges[:, -1] = phi
        sub_lo, sub_hi = edges[:, :-1].reshape(-1), edges[:, 1:].reshape(-1)
        sub_alphas = np.repeat(alphas[part], pieces)
        vlo, vhi, sub_errors = _natural_batch(expr, sub_lo, sub_hi, sub_alphas, zero_tol)
        rows = plo.size
        out_lo[part] = vlo.reshape(rows, pieces).min(axis=1)
        out_hi[part] = vhi.reshape(rows, pieces).max(axis=1)
        for row in range(rows):
            found = next(
                (e for e in sub_errors[row * pieces : (row + 1) * pieces] if e is not None), None
            )
            errors.append(found)
    return out_lo, out_hi, errors


# ============================================================================
# Public entry points
# ============================================================================


def evaluate_boxes(
    expr: Expr,
    lo: np.ndarray,
    hi: np.ndarray,
    alphas: np.ndarray,
    mode: EvalMode = DEFAULT_MODE,
    zero_tol: float = ZERO_TOL,
    shared_edges: bool = False,
) -> BoxBatch:
    """Evaluate ``expr`` on many boxes at once.

    Args:
        expr: Expression to evaluate
        lo: Lower box endpoints, one per row
        hi: Upper box endpoints, one per row
        alphas: α-level each row cuts the fuzzy constants at
        mode: Evaluation mode
        zero_tol: Absolute distance from 0 at which a divisor counts as
            containing zero; approach boxes that exclude the target pass 0
        shared_edges: Subdivide every row along one common partition
            (RigorousSubdivide only)

    Returns:
        BoxBatch with NaN bounds and an error on every failing row
    """
    lo = np.asarray(lo, dtype=float).reshape(-1)
    hi = np.asarray(hi, dtype=float).reshape(-1)
    alphas = np.broadcast_to(np.asarray(alphas, dtype=float), lo.shape).copy()
    if mode.is_vertex:
        axes = count_indices(expr, mode.indexing)
        if axes > MAX_INDICES:
            error = OccurrenceCapError(
                f"vertex enumeration needs {axes} indices, more than {MAX_INDICES}", to_text(expr)
            )
            nan = np.full(lo.size, np.nan)
            return BoxBatch(nan, nan.copy(), [error] * lo.size)
        out_lo, out_hi, errors = _vertex_batch(expr, lo, hi, alphas, mode.indexing, zero_tol)
    elif mode.kind is ModeKind.NATURAL_INTERVAL:
        out_lo, out_hi, errors = _natural_batch(expr, lo, hi, alphas, zero_tol)
    else:
        out_lo, out_hi, errors = _subdivided_batch(
            expr, lo, hi, alphas, mode.depth, zero_tol, shared_edges
        )

    undefined = np.isnan(out_lo) | np.isnan(out_hi)
    if np.any(undefined):
        error = DomainViolationError("expression is undefined on the box", to_text(expr))
        errors = [error if (bad and e is None) else e for e, bad in zip(errors, undefined)]
    failed = np.array([e is not None for e in errors], dtype=bool)
    out_lo = np.where(failed, np.nan, out_lo)
    out_hi = np.where(failed, np.nan, out_hi)
    return BoxBatch(out_lo, out_hi, errors)


def vertex_eval(
    expr: Expr, box: Interval, mode: EvalMode = DEFAULT_MODE, alpha: float = 1.0
) -> VertexReport:
    """Range of ``expr`` over one box.

    PaperVertex evaluates the scalar expression at every endpoint assignment
    and takes min/max; NaturalInterval recurses with interval kernels;
    RigorousSubdivide hulls natural evaluations over 2^depth sub-boxes.

    Args:
        expr: Expression to evaluate
        box: Box the variable ranges over
        mode: Evaluation mode
        alpha: Level fuzzy constants are cut at

    Raises:
        DivisionByZeroIntervalError: If a divisor range contains zero
        DomainViolationError: On a unary domain violation or an uncovered piecewise box
        OccurrenceCapError: If vertex enumeration needs more than 20 indices
    """
    lo, hi, alphas = np.array([box.lo]), np.array([box.hi]), np.array([alpha])
    batch = evaluate_boxes(expr, lo, hi, alphas, mode)
    result = batch.interval(0)
    attained: list[EndpointAssignment] = []
    if mode.is_vertex:
        evaluator = _VertexEvaluator(expr, lo, hi, alphas, mode.indexing)
        values, _ = evaluator.run()
        full = np.broadcast_to(values, (1,) + (2,) * evaluator.axes).reshape(-1)
        shape = (2,) * evaluator.axes
        for index in (int(np.argmin(full)), int(np.argmax(full))):
            attained.append(tuple(int(bit) for bit in np.unravel_index(index, shape)))
    return VertexReport(result, attained, mode)


def eval_fuzzy(
    expr: Expr, x: FuzzyNumber, mode: EvalMode = DEFAULT_MODE, repair: bool = False
) -> FuzzyNumber:
    """Level-wise extension of ``expr`` to the fuzzy number ``x``.

    Each stored cut of the result is the evaluation of ``expr`` on the cut of
    ``x`` at the same level. RigorousSubdivide splits every level along the
    breakpoints of the lowest cut. Nestedness of the output is checked afterwards.

    Args:
        expr: Expression to evaluate
        x: Fuzzy argument; its grid is the grid of the result
        mode: Evaluation mode
        repair: Replace each cut by its intersection with all lower cuts
            instead of raising on a nestedness violation

    Raises:
        EvaluationError: The first failing evaluation, tagged with its α
        NestednessError: If the output cuts are not nested and repair is off
    """
    batch = evaluate_boxes(expr, x.lo, x.hi, x.alphas, mode, shared_edges=True)
    failure = batch.first_error()
    if failure is not None:
        row, error = failure
        raise error.at_alpha(float(x.alphas[row]))
    lo, hi = batch.lo, batch.hi
    infinite = np.flatnonzero(~np.isfinite(lo) | ~np.isfinite(hi))
    if infinite.size:
        raise DomainViolationError(
            "evaluation is not finite", to_text(expr), float(x.alphas[infinite[0]])
        )
    slack = NESTING_SLACK * max(1.0, float(np.max(np.abs(np.concatenate([lo, hi])))))
    pairs = nesting_violations(x.alphas, lo, hi, slack)
    if pairs:
        if not repair:
            raise NestednessError(
                f"evaluated α-cuts are not nested at {len(pairs)} level pair(s)",
                to_text(expr),
                pairs=pairs,
            )
        logger.info("hull-repairing %d nestedness violation(s) of %s", len(pairs), to_text(expr))
        lo, hi = np.maximum.accumulate(lo), np.minimum.accumulate(hi)
        if np.any(lo > hi):
            raise NestednessError(
                "repaired α-cuts are empty", to_text(expr), pairs=pairs
            )
    return from_levels(x.alphas, lo, hi)
