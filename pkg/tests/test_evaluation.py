"""Tests for box evaluation and the level-wise extension of expressions."""

import itertools

import numpy as np
import pytest

from fuzzylimit.exceptions import (
    DivisionByZeroIntervalError,
    DomainViolationError,
    NestednessError,
    OccurrenceCapError,
)
from fuzzylimit.engine.evaluation import evaluate_boxes, eval_fuzzy, vertex_eval
from fuzzylimit.engine.intervals import EvalMode
from fuzzylimit.expr import Indexing, eval_scalar, parse
from fuzzylimit.fuzzy import Interval, equals_within, from_levels, from_singleton, from_triangular

CUBIC_QUOTIENT = "(x^3 - 4)/(x^2 + 1)"


def positional_oracle(lo, hi):
    """Min and max of (x_i x_j x_k - 4)/(x_i x_j + 1) over all endpoint choices."""
    values = [
        (xi * xj * xk - 4.0) / (xi * xj + 1.0)
        for xi, xj, xk in itertools.product((lo, hi), repeat=3)
    ]
    return min(values), max(values)


class TestVertexEval:
    """Test cases for single-box evaluation."""

    # ====================================================================
    # Tests: PaperVertex
    # ====================================================================

    def test_cubic_quotient_on_unit_box(self):
        """Positional indices enumerate x_i x_j x_k / x_i x_j."""
        report = vertex_eval(parse(CUBIC_QUOTIENT), Interval(0, 1))

        assert report.result == Interval(-4.0, -1.5)
        assert len(report.attained_at) == 2
        assert all(len(assignment) == 3 for assignment in report.attained_at)

    @pytest.mark.parametrize("box", [(0.0, 1.0), (0.2, 0.9), (-1.0, 0.5), (1.0, 2.0)])
    def test_matches_enumeration(self, box):
        report = vertex_eval(parse(CUBIC_QUOTIENT), Interval(*box))
        lo, hi = positional_oracle(*box)

        assert report.result.lo == pytest.approx(lo)
        assert report.result.hi == pytest.approx(hi)

    def test_square_keeps_cross_term(self):
        assert vertex_eval(parse("x^2"), Interval(-1, 2)).result == Interval(-2, 4)

    def test_occurrence_indexing(self):
        """Independent indices widen x*x on a box straddling zero."""
        mode = EvalMode.paper_vertex(Indexing.OCCURRENCE)
        assert vertex_eval(parse("x*x"), Interval(-1, 2), mode).result == Interval(-2, 4)
        assert vertex_eval(parse("x*x"), Interval(-1, 2)).result == Interval(1, 4)

    def test_fuzzy_constant_is_cut_at_alpha(self):
        expr = parse("x + (1, 2, 3)")
        assert vertex_eval(expr, Interval(0, 0), alpha=1.0).result == Interval(2, 2)
        assert vertex_eval(expr, Interval(0, 0), alpha=0.5).result == Interval(1.5, 2.5)

    def test_degenerate_box_matches_scalar(self):
        expr = parse("x^2 + x - 3")
        for x in (-2.0, 0.0, 0.7, 3.0):
            result = vertex_eval(expr, Interval.point(x)).result
            assert result.lo == result.hi == pytest.approx(eval_scalar(expr, x))

    # ====================================================================
    # Tests: other modes
    # ====================================================================

    def test_rigorous_square(self):
        assert vertex_eval(parse("x^2"), Interval(-1, 2), EvalMode.rigorous(1)).result == Interval(0, 4)

    def test_natural_dependency(self):
        """Natural evaluation treats both occurrences of x as independent."""
        result = vertex_eval(parse("x - x"), Interval(0, 1), EvalMode.natural()).result
        assert result == Interval(-1, 1)
        assert vertex_eval(parse("x - x"), Interval(0, 1)).result == Interval(0, 0)

    def test_rigorous_encloses_range(self):
        expr = parse("x^2 - x")
        result = vertex_eval(expr, Interval(0, 1), EvalMode.rigorous(4)).result
        samples = [eval_scalar(expr, x) for x in np.linspace(0, 1, 201)]

        assert result.lo <= min(samples)
        assert result.hi >= max(samples)

    def test_attained_at_empty_outside_vertex_mode(self):
        report = vertex_eval(parse("x"), Interval(0, 1), EvalMode.natural())
        assert report.attained_at == []

    # ====================================================================
    # Tests: errors
    # ====================================================================

    @pytest.mark.parametrize("mode", [EvalMode.paper_vertex(), EvalMode.natural(), EvalMode.rigorous(2)])
    def test_divisor_containing_zero(self, mode):
        with pytest.raises(DivisionByZeroIntervalError):
            vertex_eval(parse("1/x"), Interval(-1, 1), mode)

    def test_sqrt_below_zero(self):
        with pytest.raises(DomainViolationError):
            vertex_eval(parse("sqrt(x)"), Interval(-1, 1))

    def test_piecewise_box_straddles_guards(self):
        expr = parse("{1 if x > 0 ; -1 if x < 0}")
        assert vertex_eval(expr, Interval(1, 2)).result == Interval(1, 1)
        with pytest.raises(DomainViolationError, match="piecewise"):
            vertex_eval(expr, Interval(-1, 1))

    def test_index_cap(self):
        with pytest.raises(OccurrenceCapError):
            vertex_eval(parse("x^21"), Interval(1, 2))


class TestEvaluateBoxes:
    """Test cases for batch evaluation."""

    def test_errors_are_per_row(self):
        batch = evaluate_boxes(
            parse("1/x"), np.array([1.0, -1.0, 2.0]), np.array([2.0, 1.0, 4.0]), np.ones(3)
        )

        assert batch.ok.tolist() == [True, False, True]
        assert batch.lo[0] == 0.5
        assert np.isnan(batch.lo[1])
        row, error = batch.first_error()
        assert row == 1
        assert isinstance(error, DivisionByZeroIntervalError)

    def test_constant_expression(self):
        batch = evaluate_boxes(parse("5"), np.zeros(4), np.ones(4), np.ones(4))
        assert batch.lo.tolist() == [5.0] * 4
        assert len(batch) == 4

    @pytest.mark.parametrize("mode", [EvalMode.paper_vertex(), EvalMode.natural(), EvalMode.rigorous(2)])
    def test_divisor_near_zero(self, mode):
        lo, hi = np.array([1e-15]), np.array([2e-15])

        strict = evaluate_boxes(parse("1/x"), lo, hi, np.ones(1), mode)
        exact = evaluate_boxes(parse("1/x"), lo, hi, np.ones(1), mode, zero_tol=0.0)

        assert isinstance(strict.first_error()[1], DivisionByZeroIntervalError)
        assert exact.ok.all()
        assert exact.lo[0] == pytest.approx(5e14)
        assert exact.hi[0] == pytest.approx(1e15)


class TestEvalFuzzy:
    """Test cases for fuzzy images of fuzzy numbers."""

    def test_linear_image(self):
        image = eval_fuzzy(parse("2*x"), from_triangular(0, 0.5, 1))
        assert equals_within(image, from_triangular(0, 1, 2))

    def test_shift_by_fuzzy_constant(self):
        image = eval_fuzzy(parse("x + (1, 2, 3)"), from_triangular(0, 0.5, 1))
        assert equals_within(image, from_triangular(1, 2.5, 4))

    def test_singleton_image_is_singleton(self):
        image = eval_fuzzy(parse("x^2 + x - 3"), from_singleton(1.0))
        assert image == from_singleton(-1.0)

    def test_error_is_tagged_with_alpha(self):
        """The first failing level is the lowest α whose cut reaches zero."""
        with pytest.raises(DivisionByZeroIntervalError) as excinfo:
            eval_fuzzy(parse("1/x"), from_triangular(-1, 1, 2))
        assert excinfo.value.alpha == pytest.approx(0.01)

    @pytest.fixture
    def skewed(self):
        """Two-level stack whose core sits near the low end of its support."""
        return from_levels([0.5, 1.0], [0.0, 0.1], [0.8, 0.3])

    def test_not_nested_raises(self, skewed):
        """Endpoint-only evaluation of x(1 - x) misses the interior maximum."""
        with pytest.raises(NestednessError) as excinfo:
            eval_fuzzy(parse("x*(1 - x)"), skewed)
        assert excinfo.value.pairs == [(0.5, 1.0)]

    def test_repair_intersects_with_lower_cuts(self, skewed):
        image = eval_fuzzy(parse("x*(1 - x)"), skewed, repair=True)

        assert image.cut(0.5).lo == 0.0
        assert image.cut(1.0).lo == pytest.approx(0.09)
        assert image.cut(1.0).hi == pytest.approx(0.16)

    def test_subdivided_levels_share_breakpoints(self):
        """Splitting each cut on its own midpoint would give the core cut a lower bound of -0.1."""
        straddling = from_levels([0.5, 1.0], [-1.0, -0.9], [1.0, 0.5])
        image = eval_fuzzy(parse("x*x"), straddling, EvalMode.rigorous(1))

        assert image.cut(0.5) == Interval(0.0, 1.0)
        assert image.cut(1.0).lo == 0.0
        assert image.cut(1.0).hi == pytest.approx(0.81)
