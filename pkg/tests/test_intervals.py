"""Tests for interval kernels, evaluation modes and level-wise fuzzy arithmetic."""

import math

import numpy as np
import pytest

from fuzzylimit.exceptions import (
    DivisionByZeroIntervalError,
    DomainViolationError,
    InvalidValueError,
    PreconditionError,
)
from fuzzylimit.engine.intervals import (
    ZERO_TOL,
    EvalMode,
    ModeKind,
    contains_zero,
    fuzzy_binary,
    fuzzy_scale,
    iv_abs,
    iv_add,
    iv_div,
    iv_monotone_unary,
    iv_mul,
    iv_neg,
    iv_pow_int,
    iv_sin,
    iv_sub,
)
from fuzzylimit.expr import Indexing
from fuzzylimit.fuzzy import Interval, equals_within, from_singleton, from_triangular


class TestEvalMode:
    """Test cases for evaluation mode parsing."""

    @pytest.mark.parametrize(
        "text, expected",
        [
            ("paper", EvalMode.paper_vertex()),
            ("paper:occurrence", EvalMode.paper_vertex(Indexing.OCCURRENCE)),
            ("natural", EvalMode.natural()),
            ("rigorous", EvalMode.rigorous(4)),
            ("rigorous:6", EvalMode.rigorous(6)),
        ],
    )
    def test_parse(self, text, expected):
        assert EvalMode.parse(text) == expected

    @pytest.mark.parametrize("text", ["paper:random", "rigorous:deep", "exact", "natural:2"])
    def test_parse_rejects(self, text):
        with pytest.raises(InvalidValueError):
            EvalMode.parse(text)

    def test_str_round_trips(self):
        for mode in (EvalMode.paper_vertex(), EvalMode.natural(), EvalMode.rigorous(3)):
            assert EvalMode.parse(str(mode)) == mode

    def test_rigorous_needs_depth(self):
        with pytest.raises(InvalidValueError):
            EvalMode(ModeKind.RIGOROUS_SUBDIVIDE, depth=0)

    def test_default_is_vertex(self):
        assert EvalMode().is_vertex
        assert not EvalMode.natural().is_vertex


class TestIntervalKernels:
    """Test cases for single-interval operations."""

    def test_add_sub_neg(self):
        a, b = Interval(1, 2), Interval(-1, 3)

        assert iv_add(a, b) == Interval(0, 5)
        assert iv_sub(a, b) == Interval(-2, 3)
        assert iv_neg(a) == Interval(-2, -1)

    def test_mul_mixed_signs(self):
        assert iv_mul(Interval(-1, 2), Interval(-3, 4)) == Interval(-6, 8)

    def test_div(self):
        assert iv_div(Interval(1, 2), Interval(1, 2)) == Interval(0.5, 2.0)

    def test_div_by_interval_containing_zero(self):
        with pytest.raises(DivisionByZeroIntervalError):
            iv_div(Interval(1, 2), Interval(-1, 1))

    def test_div_by_zero_endpoint(self):
        with pytest.raises(DivisionByZeroIntervalError):
            iv_div(Interval(1, 2), Interval(0, 1))

    @pytest.mark.parametrize(
        "divisor", [Interval(1e-15, 2e-15), Interval(-2e-15, -1e-15), Interval(ZERO_TOL, 1.0)]
    )
    def test_div_by_divisor_within_zero_tolerance(self, divisor):
        with pytest.raises(DivisionByZeroIntervalError):
            iv_div(Interval(1, 1), divisor)

    def test_div_just_outside_zero_tolerance(self):
        result = iv_div(Interval(1, 1), Interval(1e-11, 1e-10))
        assert result.lo == pytest.approx(1e10)
        assert result.hi == pytest.approx(1e11)

    def test_contains_zero_is_absolute(self):
        lo, hi = np.array([1e-13, 1e-13, 1e-11]), np.array([1.0, 1e6, 1.0])
        assert contains_zero(lo, hi).tolist() == [True, True, False]
        assert contains_zero(lo, hi, 0.0).tolist() == [False, False, False]

    def test_vertex_power_keeps_cross_terms(self):
        """Vertex squaring of [-1, 2] includes the product (-1)(2)."""
        assert iv_pow_int(Interval(-1, 2), 2) == Interval(-2, 4)

    def test_range_power(self):
        assert iv_pow_int(Interval(-1, 2), 2, EvalMode.rigorous(1)) == Interval(0, 4)
        assert iv_pow_int(Interval(-2, -1), 2, EvalMode.natural()) == Interval(1, 4)
        assert iv_pow_int(Interval(-2, 1), 3, EvalMode.natural()) == Interval(-8, 1)

    def test_power_zero(self):
        assert iv_pow_int(Interval(-5, 5), 0) == Interval(1, 1)

    def test_negative_exponent(self):
        with pytest.raises(PreconditionError):
            iv_pow_int(Interval(1, 2), -1)

    def test_monotone_unary(self):
        result = iv_monotone_unary("exp", Interval(0, 1))
        assert result.lo == 1.0
        assert result.hi == pytest.approx(math.e)
        assert iv_monotone_unary("sqrt", Interval(4, 9)) == Interval(2, 3)

    def test_sqrt_domain(self):
        with pytest.raises(DomainViolationError):
            iv_monotone_unary("sqrt", Interval(-1, 4))

    def test_monotone_unary_unknown(self):
        with pytest.raises(PreconditionError):
            iv_monotone_unary("sin", Interval(0, 1))

    def test_abs(self):
        assert iv_abs(Interval(-3, 2)) == Interval(0, 3)
        assert iv_abs(Interval(-3, -2)) == Interval(2, 3)

    def test_sin_interior_extrema(self):
        """The range of sin includes peaks inside the box."""
        result = iv_sin(Interval(0, math.pi))
        assert result.lo == pytest.approx(0.0, abs=1e-15)
        assert result.hi == 1.0
        assert iv_sin(Interval(0, 7.0)) == Interval(-1, 1)

    def test_sin_monotone_piece(self):
        result = iv_sin(Interval(0.1, 0.2))
        assert result.lo == pytest.approx(math.sin(0.1))
        assert result.hi == pytest.approx(math.sin(0.2))


class TestFuzzyArithmetic:
    """Test cases for level-wise fuzzy operations."""

    def test_add_triangles(self):
        total = fuzzy_binary(from_triangular(0, 1, 2), from_triangular(1, 2, 3), "add")
        assert equals_within(total, from_triangular(1, 3, 5))

    def test_sub_triangles(self):
        diff = fuzzy_binary(from_triangular(0, 1, 2), from_triangular(1, 2, 3), "sub")
        assert equals_within(diff, from_triangular(-3, -1, 1))

    def test_scale(self):
        scaled = fuzzy_scale(from_singleton(2.0), from_triangular(0, 1, 2))
        assert equals_within(scaled, from_triangular(0, 2, 4))

    def test_div_by_cut_containing_zero(self):
        with pytest.raises(DivisionByZeroIntervalError) as excinfo:
            fuzzy_binary(from_singleton(1.0), from_triangular(-1, 1, 2), "div")
        assert excinfo.value.alpha == pytest.approx(0.01)

    def test_div_by_vanishing_singleton(self):
        with pytest.raises(DivisionByZeroIntervalError):
            fuzzy_binary(from_singleton(1.0), from_singleton(1.1e-16), "div")

    def test_unknown_operation(self):
        with pytest.raises(PreconditionError):
            fuzzy_binary(from_singleton(1.0), from_singleton(2.0), "pow")
