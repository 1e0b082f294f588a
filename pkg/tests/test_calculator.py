"""
Workflow tests for FuzzyLimitCalculator.

Tests the complete workflow:
1. Parse an expression with a fuzzy constant
2. Evaluate it on a fuzzy argument
3. Compute its limit at a fuzzy point
4. Certify the limit and cross-check it with fuzzy sequences
5. Run the theorem checks on it
"""

import pytest

from fuzzylimit import FuzzyLimitCalculator, LimitConfig
from fuzzylimit.engine.intervals import EvalMode
from fuzzylimit.engine.limits import Outcome
from fuzzylimit.engine.theorems import Status
from fuzzylimit.exceptions import ConfigurationError, PreconditionError
from fuzzylimit.fuzzy import Interval, equals_within, from_singleton, from_triangular

SHIFT = "x + (1, 2, 3)"


class TestCalculator:
    """Workflow through the calculator facade."""

    @pytest.fixture(scope="class")
    def calc(self):
        return FuzzyLimitCalculator(LimitConfig().with_grid(11))

    @pytest.fixture(scope="class")
    def point(self, calc):
        return from_triangular(0.0, 0.5, 1.0, calc.config.grid)

    def test_01_parse(self, calc):
        expr = calc.parse(SHIFT)
        assert expr.right.value.alphas.size == 10

    def test_02_evaluate(self, calc, point):
        image = calc.evaluate(SHIFT, point)
        assert equals_within(image, from_triangular(1.0, 2.5, 4.0, calc.config.grid))

    def test_03_evaluate_box(self, calc):
        report = calc.evaluate_box("x^2", Interval(-1, 2))
        assert report.result == Interval(-2, 4)

    def test_04_limit(self, calc, point):
        result = calc.limit(SHIFT, point)

        assert result.outcome is Outcome.CONVERGED
        assert equals_within(result.value, from_triangular(1.0, 2.5, 4.0, calc.config.grid), 1e-6)

    def test_05_certify(self, calc, point):
        result = calc.limit(SHIFT, point)
        certificate = calc.certify(SHIFT, result, [0.1, 0.01])

        assert certificate.certified
        assert len(certificate.entries) == 20

    def test_06_certify_needs_convergence(self, calc):
        result = calc.limit("1/x^2", from_singleton(0.0, calc.config.grid))
        with pytest.raises(PreconditionError):
            calc.certify("1/x^2", result)

    def test_07_sequential(self, calc, point):
        result = calc.limit(SHIFT, point)
        report = calc.sequential_check(SHIFT, point, result.value, n_seqs=4, seed=2)
        assert report.passed

    def test_08_theorems(self, calc, point):
        reports = calc.theorems.uniqueness(SHIFT, point)
        assert [report.status for report in reports] == [Status.HOLDS, Status.HOLDS]

    def test_09_membership(self, calc, point):
        samples = calc.membership_samples(point, 0.0, 1.0, 2)
        assert [sample.grade for sample in samples] == [0.0, 1.0, 0.0]


class TestConstruction:
    """Test cases for building a calculator."""

    def test_defaults(self):
        calc = FuzzyLimitCalculator()

        assert calc.config == LimitConfig()
        assert calc.mode == EvalMode.paper_vertex()
        assert repr(calc) == "FuzzyLimitCalculator(levels=101, mode=paper)"

    def test_invalid_config(self):
        with pytest.raises(ConfigurationError):
            FuzzyLimitCalculator(LimitConfig(ratio=1.5))
