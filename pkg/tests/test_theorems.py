"""Tests for the executable limit theorem checks and suites."""

import pytest

from fuzzylimit.config import LimitConfig
from fuzzylimit.exceptions import InvalidValueError
from fuzzylimit.engine.intervals import EvalMode
from fuzzylimit.engine.limits import ApproachSpec, Infinity, Outcome, Side, fuzzy_limit
from fuzzylimit.engine.theorems import (
    Status,
    SuiteOverrides,
    Theorem,
    TheoremSuite,
    algebra_campaign,
    builtin_fixtures,
    run_suite,
)
from fuzzylimit.expr import parse
from fuzzylimit.fuzzy import equals_within, from_singleton, from_triangular


@pytest.fixture
def suite():
    return TheoremSuite(LimitConfig())


@pytest.fixture
def one():
    return from_singleton(1.0)


@pytest.fixture
def zero():
    return from_singleton(0.0)


@pytest.fixture
def scalar():
    return from_triangular(1.0, 2.0, 3.0)


class TestFixtures:
    """The worked examples reach their known outcomes."""

    @pytest.mark.parametrize("fixture", builtin_fixtures(), ids=lambda fixture: fixture.name)
    def test_outcome(self, fixture):
        result = fuzzy_limit(parse(fixture.expr), fixture.approach)

        assert result.outcome is fixture.expected
        if fixture.value is not None:
            assert equals_within(result.value, fixture.value, 1e-4)
        if fixture.reason is not None:
            assert result.reason is fixture.reason

    def test_names_are_unique(self):
        names = [fixture.name for fixture in builtin_fixtures()]
        assert len(names) == len(set(names)) == 16


class TestLimitAlgebra:
    """Test cases for the sum, scalar, product and quotient rules."""

    def test_all_rules_hold(self, suite, scalar, one):
        reports = suite.algebra("x^2", "x", scalar, one)

        assert [report.theorem for report in reports] == [
            Theorem.SUM_RULE,
            Theorem.SCALAR_RULE,
            Theorem.PRODUCT_RULE,
            Theorem.QUOTIENT_RULE,
        ]
        assert all(report.status is Status.HOLDS for report in reports)
        assert equals_within(reports[1].lhs, scalar, 1e-5)

    def test_quotient_needs_nonzero_limit(self, suite, scalar, one):
        reports = suite.algebra("x^2 + 1", "x - 1", scalar, one)

        assert reports[0].status is Status.HOLDS
        assert reports[3].status is Status.INAPPLICABLE
        assert "contain" in reports[3].notes
        assert not reports[3].known_effect

    def test_quotient_by_vanishing_limit(self, suite, scalar, one):
        """lim (x - 1) at 1 lands a rounding error away from 0."""
        quotient = suite.algebra("x", "x - 1", scalar, one)[3]

        assert quotient.theorem is Theorem.QUOTIENT_RULE
        assert quotient.status is Status.INAPPLICABLE
        assert not quotient.is_failure

    def test_non_convergent_input(self, suite, scalar, zero):
        reports = suite.algebra("1/x^2", "x", scalar, zero)

        assert all(report.status is Status.INAPPLICABLE for report in reports)
        assert "DivergesPlus" in reports[0].notes

    def test_vertex_product_is_known_effect(self, suite, scalar):
        """x·(-x) over a cut straddling zero keeps the shared index."""
        reports = suite.algebra("x", "-x", scalar, from_triangular(-1.0, 0.0, 1.0))
        product = reports[2]

        assert product.status is Status.FAILS
        assert product.known_effect
        assert not product.is_failure
        assert "dependency" in product.notes


class TestComposition:
    """Test cases for the composition check."""

    def test_holds(self, suite, one):
        report = suite.composition("u^2", "x + 1", one)

        assert report.status is Status.HOLDS
        assert equals_within(report.rhs, from_singleton(4.0))

    def test_inner_limit_diverges(self, suite, zero):
        report = suite.composition("exp(u)", "1/x", ApproachSpec(zero, Side.LEFT))

        assert report.status is Status.INAPPLICABLE
        assert "lim g" in report.notes


class TestAgreement:
    """Test cases for the agreement check."""

    def test_removable_singularity(self, suite, one):
        report = suite.agreement("(x^2 - 1)/(x - 1)", "x + 1", one)

        assert report.status is Status.HOLDS
        assert equals_within(report.lhs, from_singleton(2.0), 1e-5)

    def test_functions_differ(self, suite, one):
        report = suite.agreement("x", "x + 1", one)

        assert report.status is Status.INAPPLICABLE
        assert "differ" in report.notes


class TestOrder:
    """Test cases for comparison and squeeze."""

    def test_comparison_holds(self, suite, zero):
        (report,) = suite.order("x", "x + 1", None, zero)

        assert report.theorem is Theorem.COMPARISON
        assert report.status is Status.HOLDS
        assert report.max_alpha_gap == 0.0

    def test_comparison_hypothesis_fails(self, suite, zero):
        (report,) = suite.order("x + 1", "x", None, zero)
        assert report.status is Status.INAPPLICABLE

    def test_squeeze_hypothesis_fails(self, suite, zero):
        reports = suite.order("x", "x + 1", "x + 5", zero)

        assert reports[0].status is Status.HOLDS
        assert reports[1].theorem is Theorem.SQUEEZE
        assert reports[1].status is Status.INAPPLICABLE


class TestUniqueness:
    """Test cases for schedule independence and one-sided equivalence."""

    def test_polynomial(self, suite, one):
        reports = suite.uniqueness("x^2 + x - 3", one)

        assert [report.theorem for report in reports] == [Theorem.UNIQUENESS, Theorem.ONE_SIDED_EQUIV]
        assert [report.status for report in reports] == [Status.HOLDS, Status.HOLDS]

    def test_mismatched_sides(self, suite, zero):
        """No two-sided limit is consistent with differing one-sided limits."""
        reports = suite.uniqueness("abs(sin(x))/sin(x)", zero)
        assert [report.status for report in reports] == [Status.HOLDS, Status.HOLDS]

    def test_no_sides_at_infinity(self, suite):
        reports = suite.uniqueness("1/x", ApproachSpec(Infinity.PLUS))

        assert reports[0].status is Status.HOLDS
        assert reports[1].status is Status.INAPPLICABLE


class TestSequential:
    """Test cases for the sequential criterion check."""

    def test_holds(self, suite, one):
        report = suite.sequential("x^2 + x - 3", one, n_seqs=5, seed=0)

        assert report.status is Status.HOLDS
        assert "seed 0" in report.notes

    def test_needs_finite_target(self, suite):
        report = suite.sequential("1/x", ApproachSpec(Infinity.PLUS))
        assert report.status is Status.INAPPLICABLE

    def test_no_limit(self, suite, zero):
        report = suite.sequential("1/x^2", zero)
        assert report.status is Status.INAPPLICABLE


class TestRunSuite:
    """Test cases for named suites."""

    def test_unknown_suite(self):
        with pytest.raises(InvalidValueError, match="unknown suite"):
            list(run_suite("everything"))

    def test_composition_with_overrides(self, one):
        overrides = SuiteOverrides(f="u^2", g="x + 1", at=ApproachSpec(one))
        reports = list(run_suite("composition", overrides))

        assert len(reports) == 1
        assert reports[0].status is Status.HOLDS

    def test_builtin_algebra(self):
        reports = list(run_suite("algebra"))

        assert len(reports) == 12
        assert not any(report.is_failure for report in reports)

    def test_empty_overrides(self):
        assert SuiteOverrides().empty
        assert not SuiteOverrides(f="x").empty

    def test_facade_matches_function(self, suite):
        reports = list(suite.run("order"))
        assert [report.theorem for report in reports] == [
            Theorem.COMPARISON,
            Theorem.COMPARISON,
            Theorem.SQUEEZE,
        ]


@pytest.mark.slow
class TestCampaign:
    """Randomized limit algebra campaign."""

    def test_hundred_cases(self):
        summary = algebra_campaign(100, seed=0)

        assert summary.cases == 100
        assert summary.passed, [report.notes for report in summary.failures]

    def test_rigorous_mode_is_tallied(self):
        summary = algebra_campaign(3, seed=1)
        rigorous = str(EvalMode.rigorous(2))
        assert f"ProductRule[{rigorous}]" in summary.counts
