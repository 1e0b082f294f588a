"""
Main calculator module.

Provides the FuzzyLimitCalculator class that coordinates parsing,
evaluation, limit computation and the theorem checks.
"""

from __future__ import annotations

from typing import Optional, Sequence, Union

from fuzzylimit.config import LimitConfig
from fuzzylimit.engine.evaluation import VertexReport, eval_fuzzy, vertex_eval
from fuzzylimit.engine.intervals import DEFAULT_MODE, EvalMode
from fuzzylimit.engine.limits import (
    DEFAULT_EPS_GRID,
    Infinity,
    ApproachSpec,
    Certificate,
    LimitEngine,
    LimitResult,
    SequentialReport,
)
from fuzzylimit.engine.theorems import TheoremSuite
from fuzzylimit.exceptions import PreconditionError
from fuzzylimit.expr import Expr, parse
from fuzzylimit.fuzzy import FuzzyNumber, Interval, MembershipSample, membership_samples


class FuzzyLimitCalculator:
    """High-level interface to the fuzzy limit toolkit.

    Example:
        >>> from fuzzylimit import FuzzyLimitCalculator, LimitConfig, from_singleton
        >>> calc = FuzzyLimitCalculator(LimitConfig.from_env())
        >>> result = calc.limit("x^2 + x - 3", from_singleton(1))
        >>> result.value
        singleton(-1.0)

    The calculator has sub-engines organized by function:
        - calc.limits: LimitEngine for limits, certificates and sequential checks
        - calc.theorems: TheoremSuite for the executable theorem checks
    """

    def __init__(self, config: Optional[LimitConfig] = None, mode: EvalMode = DEFAULT_MODE):
        """Initialize the calculator.

        Args:
            config: LimitConfig instance (defaults to LimitConfig())
            mode: Evaluation mode used by every computation

        Raises:
            ConfigurationError: If config validation fails
        """
        config = config or LimitConfig()
        config.validate()
        self.config = config
        self.mode = mode

        self.limits = LimitEngine(config, mode)
        self.theorems = TheoremSuite(config, mode)

    def parse(self, text: str) -> Expr:
        """Parse expression text; fuzzy constants are cut on the configured grid."""
        return parse(text, self.config.grid)

    def _expr(self, expr: Union[Expr, str]) -> Expr:
        return self.parse(expr) if isinstance(expr, str) else expr

    def evaluate(
        self, expr: Union[Expr, str], x: FuzzyNumber, repair: bool = False
    ) -> FuzzyNumber:
        """Fuzzy image of ``x`` under ``expr``.

        Raises:
            EvaluationError: On a domain violation, tagged with its α
            NestednessError: If the image is not nested and repair is off
        """
        return eval_fuzzy(self._expr(expr), x, self.mode, repair)

    def evaluate_box(self, expr: Union[Expr, str], box: Interval, alpha: float = 1.0) -> VertexReport:
        return vertex_eval(self._expr(expr), box, self.mode, alpha)

    def limit(
        self, expr: Union[Expr, str], at: Union[ApproachSpec, FuzzyNumber, Infinity]
    ) -> LimitResult:
        """Fuzzy limit of ``expr``; a bare fuzzy number means a two-sided approach."""
        approach = at if isinstance(at, ApproachSpec) else ApproachSpec(at)
        return self.limits.limit(self._expr(expr), approach)

    def certify(
        self,
        expr: Union[Expr, str],
        result: LimitResult,
        eps_grid: Sequence[float] = DEFAULT_EPS_GRID,
    ) -> Certificate:
        """ε-δ (or ε-K) witnesses for a converged result.

        Raises:
            PreconditionError: If the result did not converge
        """
        if result.approach is None:
            raise PreconditionError("result carries no approach to certify against")
        return self.limits.certify(self._expr(expr), result.approach, result, eps_grid)

    def sequential_check(
        self,
        expr: Union[Expr, str],
        point: FuzzyNumber,
        limit: FuzzyNumber,
        n_seqs: int = 20,
        seed: Optional[int] = None,
    ) -> SequentialReport:
        return self.limits.sequential_check(self._expr(expr), point, limit, n_seqs, seed)

    def membership_samples(
        self, number: FuzzyNumber, start: float, stop: float, points: int
    ) -> list[MembershipSample]:
        return membership_samples(number, start, stop, points)

    def __repr__(self) -> str:
        return f"FuzzyLimitCalculator(levels={self.config.grid.levels}, mode={self.mode})"
