"""
Command line interface.

Commands:
    limit       fuzzy limit of an expression (optionally certified)
    eval        fuzzy image of a fuzzy number under an expression
    membership  membership grades of a fuzzy number, as CSV plot data
    verify      stream theorem check reports as JSON lines
"""

from __future__ import annotations

import logging
import sys
import time
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, NoReturn, Optional

import typer

from fuzzylimit import __version__
from fuzzylimit.calculator import FuzzyLimitCalculator
from fuzzylimit.config import LimitConfig
from fuzzylimit.engine.intervals import EvalMode
from fuzzylimit.engine.limits import ApproachSpec, LimitResult, Outcome, Side
from fuzzylimit.engine.theorems import SUITES, SuiteOverrides
from fuzzylimit.exceptions import (
    EvaluationError,
    ExpressionError,
    FuzzyLimitError,
    ValidationError,
)
from fuzzylimit.expr import to_text
from fuzzylimit.fuzzy import FuzzyNumber, from_singleton
from fuzzylimit.utils import (
    alpha_table,
    alpha_table_csv,
    certificate_to_json,
    dumps,
    fuzzy_from_json,
    fuzzy_to_json,
    membership_csv,
    parse_eps_grid,
    parse_target,
    report_to_json,
    result_to_json,
    sequential_to_json,
)

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DIVERGES = 2
EXIT_NO_LIMIT = 3
EXIT_UNDETERMINED = 4
EXIT_EVALUATION = 5
EXIT_THEOREM_FAILS = 6

OUTCOME_EXIT_CODES = {
    Outcome.CONVERGED: EXIT_OK,
    Outcome.DIVERGES_PLUS: EXIT_DIVERGES,
    Outcome.DIVERGES_MINUS: EXIT_DIVERGES,
    Outcome.NO_LIMIT: EXIT_NO_LIMIT,
    Outcome.UNDETERMINED: EXIT_UNDETERMINED,
}

app = typer.Typer(
    name="fuzzylimit",
    help="Fuzzy numbers, fuzzy arithmetic and certified fuzzy limits.",
    no_args_is_help=True,
    add_completion=False,
)


class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"


@dataclass
class OutputRecord:
    """One command result as written to stdout.

    Attributes:
        query: Human readable form of what was computed
        mode: Evaluation mode name
        result: Serialized result (limit outcome or evaluated value)
        alpha_table: (α, lo, hi) rows in ascending α
        certificate: Serialized certificate, when one was requested
        timing_ms: Wall time of the computation
        sequential: Serialized sequential cross-check, when one was requested
    """

    query: str
    mode: str
    result: dict[str, Any]
    alpha_table: list[tuple[float, float, float]]
    certificate: Optional[dict[str, Any]] = None
    timing_ms: float = 0.0
    sequential: Optional[dict[str, Any]] = None
    schema_version: int = SCHEMA_VERSION

    def to_json(self) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "schema_version": self.schema_version,
            "query": self.query,
            "mode": self.mode,
            "result": self.result,
            "alpha_table": [list(row) for row in self.alpha_table],
            "certificate": self.certificate,
            "timing_ms": round(self.timing_ms, 3),
        }
        if self.sequential is not None:
            payload["sequential"] = self.sequential
        return payload


# ============================================================================
# Helpers
# ============================================================================


def _fail(error: FuzzyLimitError, code: int = EXIT_USAGE) -> NoReturn:
    message = error.annotate() if isinstance(error, ExpressionError) else str(error)
    typer.echo(f"error: {message}", err=True)
    raise typer.Exit(code)


def _read_expr(text: str) -> str:
    """Expression text; "-" reads it from stdin."""
    if text == "-":
        return sys.stdin.read().strip()
    return text


def _calculator(mode: str, levels: Optional[int], tol: Optional[float]) -> FuzzyLimitCalculator:
    config = LimitConfig.from_env()
    if levels is not None:
        config = config.with_grid(levels)
    if tol is not None:
        config = replace(config, tol=tol)
    return FuzzyLimitCalculator(config, EvalMode.parse(mode))


def _emit(record: OutputRecord, fmt: OutputFormat) -> None:
    if fmt is OutputFormat.CSV:
        typer.echo(alpha_table_csv(record.alpha_table), nl=False)
    else:
        typer.echo(dumps(record.to_json()))


def _elapsed_ms(started: float) -> float:
    return (time.perf_counter() - started) * 1000.0


@app.callback()
def main(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log engine progress to stderr."),
) -> None:
    """Fuzzy limit toolkit."""
    if verbose:
        logging.basicConfig(
            level=logging.DEBUG,
            stream=sys.stderr,
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        )
        logger.debug("fuzzylimit %s", __version__)


# ============================================================================
# Commands
# ============================================================================


@app.command("limit")
def cmd_limit(
    expr: str = typer.Option(..., "--expr", help='Expression in x; "-" reads stdin.'),
    at: str = typer.Option(..., "--at", help='Fuzzy number JSON, "inf" or "-inf".'),
    side: Side = typer.Option(Side.BOTH, "--side", case_sensitive=False),
    mode: str = typer.Option("paper", "--mode", help="paper | natural | rigorous:<depth>"),
    levels: Optional[int] = typer.Option(None, "--levels", help="α-grid partition size."),
    tol: Optional[float] = typer.Option(None, "--tol", help="Convergence tolerance."),
    certify: Optional[str] = typer.Option(
        None, "--certify", help="Comma separated, strictly decreasing ε values."
    ),
    fmt: OutputFormat = typer.Option(OutputFormat.JSON, "--format", case_sensitive=False),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed of the sequential check."),
    sequences: int = typer.Option(
        0, "--sequences", min=0, help="Random fuzzy sequences to cross-check a finite limit."
    ),
) -> None:
    """Compute the fuzzy limit of EXPR as x approaches AT."""
    started = time.perf_counter()
    try:
        calc = _calculator(mode, levels, tol)
        parsed = calc.parse(_read_expr(expr))
        approach = ApproachSpec(parse_target(at, calc.config.grid), side)
        eps_grid = parse_eps_grid(certify) if certify else None
    except FuzzyLimitError as e:
        _fail(e)

    result: LimitResult = calc.limit(parsed, approach)
    certificate = None
    if eps_grid is not None and result.converged:
        try:
            certificate = certificate_to_json(calc.certify(parsed, result, eps_grid))
        except ValidationError as e:
            _fail(e)
    sequential = None
    if sequences and result.converged and isinstance(approach.target, FuzzyNumber):
        assert result.value is not None
        report = calc.sequential_check(parsed, approach.target, result.value, sequences, seed)
        sequential = sequential_to_json(report)

    record = OutputRecord(
        query=f"lim {to_text(parsed)} as {approach}",
        mode=str(calc.mode),
        result=result_to_json(result),
        alpha_table=alpha_table(result.value) if result.value is not None else [],
        certificate=certificate,
        timing_ms=_elapsed_ms(started),
        sequential=sequential,
    )
    _emit(record, fmt)
    raise typer.Exit(OUTCOME_EXIT_CODES[result.outcome])


@app.command("eval")
def cmd_eval(
    expr: str = typer.Option(..., "--expr", help='Expression in x; "-" reads stdin.'),
    x: Optional[str] = typer.Option(None, "--x", help="Fuzzy number JSON (default: singleton 0)."),
    mode: str = typer.Option("paper", "--mode", help="paper | natural | rigorous:<depth>"),
    levels: Optional[int] = typer.Option(None, "--levels", help="α-grid partition size."),
    repair: bool = typer.Option(False, "--repair", help="Hull-repair non-nested output cuts."),
    fmt: OutputFormat = typer.Option(OutputFormat.JSON, "--format", case_sensitive=False),
) -> None:
    """Evaluate EXPR on the fuzzy number X level by level."""
    started = time.perf_counter()
    try:
        calc = _calculator(mode, levels, None)
        parsed = calc.parse(_read_expr(expr))
        argument = fuzzy_from_json(x, calc.config.grid) if x else from_singleton(0.0, calc.config.grid)
    except FuzzyLimitError as e:
        _fail(e)

    try:
        value = calc.evaluate(parsed, argument, repair)
    except EvaluationError as e:
        _fail(e, EXIT_EVALUATION)

    record = OutputRecord(
        query=f"{to_text(parsed)} at x = {argument!r}",
        mode=str(calc.mode),
        result={"value": fuzzy_to_json(value)},
        alpha_table=alpha_table(value),
        timing_ms=_elapsed_ms(started),
    )
    _emit(record, fmt)


@app.command("membership")
def cmd_membership(
    number: str = typer.Option(..., "--number", help="Fuzzy number JSON."),
    start: float = typer.Option(..., "--from", help="First sample point."),
    stop: float = typer.Option(..., "--to", help="Last sample point."),
    points: int = typer.Option(..., "--points", help="Number of sampling steps."),
    levels: Optional[int] = typer.Option(None, "--levels", help="α-grid partition size."),
) -> None:
    """Write POINTS + 1 membership samples over [FROM, TO] as x,grade CSV."""
    try:
        calc = _calculator("paper", levels, None)
        samples = calc.membership_samples(
            fuzzy_from_json(number, calc.config.grid), start, stop, points
        )
    except FuzzyLimitError as e:
        _fail(e)
    typer.echo(membership_csv(samples), nl=False)


@app.command("verify")
def cmd_verify(
    suite: str = typer.Option("all", "--suite", help=" | ".join(SUITES)),
    f: Optional[str] = typer.Option(None, "--f", help="First expression."),
    g: Optional[str] = typer.Option(None, "--g", help="Second expression."),
    h: Optional[str] = typer.Option(None, "--h", help="Squeezed expression of the order suite."),
    at: Optional[str] = typer.Option(None, "--at", help='Fuzzy number JSON, "inf" or "-inf".'),
    scalar: Optional[str] = typer.Option(
        None, "--a", help="Scalar fuzzy number of the scalar rule (default (1,2,3))."
    ),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed of the sequential checks."),
    mode: str = typer.Option("paper", "--mode", help="paper | natural | rigorous:<depth>"),
    levels: Optional[int] = typer.Option(None, "--levels", help="α-grid partition size."),
    tol: Optional[float] = typer.Option(None, "--tol", help="Convergence tolerance."),
) -> None:
    """Stream theorem check reports as JSON lines."""
    if suite not in SUITES:
        typer.echo(f"error: unknown suite {suite!r}; choose from {', '.join(SUITES)}", err=True)
        raise typer.Exit(EXIT_USAGE)
    try:
        calc = _calculator(mode, levels, tol)
        grid = calc.config.grid
        for text in (f, g, h):
            if text is not None:
                calc.parse(text)
        overrides = SuiteOverrides(
            f=f,
            g=g,
            h=h,
            at=ApproachSpec(parse_target(at, grid)) if at is not None else None,
            scalar=fuzzy_from_json(scalar, grid) if scalar is not None else None,
        )
    except FuzzyLimitError as e:
        _fail(e)

    failed = False
    for report in calc.theorems.run(suite, overrides, seed):
        failed = failed or report.is_failure
        typer.echo(dumps(report_to_json(report)))
    raise typer.Exit(EXIT_THEOREM_FAILS if failed else EXIT_OK)


if __name__ == "__main__":
    app()
