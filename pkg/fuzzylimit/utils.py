"""
Utility functions for the fuzzy limit toolkit.

JSON codecs for fuzzy numbers, limit results, certificates and theorem
reports, plus the fixed-precision float formatting used by CSV output.
"""

from __future__ import annotations

import json
import math
from typing import Any, Iterable, Optional, Union

from fuzzylimit.config import AlphaGridConfig
from fuzzylimit.engine.limits import (
    Certificate,
    Infinity,
    LimitResult,
    SequentialReport,
)
from fuzzylimit.engine.theorems import TheoremReport
from fuzzylimit.exceptions import InvalidShapeError, InvalidValueError, ValidationError
from fuzzylimit.fuzzy import (
    FuzzyKind,
    FuzzyNumber,
    Interval,
    MembershipSample,
    from_levels,
    from_singleton,
    from_triangular,
    resample,
)

CSV_HEADER = "alpha,lo,hi"


def format_float(value: float) -> str:
    """Format a float with 12 significant digits.

    Examples:
        >>> format_float(1 / 3)
        '0.333333333333'
        >>> format_float(-0.0)
        '0'
    """
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value + 0.0:.12g}"


def json_number(value: Optional[float]) -> Union[float, str, None]:
    """Float for JSON output; non-finite values become the strings "inf", "-inf", "nan"."""
    if value is None:
        return None
    value = float(value)
    if not math.isfinite(value):
        return format_float(value)
    return value + 0.0


# ============================================================================
# Fuzzy numbers
# ============================================================================


def fuzzy_to_json(number: FuzzyNumber) -> dict[str, Any]:
    """Serialize a fuzzy number in its shortest JSON form.

    Examples:
        >>> fuzzy_to_json(from_triangular(0, 0.5, 1))
        {'kind': 'triangular', 'a': 0.0, 'b': 0.5, 'c': 1.0}
    """
    if number.kind is FuzzyKind.SINGLETON:
        return {"kind": "singleton", "value": json_number(number.lo[-1])}
    if number.kind is FuzzyKind.TRIANGULAR:
        a, b, c = number.params
        return {"kind": "triangular", "a": json_number(a), "b": json_number(b), "c": json_number(c)}
    return {
        "kind": "general",
        "levels": [
            [json_number(alpha), [json_number(lo), json_number(hi)]]
            for alpha, lo, hi in zip(number.alphas, number.lo, number.hi)
        ],
    }


def _load(data: Union[str, dict]) -> Any:
    if not isinstance(data, str):
        return data
    try:
        return json.loads(data)
    except json.JSONDecodeError as e:
        raise ValidationError(
            f"malformed JSON at position {e.pos}: {e.msg}", {"position": e.pos, "source": data}
        )


def _number(payload: dict, key: str) -> float:
    if key not in payload:
        raise InvalidShapeError(f"fuzzy number JSON is missing {key!r}")
    value = payload[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidValueError(f"{key!r} must be a number, got {value!r}")
    return float(value)


def fuzzy_from_json(data: Union[str, dict], grid: Optional[AlphaGridConfig] = None) -> FuzzyNumber:
    """Parse the JSON fuzzy number format.

    Accepted shapes::

        {"kind": "singleton", "value": 1}
        {"kind": "triangular", "a": 0, "b": 0.5, "c": 1}
        {"kind": "general", "levels": [[0.01, [lo, hi]], ..., [1.0, [lo, hi]]]}

    General stacks are resampled onto ``grid`` when one is given.

    Raises:
        ValidationError: On malformed JSON or an invalid fuzzy number
    """
    payload = _load(data)
    if not isinstance(payload, dict):
        raise InvalidShapeError(f"fuzzy number JSON must be an object, got {payload!r}")
    kind = payload.get("kind")
    if kind == "singleton":
        return from_singleton(_number(payload, "value"), grid)
    if kind == "triangular":
        return from_triangular(
            _number(payload, "a"), _number(payload, "b"), _number(payload, "c"), grid
        )
    if kind == "general":
        levels = payload.get("levels")
        if not isinstance(levels, list) or not levels:
            raise InvalidShapeError("general fuzzy number needs a non-empty 'levels' list")
        try:
            ordered = sorted((float(alpha), float(cut[0]), float(cut[1])) for alpha, cut in levels)
        except (TypeError, ValueError, IndexError) as e:
            raise InvalidShapeError(f"levels must be [alpha, [lo, hi]] pairs: {e}")
        number = from_levels(
            [row[0] for row in ordered], [row[1] for row in ordered], [row[2] for row in ordered]
        )
        if grid is not None and number.alphas.size != grid.size:
            return resample(number, grid)
        return number
    raise InvalidShapeError(f"unknown fuzzy number kind {kind!r}")


def parse_target(text: str, grid: Optional[AlphaGridConfig] = None) -> Union[FuzzyNumber, Infinity]:
    """Limit target: "inf", "-inf" or a fuzzy number in JSON."""
    token = text.strip().lower()
    if token in ("inf", "+inf", "infinity"):
        return Infinity.PLUS
    if token in ("-inf", "-infinity"):
        return Infinity.MINUS
    return fuzzy_from_json(text, grid)


def target_to_json(target: Union[FuzzyNumber, Infinity]) -> Union[str, dict[str, Any]]:
    if isinstance(target, Infinity):
        return target.value
    return fuzzy_to_json(target)


def interval_to_json(interval: Interval) -> list[Union[float, str, None]]:
    return [json_number(interval.lo), json_number(interval.hi)]


# ============================================================================
# α-tables
# ============================================================================


def alpha_table(number: FuzzyNumber) -> list[tuple[float, float, float]]:
    """Rows (α, lo, hi) in ascending α."""
    return [
        (float(alpha), float(lo), float(hi))
        for alpha, lo, hi in zip(number.alphas, number.lo, number.hi)
    ]


def alpha_table_csv(rows: Iterable[tuple[float, float, float]]) -> str:
    lines = [CSV_HEADER]
    lines.extend(",".join(format_float(value) for value in row) for row in rows)
    return "\n".join(lines) + "\n"


def membership_csv(samples: Iterable[MembershipSample]) -> str:
    lines = ["x,grade"]
    lines.extend(f"{format_float(s.x)},{format_float(s.grade)}" for s in samples)
    return "\n".join(lines) + "\n"


# ============================================================================
# Results and reports
# ============================================================================


def certificate_to_json(certificate: Certificate) -> dict[str, Any]:
    return {
        "kind": certificate.kind.value,
        "certified": certificate.certified,
        "entries": [
            {
                "alpha": json_number(entry.alpha),
                "eps": json_number(entry.eps),
                "witness": json_number(entry.witness),
                "certified": entry.certified,
            }
            for entry in certificate.entries
        ],
        "residuals": [json_number(value) for value in certificate.residuals],
    }


def result_to_json(result: LimitResult) -> dict[str, Any]:
    """Serialize a limit result; one-sided parts of a two-sided result are nested."""
    approach = None
    if result.approach is not None:
        approach = {
            "target": target_to_json(result.approach.target),
            "side": result.approach.side.value,
        }
    return {
        "outcome": result.outcome.value,
        "reason": result.reason.value if result.reason is not None else None,
        "approach": approach,
        "value": fuzzy_to_json(result.value) if result.value is not None else None,
        "error": str(result.error) if result.error is not None else None,
        "steps": result.steps,
        "left": result_to_json(result.left) if result.left is not None else None,
        "right": result_to_json(result.right) if result.right is not None else None,
    }


def report_to_json(report: TheoremReport) -> dict[str, Any]:
    return {
        "theorem": report.theorem.value,
        "status": report.status.value,
        "max_alpha_gap": json_number(report.max_alpha_gap),
        "notes": report.notes,
        "witness_alpha": json_number(report.witness_alpha),
        "known_effect": report.known_effect,
    }


def sequential_to_json(report: SequentialReport) -> dict[str, Any]:
    return {
        "sequences": report.sequences,
        "terms": report.terms,
        "seed": report.seed,
        "passed": report.passed,
        "violations": [
            {
                "sequence": v.sequence,
                "direction": v.direction,
                "gap": json_number(v.gap),
                "alpha": json_number(v.alpha),
                "error": v.error,
            }
            for v in report.violations
        ],
    }


def parse_eps_grid(text: str) -> list[float]:
    """Comma separated ε values, e.g. "1e-1,1e-2"."""
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise InvalidValueError(f"eps list must be comma separated numbers, got {text!r}")


def dumps(payload: Any) -> str:
    """Deterministic compact JSON."""
    return json.dumps(payload, separators=(",", ":"), allow_nan=False, ensure_ascii=False)
