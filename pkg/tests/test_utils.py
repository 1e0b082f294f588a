"""Tests for JSON codecs and table formatting."""

import json
import math

import pytest

from fuzzylimit.config import AlphaGridConfig
from fuzzylimit.engine.limits import ApproachSpec, Infinity, fuzzy_limit
from fuzzylimit.engine.theorems import Status, Theorem, TheoremReport
from fuzzylimit.exceptions import InvalidShapeError, InvalidValueError, ValidationError
from fuzzylimit.expr import parse
from fuzzylimit.fuzzy import FuzzyKind, from_levels, from_singleton, from_triangular, membership_samples
from fuzzylimit.utils import (
    alpha_table,
    alpha_table_csv,
    dumps,
    format_float,
    fuzzy_from_json,
    fuzzy_to_json,
    json_number,
    membership_csv,
    parse_eps_grid,
    parse_target,
    report_to_json,
    result_to_json,
    target_to_json,
)


class TestFormatting:
    """Test cases for float formatting."""

    @pytest.mark.parametrize(
        "value, expected",
        [
            (1 / 3, "0.333333333333"),
            (-0.0, "0"),
            (2.0, "2"),
            (1e-20, "1e-20"),
            (math.inf, "inf"),
            (-math.inf, "-inf"),
            (math.nan, "nan"),
        ],
    )
    def test_format_float(self, value, expected):
        assert format_float(value) == expected

    def test_json_number(self):
        assert json_number(None) is None
        assert json_number(1.5) == 1.5
        assert json_number(math.inf) == "inf"
        assert math.copysign(1.0, json_number(-0.0)) == 1.0


class TestFuzzyJson:
    """Test cases for the fuzzy number JSON format."""

    def test_singleton(self):
        assert fuzzy_to_json(from_singleton(1.0)) == {"kind": "singleton", "value": 1.0}
        assert fuzzy_from_json('{"kind": "singleton", "value": 1}') == from_singleton(1.0)

    def test_triangular(self):
        payload = {"kind": "triangular", "a": 0, "b": 0.5, "c": 1}
        assert fuzzy_from_json(payload) == from_triangular(0.0, 0.5, 1.0)

    def test_general(self):
        number = from_levels([0.5, 1.0], [0.0, 0.25], [1.0, 0.75])
        payload = fuzzy_to_json(number)

        assert payload == {"kind": "general", "levels": [[0.5, [0.0, 1.0]], [1.0, [0.25, 0.75]]]}
        assert fuzzy_from_json(payload) == number

    def test_general_levels_any_order(self):
        payload = {"kind": "general", "levels": [[1.0, [0.25, 0.75]], [0.5, [0.0, 1.0]]]}
        assert fuzzy_from_json(payload).alphas.tolist() == [0.5, 1.0]

    def test_general_resampled_onto_grid(self):
        payload = {"kind": "general", "levels": [[0.5, [0.0, 1.0]], [1.0, [0.25, 0.75]]]}
        number = fuzzy_from_json(payload, AlphaGridConfig(levels=5))

        assert number.alphas.size == 4
        assert number.kind is FuzzyKind.GENERAL

    def test_malformed_json(self):
        with pytest.raises(ValidationError, match="malformed JSON"):
            fuzzy_from_json('{"kind": ')

    @pytest.mark.parametrize(
        "payload, error",
        [
            ('{"kind": "blob"}', InvalidShapeError),
            ('{"kind": "singleton"}', InvalidShapeError),
            ('{"kind": "singleton", "value": "one"}', InvalidValueError),
            ('{"kind": "singleton", "value": true}', InvalidValueError),
            ('{"kind": "general", "levels": []}', InvalidShapeError),
            ('{"kind": "general", "levels": [[1.0, [2.0]]]}', InvalidShapeError),
            ("[1, 2, 3]", InvalidShapeError),
        ],
    )
    def test_rejected(self, payload, error):
        with pytest.raises(error):
            fuzzy_from_json(payload)


class TestTargets:
    """Test cases for limit target parsing."""

    @pytest.mark.parametrize("text", ["inf", "+inf", "Infinity", " inf "])
    def test_plus_infinity(self, text):
        assert parse_target(text) is Infinity.PLUS

    def test_minus_infinity(self):
        assert parse_target("-inf") is Infinity.MINUS

    def test_fuzzy_target(self):
        assert parse_target('{"kind": "singleton", "value": 0}') == from_singleton(0.0)

    def test_to_json(self):
        assert target_to_json(Infinity.MINUS) == "-inf"
        assert target_to_json(from_singleton(2.0)) == {"kind": "singleton", "value": 2.0}


class TestTables:
    """Test cases for CSV output."""

    def test_alpha_table_csv(self):
        number = from_triangular(0.0, 1.0, 2.0, AlphaGridConfig(levels=3))
        csv = alpha_table_csv(alpha_table(number))
        assert csv == "alpha,lo,hi\n0.5,0.5,1.5\n1,1,1\n"

    def test_membership_csv(self):
        samples = membership_samples(from_triangular(0.0, 0.5, 1.0), 0.0, 1.0, 2)
        assert membership_csv(samples) == "x,grade\n0,0\n0.5,1\n1,0\n"

    def test_parse_eps_grid(self):
        assert parse_eps_grid("1e-1, 1e-2,") == [0.1, 0.01]
        with pytest.raises(InvalidValueError):
            parse_eps_grid("0.1,tiny")


class TestResults:
    """Test cases for result and report serialization."""

    def test_result_to_json(self):
        triangle = from_triangular(0.0, 0.5, 1.0)
        result = fuzzy_limit(parse("2*x"), ApproachSpec(triangle, "right"))
        payload = result_to_json(result)

        assert payload["outcome"] == "Converged"
        assert payload["reason"] is None
        assert payload["approach"] == {
            "target": {"kind": "triangular", "a": 0.0, "b": 0.5, "c": 1.0},
            "side": "right",
        }
        assert payload["value"]["kind"] == "general"
        assert payload["left"] is None

    def test_infinite_target_json(self):
        result = fuzzy_limit(parse("1/x"), ApproachSpec(Infinity.PLUS))
        assert result_to_json(result)["approach"] == {"target": "inf", "side": "both"}

    def test_report_to_json(self):
        report = TheoremReport(Theorem.SUM_RULE, Status.FAILS, max_alpha_gap=math.inf, notes="x")
        payload = report_to_json(report)

        assert payload["theorem"] == "SumRule"
        assert payload["status"] == "Fails"
        assert payload["max_alpha_gap"] == "inf"

    def test_dumps_is_compact(self):
        assert dumps({"a": [1, "β"]}) == '{"a":[1,"β"]}'
        assert json.loads(dumps({"v": json_number(math.nan)})) == {"v": "nan"}

    def test_dumps_rejects_raw_nan(self):
        with pytest.raises(ValueError):
            dumps({"v": math.nan})
