"""Tests for the expression tokenizer, parser, printer and scalar evaluator."""

import math

import pytest

from fuzzylimit.exceptions import (
    DivisionByZeroIntervalError,
    DomainViolationError,
    LexError,
    ParseError,
)
from fuzzylimit.expr import (
    Add,
    Comparison,
    Const,
    Div,
    Indexing,
    Neg,
    Piecewise,
    PowInt,
    TokenKind,
    Unary,
    Var,
    count_indices,
    eval_scalar,
    parse,
    substitute,
    to_text,
    tokenize,
    variable_name,
)
from fuzzylimit.fuzzy import FuzzyKind


class TestTokenize:
    """Test cases for the tokenizer."""

    def test_basic_tokens(self):
        kinds = [token.kind for token in tokenize("2*x^3 - 1")]
        assert kinds == [
            TokenKind.NUMBER,
            TokenKind.STAR,
            TokenKind.IDENT,
            TokenKind.CARET,
            TokenKind.NUMBER,
            TokenKind.MINUS,
            TokenKind.NUMBER,
        ]

    def test_triangular_literal(self):
        (token,) = tokenize("(1, 2, 3)")
        assert token.kind is TokenKind.TRIANGLE
        assert token.value == (1.0, 2.0, 3.0)

    def test_rational_triangle_points(self):
        (token,) = tokenize("(1/3, 1/2, 1)")
        assert token.value == (1 / 3, 0.5, 1.0)

    def test_parenthesized_expression_is_not_a_triangle(self):
        kinds = [token.kind for token in tokenize("(x + 1)")]
        assert kinds[0] is TokenKind.LPAREN

    def test_unknown_character(self):
        with pytest.raises(LexError) as excinfo:
            tokenize("x $ 1")
        assert excinfo.value.position == 2

    def test_offset_counts_bytes(self):
        with pytest.raises(LexError) as excinfo:
            tokenize("x\u00a0+ ?")
        assert excinfo.value.offset == 5
        assert excinfo.value.position == 4
        assert "at offset 5" in excinfo.value.message

    def test_annotate_after_non_ascii(self):
        """The caret sits under the bad character even after multi-byte ones."""
        source = "x\u00a0+ \u03b1 + \u221e"
        with pytest.raises(LexError) as excinfo:
            tokenize(source)
        lines = excinfo.value.annotate().splitlines()

        assert lines[2].index("^") - 2 == source.index("\u03b1")
        assert excinfo.value.offset == len(source[: source.index("\u03b1")].encode("utf-8"))

    @pytest.mark.parametrize("text", ["1e400 * x", "x + (1e400, 1, 2)", "x + (1, 2, 1e999/1e-999)"])
    def test_literal_out_of_range(self, text):
        with pytest.raises(LexError, match="out of range") as excinfo:
            tokenize(text)
        assert text[excinfo.value.position] in "1("


class TestParse:
    """Test cases for the parser."""

    # ====================================================================
    # Tests: precedence
    # ====================================================================

    def test_power_binds_tighter_than_unary_minus(self):
        node = parse("-x^2")
        assert isinstance(node, Neg)
        assert isinstance(node.operand, PowInt)

    def test_power_is_right_associative(self):
        node = parse("x^2^3")
        assert isinstance(node, PowInt)
        assert node.exponent == 8

    def test_quotient_structure(self):
        node = parse("(x^3 - 4)/(x^2 + 1)")
        assert isinstance(node, Div)
        assert isinstance(node.right, Add)

    def test_functions(self):
        node = parse("abs(sin(x))/sin(x)")
        assert isinstance(node.left, Unary)
        assert node.left.func == "abs"

    def test_constants(self):
        node = parse("(1, 2, 3)*x + 2")
        assert node.left.left.value.kind is FuzzyKind.TRIANGULAR
        assert node.right.value.kind is FuzzyKind.SINGLETON

    def test_any_single_variable_name(self):
        assert variable_name(parse("u^2 + u")) == "u"
        assert variable_name(parse("3")) is None

    # ====================================================================
    # Tests: piecewise
    # ====================================================================

    def test_piecewise(self):
        node = parse("{2*x + 1 if x > 1 ; 5 if x == 1 ; 7*x^2 - 4 if x < 1}")
        assert isinstance(node, Piecewise)
        assert [guard.op for guard, _ in node.branches] == [
            Comparison.GT,
            Comparison.EQ,
            Comparison.LT,
        ]

    def test_overlapping_guards(self):
        with pytest.raises(ParseError, match="overlap"):
            parse("{x if x > 0 ; 1 if x > 1}")

    def test_overlapping_point_guard(self):
        with pytest.raises(ParseError, match="overlap"):
            parse("{x if x < 2 ; 1 if x == 1}")

    # ====================================================================
    # Tests: errors
    # ====================================================================

    def test_missing_operand(self):
        with pytest.raises(ParseError) as excinfo:
            parse("x +")
        assert "number" in excinfo.value.expected

    def test_unbalanced_parenthesis(self):
        with pytest.raises(ParseError) as excinfo:
            parse("(x + 1")
        assert "')'" in excinfo.value.expected

    def test_non_integer_exponent(self):
        with pytest.raises(ParseError, match="exponent"):
            parse("x^0.5")

    def test_second_variable(self):
        with pytest.raises(ParseError, match="already uses variable"):
            parse("x + y")

    def test_trailing_token(self):
        with pytest.raises(ParseError, match="unexpected"):
            parse("x 2")

    def test_bad_triangle(self):
        with pytest.raises(ParseError, match="triangular"):
            parse("(3, 2, 1)*x")

    def test_annotate_points_at_error(self):
        with pytest.raises(ParseError) as excinfo:
            parse("x + * 2")
        lines = excinfo.value.annotate().splitlines()
        assert lines[1].strip() == "x + * 2"
        assert lines[2].index("^") == 2 + excinfo.value.position


class TestPrinter:
    """Test cases for to_text."""

    @pytest.mark.parametrize(
        "text",
        [
            "x^2 + x - 3",
            "(x^3 - 4)/(x^2 + 1)",
            "(1, 2, 3)*x^2 - (0, 1/2, 1)",
            "-x^2*sin(1/x)",
            "abs(sin(x))/sin(x)",
            "{2*x + 1 if x > 1 ; 5 if x == 1 ; 7*x^2 - 4 if x < 1}",
            "{x if x < -1 ; 0 if x > -1}",
        ],
    )
    def test_reparse_gives_equal_tree(self, text):
        node = parse(text)
        assert parse(to_text(node)) == node

    def test_fully_parenthesized(self):
        assert to_text(parse("x + 2*x")) == "(x + (2.0 * x))"


class TestScalar:
    """Test cases for scalar evaluation, substitution and index counting."""

    def test_eval_polynomial(self):
        assert eval_scalar(parse("x^2 + x - 3"), 1.0) == -1.0

    def test_eval_fuzzy_constant_uses_core(self):
        assert eval_scalar(parse("(1, 2, 3)*x"), 2.0) == 4.0

    def test_eval_division_by_zero(self):
        with pytest.raises(DivisionByZeroIntervalError):
            eval_scalar(parse("1/x"), 0.0)

    def test_eval_sqrt_domain(self):
        with pytest.raises(DomainViolationError):
            eval_scalar(parse("sqrt(x)"), -1.0)

    def test_eval_exp_overflow(self):
        assert eval_scalar(parse("exp(x)"), 1000.0) == math.inf

    def test_eval_piecewise(self):
        node = parse("{2*x + 1 if x > 1 ; 5 if x == 1 ; 7*x^2 - 4 if x < 1}")
        assert eval_scalar(node, 2.0) == 5.0
        assert eval_scalar(node, 1.0) == 5.0
        assert eval_scalar(node, 0.0) == -4.0

    def test_piecewise_gap(self):
        node = parse("{1 if x > 1 ; -1 if x < 0}")
        with pytest.raises(DomainViolationError):
            eval_scalar(node, 0.5)

    def test_substitute(self):
        composite = substitute(parse("u^2"), parse("x + 1"))
        assert composite == PowInt(Add(Var("x"), parse("1")), 2)
        assert eval_scalar(composite, 2.0) == 9.0

    def test_substitute_into_guard(self):
        composite = substitute(parse("{u if u > 0 ; -u if u < 0}"), parse("x - 1"))
        assert eval_scalar(composite, 0.0) == 1.0
        assert eval_scalar(composite, 3.0) == 2.0

    @pytest.mark.parametrize(
        "text, positional, occurrence",
        [
            ("x", 1, 1),
            ("(x^3 - 4)/(x^2 + 1)", 3, 5),
            ("x*x", 1, 2),
            ("(1, 2, 3)*x^2", 3, 3),
            ("5", 0, 0),
        ],
    )
    def test_count_indices(self, text, positional, occurrence):
        node = parse(text)
        assert count_indices(node, Indexing.POSITIONAL) == positional
        assert count_indices(node, Indexing.OCCURRENCE) == occurrence

    def test_const_node(self):
        node = parse("2")
        assert isinstance(node, Const)
        assert node.value.is_crisp
