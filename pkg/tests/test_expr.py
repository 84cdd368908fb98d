import math

import pytest
from hypothesis import given, strategies as st

from conformable.errors import (
    DomainError,
    NonDifferentiableError,
    NonFiniteError,
    ParseError,
    UnknownIdentifierError,
)
from conformable.expr import (
    BinOp,
    Call,
    Const,
    FuncSpec,
    Neg,
    Var,
    evaluate,
    evaluate_body,
    evaluate_dual,
    parse,
    unparse,
)


# --------------------------------------------------------------------------
# parsing
# --------------------------------------------------------------------------

def test_parse_power():
    assert parse("t^2") == BinOp("^", Var(), Const(2.0))


def test_parse_precedence():
    assert parse("2*t + sin(t)") == BinOp(
        "+", BinOp("*", Const(2.0), Var()), Call("sin", Var())
    )


def test_parse_power_right_associative():
    assert parse("2^3^2") == BinOp("^", Const(2.0), BinOp("^", Const(3.0), Const(2.0)))


def test_parse_unary_minus_binds_looser_than_power():
    assert parse("-t^2") == Neg(BinOp("^", Var(), Const(2.0)))


def test_parse_signed_exponent():
    assert parse("t^-2") == BinOp("^", Var(), Neg(Const(2.0)))


def test_parse_division_left_associative():
    assert parse("8/4/2") == BinOp("/", BinOp("/", Const(8.0), Const(4.0)), Const(2.0))


def test_parse_pow_function_sugar():
    assert parse("pow(t, 3)") == parse("t^3")


def test_parse_number_forms():
    assert parse("1e-3") == Const(1e-3)
    assert parse(".5") == Const(0.5)
    assert parse("2.75e+1") == Const(27.5)


def test_parse_truncated_input_offset():
    with pytest.raises(ParseError) as exc:
        parse("t +")
    assert exc.value.offset == 3
    assert exc.value.expected  # a non-empty expected-token set


def test_parse_unknown_identifier():
    with pytest.raises(UnknownIdentifierError) as exc:
        parse("2*sinh(t)")
    assert exc.value.name == "sinh"
    assert exc.value.offset == 2
    assert "'t'" in exc.value.expected


def test_parse_bare_unknown_variable():
    with pytest.raises(UnknownIdentifierError):
        parse("x + 1")


def test_parse_missing_close_paren():
    with pytest.raises(ParseError) as exc:
        parse("sin(t")
    assert exc.value.offset == 5


def test_parse_trailing_garbage():
    with pytest.raises(ParseError) as exc:
        parse("1 2")
    assert exc.value.offset == 2


def test_parse_unexpected_character():
    with pytest.raises(ParseError) as exc:
        parse("t % 2")
    assert exc.value.offset == 2


# --------------------------------------------------------------------------
# printer round-trip
# --------------------------------------------------------------------------

def _exprs():
    leaves = st.one_of(
        st.just(Var()),
        st.builds(
            Const,
            st.floats(min_value=0.0, max_value=1e6, allow_nan=False, allow_infinity=False),
        ),
    )

    def extend(children):
        return st.one_of(
            st.builds(Neg, children),
            st.builds(
                BinOp, st.sampled_from("+-*/^"), children, children
            ),
            st.builds(
                Call,
                st.sampled_from(["sin", "cos", "exp", "ln", "abs", "sqrt"]),
                children,
            ),
        )

    return st.recursive(leaves, extend, max_leaves=24)


@given(_exprs())
def test_unparse_round_trips(node):
    assert parse(unparse(node)) == node


@given(st.sampled_from([
    "t^2", "2*t + sin(t)", "-t^2", "t^-2", "(t-1)^0.4", "ln(1+(t-0.0))",
    "abs(t-2)/exp(t)", "1 - 2 - 3", "2^3^2", "-(t+1)*t",
]))
def test_source_round_trips(source):
    first = parse(source)
    assert parse(unparse(first)) == first


# --------------------------------------------------------------------------
# evaluation
# --------------------------------------------------------------------------

def test_evaluate_basic():
    assert evaluate(FuncSpec.from_source("t^2"), 3.0, 0.0) == 9.0


def test_jump_applies_only_at_terminal():
    f = FuncSpec.from_source("t", jump_at_terminal=5.0)
    assert evaluate(f, 0.0, 0.0) == 5.0
    assert evaluate(f, 0.001, 0.0) == 0.001
    assert evaluate_body(f, 0.0) == 0.0


def test_zero_jump_matches_body():
    f = FuncSpec.from_source("t^2", jump_at_terminal=0.0)
    assert evaluate(f, 1.0, 1.0) == evaluate_body(f, 1.0)


@given(st.floats(min_value=1e-12, max_value=10.0))
def test_jump_differs_from_body_only_at_terminal(offset):
    f = FuncSpec.from_source("t", jump_at_terminal=5.0)
    assert evaluate(f, offset, 0.0) == evaluate_body(f, offset)


def test_evaluate_domain_errors():
    with pytest.raises(DomainError):
        evaluate(FuncSpec.from_source("ln(t)"), -1.0, -2.0)
    with pytest.raises(DomainError):
        evaluate(FuncSpec.from_source("1/t"), 0.0, 0.0)
    with pytest.raises(DomainError):
        evaluate(FuncSpec.from_source("t^0.5"), -1.0, -2.0)
    with pytest.raises(DomainError):
        evaluate(FuncSpec.from_source("sqrt(t)"), -4.0, -8.0)


def test_evaluate_overflow_is_nonfinite():
    with pytest.raises(NonFiniteError):
        evaluate(FuncSpec.from_source("exp(t^2)"), 100.0, 0.0)


def test_negative_base_integer_exponent_ok():
    assert evaluate(FuncSpec.from_source("t^2"), -3.0, -4.0) == 9.0
    assert evaluate(FuncSpec.from_source("t^3"), -2.0, -4.0) == -8.0


# --------------------------------------------------------------------------
# dual evaluation
# --------------------------------------------------------------------------

def test_dual_power_rule():
    d = evaluate_dual(FuncSpec.from_source("t^2"), 3.0)
    assert (d.value, d.deriv) == (9.0, 6.0)


def test_dual_sin_at_zero():
    d = evaluate_dual(FuncSpec.from_source("sin(t)"), 0.0)
    assert d.value == 0.0
    assert d.deriv == 1.0


def test_dual_fractional_power_against_central_difference():
    f = FuncSpec.from_source("t^0.4")
    d = evaluate_dual(f, 1.0)
    h = 1e-6
    fd = (evaluate_body(f, 1.0 + h) - evaluate_body(f, 1.0 - h)) / (2.0 * h)
    assert d.value == pytest.approx(1.0)
    assert d.deriv == pytest.approx(0.4)
    assert abs(d.deriv - fd) <= 1e-6 * max(1.0, abs(d.deriv))


def test_dual_abs_at_kink_raises():
    with pytest.raises(NonDifferentiableError):
        evaluate_dual(FuncSpec.from_source("abs(t-2)"), 2.0)


def test_dual_ignores_jump():
    f = FuncSpec.from_source("t", jump_at_terminal=5.0)
    d = evaluate_dual(f, 0.0)
    assert (d.value, d.deriv) == (0.0, 1.0)


@given(
    st.sampled_from([
        "t^2", "sin(t)", "cos(t)", "exp(t)", "t^0.4", "sqrt(t)",
        "ln(t)", "t^2*sin(t)", "exp(t)/(2+cos(t))", "sin(t^2)+t^3",
    ]),
    st.floats(min_value=0.1, max_value=3.0),
)
def test_dual_matches_central_difference(source, t):
    f = FuncSpec.from_source(source)
    d = evaluate_dual(f, t)
    h = 1e-6
    fd = (evaluate_body(f, t + h) - evaluate_body(f, t - h)) / (2.0 * h)
    assert abs(d.deriv - fd) <= 1e-5 * max(1.0, abs(d.deriv))
