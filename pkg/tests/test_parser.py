import random
from fractions import Fraction

import pytest

from crbidisk.algebra import GaussRational, VarContext
from crbidisk.errors import (
    DecimalLiteral,
    DegreeTooHigh,
    FractionalExponent,
    LexicalError,
    NegativeExponent,
    ParseError,
    UnbalancedParentheses,
    UnexpectedToken,
    UnknownIdentifier,
    ZeroDenominator,
)
from crbidisk.parser import (
    Abs2,
    Add,
    Conj,
    Mul,
    Neg,
    Num,
    Pow,
    Sub,
    Var,
    check_real,
    degree_bound,
    parse,
    render,
    to_series,
)
from crbidisk.report import read_source

from generators import CUBIC_TEXT, QUADRIC_TEXT, quadric, random_ast, variables

CTX = VarContext(8)
z1, z2, z3, z4, zb1, zb2, zb3, zb4, v = variables(CTX)
I = GaussRational(0, 1)
FIXTURES = __import__("pathlib").Path(__file__).resolve().parents[1] / "src" / "crbidisk" / "fixtures"


def test_quadric_text():
    e = parse(QUADRIC_TEXT)
    assert e == Sub(Sub(Add(Abs2(Var("z1")), Abs2(Var("z2"))), Abs2(Var("z3"))), Abs2(Var("z4")))
    assert to_series(e, CTX) == quadric(CTX)


def test_cubic_term():
    e = parse("abs2(z1)*(z1+conj(z1))")
    assert e == Mul(Abs2(Var("z1")), Add(Var("z1"), Conj(Var("z1"))))
    assert to_series(e, CTX) == z1 * z1 * zb1 + z1 * zb1 * zb1
    assert to_series(parse(CUBIC_TEXT), CTX) == quadric(CTX) + z1 * z1 * zb1 + z1 * zb1 * zb1


def test_half_i_difference():
    f = to_series(parse("(1/2)*i*(z1-conj(z1))"), CTX)
    assert f == (I / 2) * z1 - (I / 2) * zb1
    assert f.render() == "-1/2*i*zb1 + 1/2*i*z1"


def test_precedence():
    assert parse("-z1^2") == Neg(Pow(Var("z1"), 2))
    assert parse("z1*z2^3") == Mul(Var("z1"), Pow(Var("z2"), 3))
    assert parse("z1-z2-z3") == Sub(Sub(Var("z1"), Var("z2")), Var("z3"))
    assert parse("2*-z1") == Mul(Num(Fraction(2)), Neg(Var("z1")))
    assert parse("z1^(2)") == Pow(Var("z1"), 2)
    assert to_series(parse("-z1^2"), CTX) == -(z1 * z1)


def test_check_real_examples():
    assert check_real(z1 * zb1)
    assert not check_real(z1)
    assert check_real(to_series(parse("i*(z1-conj(z1))"), CTX))


@pytest.mark.parametrize(
    "text, exc, line, col",
    [
        ("z1^(-1)", NegativeExponent, 1, 5),
        ("z1^-1", NegativeExponent, 1, 4),
        ("z1^(1/2)", FractionalExponent, 1, 5),
        ("z1 + 0.5", DecimalLiteral, 1, 6),
        ("z1 + .5", DecimalLiteral, 1, 6),
        ("z1 + w", UnknownIdentifier, 1, 6),
        ("z1 + zb1", UnknownIdentifier, 1, 6),
        ("z5", UnknownIdentifier, 1, 1),
        ("(z1 + z2", UnbalancedParentheses, 1, 1),
        ("z1 + z2)", UnbalancedParentheses, 1, 8),
        ("z1 +\n  @", LexicalError, 2, 3),
        ("1/0", ZeroDenominator, 1, 3),
        ("z1 z2", UnexpectedToken, 1, 4),
        ("", UnexpectedToken, 1, 1),
        ("conj z1", UnexpectedToken, 1, 6),
    ],
)
def test_parse_errors(text, exc, line, col):
    with pytest.raises(exc) as info:
        parse(text)
    assert isinstance(info.value, ParseError)
    assert (info.value.line, info.value.column) == (line, col)


def test_conj_hint_for_bar_variables():
    with pytest.raises(UnknownIdentifier, match="conj"):
        parse("zb1")


def test_input_size_limit():
    with pytest.raises(LexicalError):
        parse("z1+" * 30000 + "z1")


def test_degree_too_high_is_reported():
    with pytest.raises(DegreeTooHigh):
        to_series(parse("z1^9"), CTX)
    # cancelling high-degree terms are fine
    assert to_series(parse("z1^9 - z1^9 + z1"), CTX) == z1
    assert to_series(parse("z1^9"), CTX, strict=False).is_zero()
    with pytest.raises(DegreeTooHigh):
        to_series(parse("z1^100"), CTX)


def test_fixtures_parse_and_are_real():
    names = sorted(p.name for p in FIXTURES.glob("*.txt"))
    assert names == ["block_quartic.txt", "cubic_example.txt", "mixed_cubic.txt", "quadric.txt"]
    for p in FIXTURES.glob("*.txt"):
        assert check_real(to_series(parse(read_source(str(p))), CTX))


# random ASTs --------------------------------------------------------------------


def _reparse_equal(e):
    text = render(e)
    return parse(text) == e, text


def test_render_parse_round_trip():
    rng = random.Random(1)
    for _ in range(300):
        e = random_ast(rng)
        ok, text = _reparse_equal(e)
        assert ok, text


def test_to_series_is_homomorphism_on_200_pairs():
    rng = random.Random(2)
    ctx = VarContext(8)
    done = 0
    while done < 200:
        a, b = random_ast(rng, 2), random_ast(rng, 2)
        if degree_bound(a) + degree_bound(b) > 8 or 2 * degree_bound(a) > 8:
            continue
        sa, sb = to_series(a, ctx), to_series(b, ctx)
        assert to_series(Add(a, b), ctx) == sa + sb
        assert to_series(Sub(a, b), ctx) == sa - sb
        assert to_series(Mul(a, b), ctx) == sa * sb
        assert to_series(Pow(a, 2), ctx) == sa * sa
        assert to_series(Conj(a), ctx) == sa.conj()
        done += 1
