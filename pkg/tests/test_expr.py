import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from solvagen import expr as X
from solvagen.expr import DomainError, ParseError, diff, evaluate, parse, simplify, to_string


def ev(text, **env):
    return float(evaluate(parse(text), env))


@pytest.mark.parametrize(
    "text, env, expected",
    [
        ("exp(-2*r)", {"r": 0.0}, 1.0),
        ("r^2 + 1", {"r": 3.0}, 10.0),
        ("tanh(r)*sech(r)", {"r": 0.0}, 0.0),
        ("ln(g)", {"g": math.e}, 1.0),
        ("g^(1/2)", {"g": 2.25}, 1.5),
        ("2^3^2", {}, 512.0),
        ("-r^2", {"r": 3.0}, -9.0),
        ("pi", {}, math.pi),
        ("sec(r)", {"r": 0.5}, 1 / math.cos(0.5)),
        ("sqrt(r)", {"r": 9.0}, 3.0),
    ],
)
def test_parse_and_evaluate(text, env, expected):
    assert ev(text, **env) == pytest.approx(expected, rel=1e-14, abs=1e-15)


@pytest.mark.parametrize("text", ["r +", "(r", "r)", "2**r", "foo(r)", "r $ 2", ""])
def test_parse_errors_report_offset(text):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.offset >= 0


def test_unknown_identifier():
    with pytest.raises(ParseError):
        parse("r + q", variables={"r"})


@pytest.mark.parametrize("text, env", [("1/g", {"g": 0.0}), ("ln(g)", {"g": -1.0}), ("g^(1/2)", {"g": -4.0})])
def test_domain_errors_are_raised(text, env):
    with pytest.raises(DomainError):
        evaluate(parse(text), env)


def test_unbound_variable():
    with pytest.raises((KeyError, ValueError)):
        evaluate(parse("r + c"), {"r": 1.0})


@pytest.mark.parametrize(
    "text, env, expected",
    [
        ("r^2", {"r": 3.0}, 6.0),
        ("exp(-c*r)", {"r": 0.0, "c": 2.0}, -2.0),
        ("sin(2*r)", {"r": 0.0}, 2.0),
    ],
)
def test_diff_examples(text, env, expected):
    assert float(evaluate(diff(parse(text)), env)) == pytest.approx(expected, abs=1e-12)


DIFF_CASES = [
    "r^3 - 2*r + 1",
    "exp(-0.7*r)*sin(3*r)",
    "ln(1 + r^2)",
    "tanh(r)^2 + sech(2*r)",
    "cos(r)/(1 + r)",
    "sinh(r)*cosh(r/2)",
    "(1 - exp(-r))^(3/2)",
    "tan(r/3)",
    "r^(-5/2)",
]


@pytest.mark.parametrize("text", DIFF_CASES)
def test_diff_matches_central_difference(text):
    e = parse(text)
    f = X.lambdify(e)
    d = X.lambdify(diff(e))
    x = np.linspace(0.3, 2.5, 40)
    h = 1e-5
    fd = (f(x + h) - f(x - h)) / (2 * h)
    assert np.max(np.abs(d(x) - fd)) < 1e-6


def test_diff_linearity(rng):
    f, g = parse("exp(-r)*r^2"), parse("sin(r)/r")
    a, b = 1.7, -0.3
    lhs = X.lambdify(diff(a * f + b * g))
    rhs = lambda x: a * X.lambdify(diff(f))(x) + b * X.lambdify(diff(g))(x)
    x = rng.uniform(0.2, 4.0, 50)
    assert np.max(np.abs(lhs(x) - rhs(x))) < 1e-10


@pytest.mark.parametrize(
    "text, expected",
    [("0*r + r^1", "r"), ("(2+3)*g", "5*g"), ("exp(-c*r)*exp(-c*r)", None)],
)
def test_simplify_examples(text, expected):
    s = simplify(parse(text))
    if expected is not None:
        assert to_string(s) == expected
    env = {"r": 0.8, "c": 1.3, "g": 2.0}
    assert float(evaluate(s, env)) == pytest.approx(float(evaluate(parse(text), env)), rel=1e-12)
    if expected is None:
        assert float(evaluate(s, env)) == pytest.approx(math.exp(-2 * 1.3 * 0.8), rel=1e-12)


def test_pythagorean_rewrite():
    s = simplify(parse("3 - 3*tanh(2*r)^2"))
    assert "tanh" not in to_string(s)
    assert float(evaluate(s, {"r": 0.4})) == pytest.approx(3 / math.cosh(0.8) ** 2, rel=1e-13)


def test_evaluation_is_deterministic():
    e = parse("exp(-r)*sin(3*r)^2 + ln(1+r)/r")
    x = np.linspace(0.1, 5, 101)
    twin = parse("exp(-r)*sin(3*r)^2 + ln(1+r)/r")
    assert twin == e
    assert np.array_equal(evaluate(e, {"r": x}), evaluate(twin, {"r": x}))


# -- property tests ---------------------------------------------------------

_leaves = st.sampled_from(["r", "2", "3/2", "0.5", "r^2", "(1+r)"])


def _combine(children):
    unary = st.builds(lambda f, a: f"{f}({a})", st.sampled_from(["exp", "sin", "cos", "tanh", "sech"]), children)
    binary = st.builds(lambda a, op, b: f"({a}){op}({b})", children, st.sampled_from(["+", "-", "*"]), children)
    power = st.builds(lambda a, q: f"({a})^{q}", children, st.sampled_from(["2", "3", "(1/2)", "(-1)"]))
    return unary | binary | power


expressions = st.recursive(_leaves, _combine, max_leaves=6)


def _values(e, x):
    with np.errstate(all="ignore"):
        try:
            return np.asarray(evaluate(e, {"r": x}), dtype=float) * np.ones_like(x)
        except DomainError:
            return None


@settings(max_examples=150, deadline=None)
@given(expressions)
def test_print_parse_round_trip(text):
    e = parse(text)
    x = np.linspace(0.3, 1.7, 50)
    a, b = _values(e, x), _values(parse(to_string(e)), x)
    if a is None or not np.all(np.isfinite(a)) or np.max(np.abs(a)) > 1e100:
        return
    assert b is not None
    assert np.allclose(a, b, rtol=1e-12, atol=1e-300 + 1e-12 * np.max(np.abs(a)))


@settings(max_examples=150, deadline=None)
@given(expressions)
def test_simplify_preserves_value_and_is_idempotent(text):
    e = parse(text)
    s = simplify(e)
    assert simplify(s) == s
    x = np.linspace(0.3, 1.7, 50)
    a, b = _values(e, x), _values(s, x)
    if a is None or b is None or not np.all(np.isfinite(a)) or np.max(np.abs(a)) > 1e100:
        return
    assert np.allclose(a, b, rtol=1e-12, atol=1e-12 * np.max(np.abs(a)))


@settings(max_examples=80, deadline=None)
@given(expressions)
def test_diff_closed_and_matches_finite_difference(text):
    e = parse(text)
    d = diff(e)
    assert isinstance(d, X.Expr)
    x = np.linspace(0.4, 1.6, 25)
    h = 1e-5
    f0, fp, fm, dv = _values(e, x), _values(e, x + h), _values(e, x - h), _values(d, x)
    if any(v is None or not np.all(np.isfinite(v)) for v in (f0, fp, fm, dv)):
        return
    scale = max(1.0, np.max(np.abs(f0)), np.max(np.abs(dv)))
    if scale > 1e4:
        return
    assert np.max(np.abs(dv - (fp - fm) / (2 * h))) < 1e-6 * scale
