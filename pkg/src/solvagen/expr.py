"""Small single-variable computer algebra core.

Expressions are immutable trees built from ``Const``, ``Var``, ``Add``,
``Mul``, ``Pow`` (rational exponent only) and ``Func`` (exp, ln, sin, cos,
tan, sinh, cosh, tanh, sech).  General real powers are written as
``exp(q*ln(base))`` so that differentiation stays inside the node set.

Grammar accepted by :func:`parse`::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := ("-" | "+") unary | power
    power   := atom ("^" unary)?          # right associative, -x^2 == -(x^2)
    atom    := NUMBER | NAME | NAME "(" expr ")" | "(" expr ")"

Names are ``[a-zA-Z_][a-zA-Z0-9_]*``.  ``pi`` and ``e`` are constants;
``sqrt``, ``sec``, ``csc``, ``cot``, ``csch``, ``coth`` and ``log`` are
accepted as sugar and rewritten into the core node set.
"""

from __future__ import annotations

import contextvars
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Union

import numpy as np

Number = Union[Fraction, float]

FUNCTIONS = ("exp", "ln", "sin", "cos", "tan", "sinh", "cosh", "tanh", "sech")


class ParseError(ValueError):
    """Raised for malformed expression text; ``offset`` is a byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte {offset}")
        self.offset = offset


class DomainError(ValueError):
    """Evaluation left the real domain (log of non-positive, pole, even root of negative)."""


def _num(value) -> Number:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return Fraction(int(value))
    if isinstance(value, (float, np.floating)):
        return float(value)
    raise TypeError(f"not a real number: {value!r}")


class Expr:
    """Base class; supports Python arithmetic operators for building trees."""

    __slots__ = ()

    def __add__(self, other):
        return Add((self, as_expr(other)))

    def __radd__(self, other):
        return Add((as_expr(other), self))

    def __sub__(self, other):
        return Add((self, Mul((Const(Fraction(-1)), as_expr(other)))))

    def __rsub__(self, other):
        return Add((as_expr(other), Mul((Const(Fraction(-1)), self))))

    def __mul__(self, other):
        return Mul((self, as_expr(other)))

    def __rmul__(self, other):
        return Mul((as_expr(other), self))

    def __truediv__(self, other):
        return Mul((self, Pow(as_expr(other), Fraction(-1))))

    def __rtruediv__(self, other):
        return Mul((as_expr(other), Pow(self, Fraction(-1))))

    def __neg__(self):
        return Mul((Const(Fraction(-1)), self))

    def __pow__(self, q):
        q = _num(q)
        if isinstance(q, float):
            q = Fraction(q).limit_denominator(10**6)
        return Pow(self, q)

    def __str__(self):
        return to_string(self)

    def __call__(self, bindings: Mapping[str, object] | None = None, **kwargs):
        return evaluate(self, bindings, **kwargs)


@dataclass(frozen=True, slots=True)
class Const(Expr):
    value: Number


@dataclass(frozen=True, slots=True)
class Var(Expr):
    name: str


@dataclass(frozen=True, slots=True)
class Add(Expr):
    args: tuple


@dataclass(frozen=True, slots=True)
class Mul(Expr):
    args: tuple


@dataclass(frozen=True, slots=True)
class Pow(Expr):
    base: Expr
    exp: Fraction


@dataclass(frozen=True, slots=True)
class Func(Expr):
    name: str
    arg: Expr


ZERO = Const(Fraction(0))
ONE = Const(Fraction(1))


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, str):
        return parse(value)
    return Const(_num(value))


def var(name: str) -> Var:
    return Var(name)


def const(value) -> Const:
    return Const(_num(value))


def _func(name):
    def build(arg) -> Expr:
        return Func(name, as_expr(arg))

    build.__name__ = name
    return build


exp = _func("exp")
ln = _func("ln")
sin = _func("sin")
cos = _func("cos")
tan = _func("tan")
sinh = _func("sinh")
cosh = _func("cosh")
tanh = _func("tanh")
sech = _func("sech")


def sqrt(arg) -> Expr:
    return Pow(as_expr(arg), Fraction(1, 2))


def free_symbols(e: Expr) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Const):
        return set()
    if isinstance(e, (Add, Mul)):
        out: set[str] = set()
        for a in e.args:
            out |= free_symbols(a)
        return out
    if isinstance(e, Pow):
        return free_symbols(e.base)
    return free_symbols(e.arg)


def substitute(e: Expr, mapping: Mapping[str, object]) -> Expr:
    """Replace variables by expressions or numbers (no simplification)."""
    mapping = {k: as_expr(v) for k, v in mapping.items()}

    def sub(node):
        if isinstance(node, Var):
            return mapping.get(node.name, node)
        if isinstance(node, Const):
            return node
        if isinstance(node, Add):
            return Add(tuple(sub(a) for a in node.args))
        if isinstance(node, Mul):
            return Mul(tuple(sub(a) for a in node.args))
        if isinstance(node, Pow):
            return Pow(sub(node.base), node.exp)
        return Func(node.name, sub(node.arg))

    return sub(e)


# -- printing ---------------------------------------------------------------

_ATOM, _POW, _MUL, _ADD = 5, 4, 2, 1


def _const_text(v: Number) -> tuple[str, int]:
    if isinstance(v, Fraction):
        if v.denominator == 1:
            return str(v.numerator), (_MUL if v < 0 else _ATOM)
        return f"{v.numerator}/{v.denominator}", _MUL
    if not math.isfinite(v):
        raise ValueError(f"cannot print non-finite constant {v!r}")
    text = repr(float(v))
    return text, (_MUL if v < 0 else _ATOM)


def _wrap(text: str, prec: int, need: int) -> str:
    return f"({text})" if prec < need else text


def _exp_text(q: Fraction) -> str:
    if q.denominator == 1 and q >= 0:
        return str(q.numerator)
    return f"({q.numerator}/{q.denominator})" if q.denominator != 1 else f"({q.numerator})"


def _fmt(e: Expr) -> tuple[str, int]:
    if isinstance(e, Const):
        return _const_text(e.value)
    if isinstance(e, Var):
        return e.name, _ATOM
    if isinstance(e, Func):
        return f"{e.name}({_fmt(e.arg)[0]})", _ATOM
    if isinstance(e, Pow):
        if e.exp < 0:
            return _fmt_mul(Mul((e,)))
        base, prec = _fmt(e.base)
        return f"{_wrap(base, prec, _ATOM)}^{_exp_text(e.exp)}", _POW
    if isinstance(e, Add):
        if not e.args:
            return "0", _ATOM
        parts = []
        for i, term in enumerate(e.args):
            text, prec = _fmt(term)
            if prec <= _ADD:
                text = f"({text})"
            if i == 0:
                parts.append(text)
            elif text.startswith("-"):
                parts.append(f" - {text[1:]}")
            else:
                parts.append(f" + {text}")
        return "".join(parts), _ADD
    if isinstance(e, Mul):
        return _fmt_mul(e)
    raise TypeError(f"unknown node {e!r}")


def _fmt_mul(e: Mul) -> tuple[str, int]:
    if not e.args:
        return "1", _ATOM
    coeff: Number = Fraction(1)
    num, den = [], []
    for f in e.args:
        if isinstance(f, Const):
            coeff = coeff * f.value
        elif isinstance(f, Pow) and f.exp < 0:
            den.append(Pow(f.base, -f.exp) if f.exp != -1 else f.base)
        else:
            num.append(f)
    negative = coeff < 0
    coeff = -coeff if negative else coeff
    num_txt = [_wrap(*_fmt(f), _POW) for f in num]
    den_txt = [_wrap(*_fmt(f), _POW) for f in den]
    if isinstance(coeff, Fraction):
        if coeff.numerator != 1 or not num_txt:
            num_txt.insert(0, str(coeff.numerator))
        if coeff.denominator != 1:
            den_txt.insert(0, str(coeff.denominator))
    elif coeff != 1.0 or not num_txt:
        num_txt.insert(0, _const_text(coeff)[0])
    text = "*".join(num_txt)
    if den_txt:
        if len(den_txt) == 1:
            text += "/" + den_txt[0]
        else:
            text += "/(" + "*".join(den_txt) + ")"
    if negative:
        text = "-" + text
    return text, _MUL


@lru_cache(maxsize=65536)
def to_string(e: Expr) -> str:
    """Render ``e`` in the grammar accepted by :func:`parse`."""
    return _fmt(e)[0]


# -- parsing ----------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[a-zA-Z_][a-zA-Z0-9_]*)|(?P<op>[-+*/^()]))"
)

_SUGAR = {
    "sqrt": lambda a: Pow(a, Fraction(1, 2)),
    "log": lambda a: Func("ln", a),
    "sec": lambda a: Pow(Func("cos", a), Fraction(-1)),
    "csc": lambda a: Pow(Func("sin", a), Fraction(-1)),
    "cot": lambda a: Mul((Func("cos", a), Pow(Func("sin", a), Fraction(-1)))),
    "csch": lambda a: Pow(Func("sinh", a), Fraction(-1)),
    "coth": lambda a: Mul((Func("cosh", a), Pow(Func("sinh", a), Fraction(-1)))),
}
_CONSTANTS = {"pi": math.pi, "e": math.e}


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[start]!r}", len(text[:start].encode()))
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), len(text[:start].encode())))
        pos = m.end()
    tokens.append(("end", "", len(text.encode())))
    return tokens


class _Parser:
    def __init__(self, text: str, variables):
        self.tokens = _tokenize(text)
        self.i = 0
        self.variables = None if variables is None else set(variables)

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, text, off = self.take()
        if text != value or kind == "end":
            raise ParseError(f"expected {value!r}, found {text or 'end of input'!r}", off)

    def parse(self) -> Expr:
        e = self.expr()
        kind, text, off = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {text!r}", off)
        return e

    def expr(self) -> Expr:
        terms = [self.term()]
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            t = self.term()
            terms.append(t if op == "+" else _negate(t))
        return terms[0] if len(terms) == 1 else Add(tuple(terms))

    def term(self) -> Expr:
        factors = [self.unary()]
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            f = self.unary()
            factors.append(f if op == "*" else Pow(f, Fraction(-1)))
        return factors[0] if len(factors) == 1 else Mul(tuple(factors))

    def unary(self) -> Expr:
        kind, text, _ = self.peek()
        if kind == "op" and text in ("-", "+"):
            self.take()
            inner = self.unary()
            return inner if text == "+" else _negate(inner)
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.take()
            return _make_power(base, self.unary())
        return base

    def atom(self) -> Expr:
        kind, text, off = self.take()
        if kind == "num":
            return Const(Fraction(text))
        if kind == "name":
            if self.peek()[1] == "(" and self.peek()[0] == "op":
                if text not in FUNCTIONS and text not in _SUGAR:
                    raise ParseError(f"unknown function {text!r}", off)
                self.take()
                arg = self.expr()
                self.expect(")")
                return _SUGAR[text](arg) if text in _SUGAR else Func(text, arg)
            if text in _CONSTANTS:
                return Const(_CONSTANTS[text])
            if text in FUNCTIONS or text in _SUGAR:
                raise ParseError(f"function {text!r} needs an argument", off)
            if self.variables is not None and text not in self.variables:
                raise ParseError(f"unknown identifier {text!r}", off)
            return Var(text)
        if kind == "op" and text == "(":
            e = self.expr()
            self.expect(")")
            return e
        raise ParseError(f"unexpected {text or 'end of input'!r}", off)


def _negate(e: Expr) -> Expr:
    if isinstance(e, Const):
        return Const(-e.value)
    return Mul((Const(Fraction(-1)), e))


def _make_power(base: Expr, exponent: Expr) -> Expr:
    folded = simplify(exponent)
    if isinstance(folded, Const):
        q = folded.value
        if isinstance(q, Fraction):
            return Pow(base, q)
        if float(q).is_integer():
            return Pow(base, Fraction(int(q)))
    return Func("exp", Mul((exponent, Func("ln", base))))


def parse(text: str, variables=None) -> Expr:
    """Parse ``text``; if ``variables`` is given, other free names are errors."""
    return _Parser(text, variables).parse()


# -- evaluation -------------------------------------------------------------


def _any(mask) -> bool:
    return bool(np.any(mask))


def _ev(e: Expr, env):
    if isinstance(e, Const):
        return float(e.value)
    if isinstance(e, Var):
        try:
            value = env[e.name]
        except KeyError:
            raise KeyError(f"unbound variable {e.name!r}") from None
        return np.asarray(value, dtype=float) if not isinstance(value, float) else value
    if isinstance(e, Add):
        total = 0.0
        for a in e.args:
            total = total + _ev(a, env)
        return total
    if isinstance(e, Mul):
        prod = 1.0
        for a in e.args:
            prod = prod * _ev(a, env)
        return prod
    if isinstance(e, Pow):
        b = _ev(e.base, env)
        q = e.exp
        if q < 0 and _any(np.asarray(b) == 0):
            raise DomainError(f"pole: zero raised to {q} in {to_string(e)}")
        if q.denominator == 1:
            return b ** q.numerator if isinstance(b, float) else np.power(b, q.numerator)
        if _any(np.asarray(b) < 0):
            if q.denominator % 2 == 0:
                raise DomainError(f"even root of negative value in {to_string(e)}")
            sign = np.sign(b) ** (q.numerator % 2)
            return sign * np.abs(b) ** float(q)
        return b ** float(q) if isinstance(b, float) else np.power(b, float(q))
    a = _ev(e.arg, env)
    name = e.name
    if name == "ln":
        if _any(np.asarray(a) <= 0):
            raise DomainError(f"logarithm of non-positive value in {to_string(e)}")
        return np.log(a)
    if name == "sech":
        return 1.0 / np.cosh(a)
    return getattr(np, name)(a)


def evaluate(e: Expr, bindings: Mapping[str, object] | None = None, **kwargs):
    """Evaluate at real scalars or numpy arrays; scalar in, float out."""
    env = dict(bindings or {})
    env.update(kwargs)
    for k, v in env.items():
        if np.ndim(v) == 0:
            env[k] = float(v)
    with np.errstate(over="ignore", under="ignore"):
        value = _ev(e, env)
    if np.ndim(value) == 0:
        return float(value)
    return value


def lambdify(e: Expr, name: str = "r"):
    """Return ``f(x) -> evaluate(e, {name: x})``."""
    return lambda x: evaluate(e, {name: x})


# -- simplification ---------------------------------------------------------

_AT_ZERO = {"exp": 1, "sin": 0, "cos": 1, "tan": 0, "sinh": 0, "cosh": 1, "tanh": 0, "sech": 1}


def _key(e: Expr) -> str:
    return to_string(e)


def _split_coeff(t: Expr) -> tuple[Number, Expr]:
    if isinstance(t, Const):
        return t.value, ONE
    if isinstance(t, Mul) and t.args and isinstance(t.args[0], Const):
        rest = t.args[1:]
        return t.args[0].value, (rest[0] if len(rest) == 1 else Mul(rest))
    return Fraction(1), t


_POSITIVE: contextvars.ContextVar[frozenset] = contextvars.ContextVar("positive", default=frozenset())


def is_positive(e: Expr) -> bool:
    """Conservative test that ``e`` is strictly positive wherever it is defined."""
    if isinstance(e, Const):
        return e.value > 0
    if isinstance(e, Var):
        return e.name in _POSITIVE.get()
    if isinstance(e, Func):
        return e.name in ("exp", "cosh", "sech")
    if isinstance(e, Pow):
        return is_positive(e.base)
    if isinstance(e, (Mul, Add)):
        return bool(e.args) and all(is_positive(a) for a in e.args)
    return False


def _fold_func(name: str, v: Number) -> Expr | None:
    if v == 0 and name in _AT_ZERO:
        return Const(Fraction(_AT_ZERO[name]))
    if name == "ln":
        if v == 1:
            return ZERO
        if v <= 0:
            return None
        return Const(math.log(v))
    x = float(v)
    if name == "sech":
        return Const(1.0 / math.cosh(x))
    return Const(float(getattr(math, name)(x)))


def _simp_func(name: str, a: Expr) -> Expr:
    if isinstance(a, Const):
        folded = _fold_func(name, a.value)
        if folded is not None:
            return folded
    if name == "exp":
        if isinstance(a, Func) and a.name == "ln":
            return a.arg
        terms = a.args if isinstance(a, Add) else (a,)
        powers, rest = [], []
        for t in terms:
            c, core = _split_coeff(t)
            if isinstance(core, Func) and core.name == "ln" and isinstance(c, Fraction):
                powers.append(_simp_pow(core.arg, c))
            else:
                rest.append(t)
        if powers:
            if rest:
                powers.append(Func("exp", _simp_add(rest)))
            return _simp_mul(powers)
    if name == "ln" and isinstance(a, Func) and a.name == "exp":
        return a.arg
    return Func(name, a)


def _exact_root(v: Fraction, q: Fraction) -> Fraction | None:
    if v <= 0:
        return None
    d = q.denominator
    num = round(v.numerator ** (1.0 / d))
    den = round(v.denominator ** (1.0 / d))
    for n_ in (num - 1, num, num + 1):
        for d_ in (den - 1, den, den + 1):
            if n_ > 0 and d_ > 0 and n_**d and Fraction(n_, d_) ** d == v:
                return Fraction(n_, d_) ** q.numerator
    return None


def _simp_pow(base: Expr, q: Fraction) -> Expr:
    if q == 0:
        return ONE
    if q == 1:
        return base
    if isinstance(base, Const):
        v = base.value
        if v == 0:
            return ZERO if q > 0 else Pow(base, q)
        if q.denominator == 1:
            return Const(v ** q.numerator)
        if isinstance(v, Fraction):
            root = _exact_root(v, q)
            if root is not None:
                return Const(root)
        if v > 0:
            return Const(float(v) ** float(q))
        if q.denominator % 2 == 1:
            return Const(-((-float(v)) ** float(q)) if q.numerator % 2 else (-float(v)) ** float(q))
        return Pow(base, q)
    if isinstance(base, Pow):
        if q.denominator == 1 or is_positive(base.base):
            return _simp_pow(base.base, base.exp * q)
        return Pow(base, q)
    if isinstance(base, Mul):
        if q.denominator == 1:
            return _simp_mul([_simp_pow(f, q) for f in base.args])
        pos = [f for f in base.args if is_positive(f)]
        if pos:
            rest = [f for f in base.args if not is_positive(f)]
            factors = [_simp_pow(f, q) for f in pos]
            if rest:
                factors.append(Pow(rest[0] if len(rest) == 1 else Mul(tuple(rest)), q))
            return _simp_mul(factors)
        return Pow(base, q)
    if isinstance(base, Func) and base.name == "exp":
        return _simp_func("exp", _simp_mul([Const(q), base.arg]))
    return Pow(base, q)


def _simp_add(args) -> Expr:
    flat = []
    stack = list(args)
    while stack:
        a = stack.pop(0)
        if isinstance(a, Add):
            stack[0:0] = list(a.args)
        else:
            flat.append(a)
    constant: Number = Fraction(0)
    collected: dict[str, list] = {}
    for t in flat:
        c, core = _split_coeff(t)
        if core == ONE:
            constant = constant + c
            continue
        k = _key(core)
        if k in collected:
            collected[k][0] = collected[k][0] + c
        else:
            collected[k] = [c, core]
    terms = []
    for k in sorted(collected):
        c, core = collected[k]
        if c == 0:
            continue
        terms.append(core if c == 1 else _simp_mul([Const(c), core]))
    if constant != 0:
        terms.append(Const(constant))
    if len(terms) == 2 and isinstance(terms[1], Const):
        # k - k*tanh(u)^2 -> k*sech(u)^2, likewise for sin/cos
        c, core = _split_coeff(terms[0])
        if c == -terms[1].value and isinstance(core, Pow) and core.exp == 2 and isinstance(core.base, Func):
            swap = {"tanh": "sech", "sin": "cos", "cos": "sin"}.get(core.base.name)
            if swap:
                return _simp_mul([terms[1], Pow(Func(swap, core.base.arg), Fraction(2))])
    if not terms:
        return ZERO
    if len(terms) == 1:
        return terms[0]
    return Add(tuple(terms))


def _simp_mul(args, depth: int = 0) -> Expr:
    flat = []
    stack = list(args)
    while stack:
        a = stack.pop(0)
        if isinstance(a, Mul):
            stack[0:0] = list(a.args)
        else:
            flat.append(a)
    coeff: Number = Fraction(1)
    exps = []
    powers: dict[str, list] = {}
    for f in flat:
        if isinstance(f, Const):
            coeff = coeff * f.value
            continue
        if isinstance(f, Func) and f.name == "exp":
            exps.append(f.arg)
            continue
        base, q = (f.base, f.exp) if isinstance(f, Pow) else (f, Fraction(1))
        k = _key(base)
        if k in powers:
            powers[k][1] += q
        else:
            powers[k] = [base, q]
    if coeff == 0:
        return ZERO
    factors = []
    for k in sorted(powers):
        base, q = powers[k]
        if q != 0:
            factors.append(_simp_pow(base, q))
    if len(exps) > 1:
        factors.append(_simp_func("exp", _simp_add(exps)))
    elif exps:
        factors.append(Func("exp", exps[0]))
    if depth < 4 and any(isinstance(f, (Const, Mul)) for f in factors):
        return _simp_mul([Const(coeff)] + factors, depth + 1)
    if coeff != 1 and len(factors) == 1 and isinstance(factors[0], Add):
        return _simp_add([_simp_mul([Const(coeff), t]) for t in factors[0].args])
    factors.sort(key=_key)
    if coeff != 1:
        factors.insert(0, Const(coeff))
    if not factors:
        return ONE
    if len(factors) == 1:
        return factors[0]
    return Mul(tuple(factors))


def _simp(e: Expr) -> Expr:
    if isinstance(e, (Const, Var)):
        return e
    if isinstance(e, Func):
        return _simp_func(e.name, _simp(e.arg))
    if isinstance(e, Pow):
        return _simp_pow(_simp(e.base), e.exp)
    if isinstance(e, Add):
        return _simp_add([_simp(a) for a in e.args])
    return _simp_mul([_simp(a) for a in e.args])


def simplify(e: Expr, positive=()) -> Expr:
    """Best-effort, value-preserving simplification, iterated to a fixed point.

    Variables named in ``positive`` are assumed strictly positive, which lets
    ``(r^2)^(1/2)`` become ``r``.
    """
    return _simplify_cached(e, frozenset(positive))


@lru_cache(maxsize=8192)
def _simplify_cached(e: Expr, positive: frozenset) -> Expr:
    token = _POSITIVE.set(positive)
    try:
        for _ in range(20):
            new = _simp(e)
            if new == e:
                return new
            e = new
        return e
    finally:
        _POSITIVE.reset(token)


# -- differentiation --------------------------------------------------------


def _d(e: Expr, x: str) -> Expr:
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Var):
        return ONE if e.name == x else ZERO
    if isinstance(e, Add):
        return Add(tuple(_d(a, x) for a in e.args))
    if isinstance(e, Mul):
        terms = []
        for i, a in enumerate(e.args):
            da = _d(a, x)
            if da != ZERO:
                terms.append(Mul(e.args[:i] + (da,) + e.args[i + 1:]))
        return Add(tuple(terms)) if terms else ZERO
    if isinstance(e, Pow):
        du = _d(e.base, x)
        if du == ZERO:
            return ZERO
        return Mul((Const(e.exp), Pow(e.base, e.exp - 1), du))
    u = e.arg
    du = _d(u, x)
    if du == ZERO:
        return ZERO
    name = e.name
    if name == "exp":
        outer = e
    elif name == "ln":
        outer = Pow(u, Fraction(-1))
    elif name == "sin":
        outer = Func("cos", u)
    elif name == "cos":
        outer = Mul((Const(Fraction(-1)), Func("sin", u)))
    elif name == "tan":
        outer = Pow(Func("cos", u), Fraction(-2))
    elif name == "sinh":
        outer = Func("cosh", u)
    elif name == "cosh":
        outer = Func("sinh", u)
    elif name == "tanh":
        outer = Pow(Func("sech", u), Fraction(2))
    elif name == "sech":
        outer = Mul((Const(Fraction(-1)), Func("sech", u), Func("tanh", u)))
    else:
        raise ValueError(f"unknown function {name!r}")
    return Mul((outer, du))


def diff(e: Expr, x: str = "r", order: int = 1) -> Expr:
    """Exact symbolic derivative of ``e`` with respect to variable ``x``."""
    for _ in range(order):
        e = simplify(_d(e, x))
    return e
