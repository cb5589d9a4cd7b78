"""Orthogonal polynomial families and their characteristic functions.

Each family satisfies ``Q'' + M(g) Q' + J(g) Q = 0``.  Values come from a
three-term recurrence; ``series`` is an independent explicit finite sum used
as an oracle.  Parameters may be real (``Fraction`` or ``float``).

Associated Legendre functions carry the Condon-Shortley phase ``(-1)^m``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import numpy as np

from . import expr as X
from .expr import Expr, Var, _num

__all__ = [
    "PolynomialFamily",
    "Laguerre",
    "Hypergeometric",
    "AssociatedLegendre",
    "Jacobi",
    "InvalidFamily",
    "SingularPoint",
    "eval_poly",
    "characteristic",
    "ode_residual",
]

G = Var("g")


class InvalidFamily(ValueError):
    pass


class SingularPoint(ValueError):
    pass


def _binom(top, k: int):
    """Generalized binomial C(top, k) for real ``top`` and integer ``k >= 0``."""
    out = Fraction(1) if isinstance(top, Fraction) else 1.0
    for j in range(1, k + 1):
        out = out * (top - k + j) / j
    return out


def _rising(a, k: int):
    out = Fraction(1) if isinstance(a, Fraction) else 1.0
    for j in range(k):
        out = out * (a + j)
    return out


def _polymul(p, q):
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return out


def _horner(coeffs, g: Expr) -> Expr:
    """Nested-product expression for sum(c_k g^k)."""
    coeffs = [_num(c) if not isinstance(c, (Fraction, float)) else c for c in coeffs]
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    e: Expr = X.Const(coeffs[-1])
    for c in reversed(coeffs[:-1]):
        e = X.Const(c) + g * e if c != 0 else g * e
    return e


def _poly_eval(coeffs, x):
    acc = np.zeros_like(np.asarray(x, dtype=float)) + float(coeffs[-1])
    for c in reversed(coeffs[:-1]):
        acc = acc * x + float(c)
    return acc


@dataclass(frozen=True)
class PolynomialFamily:
    n: int

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 0:
            raise InvalidFamily(f"degree must be a non-negative integer, got {self.n!r}")

    kind = "abstract"

    def __call__(self, x):
        return self.evaluate(x)

    def evaluate(self, x):
        raise NotImplementedError

    def series(self, x):
        raise NotImplementedError

    def characteristic(self) -> tuple[Expr, Expr]:
        raise NotImplementedError

    def integral_M(self) -> Expr:
        """Antiderivative of M(g) with zero integration constant."""
        raise NotImplementedError

    def as_expr(self, g: Expr = G) -> Expr:
        raise NotImplementedError

    def singular_points(self) -> tuple[float, ...]:
        raise NotImplementedError

    def describe(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Laguerre(PolynomialFamily):
    """Associated Laguerre polynomial L_n^alpha."""

    alpha: object = 0
    kind = "AssociatedLaguerre"

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "alpha", _num(self.alpha))

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        a = float(self.alpha)
        prev, cur = np.ones_like(x), 1.0 + a - x
        if self.n == 0:
            return _scalar(prev)
        for k in range(1, self.n):
            prev, cur = cur, ((2 * k + 1 + a - x) * cur - (k + a) * prev) / (k + 1)
        return _scalar(cur)

    def coefficients(self):
        n, a = self.n, self.alpha
        return [(-1) ** k * _binom(n + a, n - k) / factorial(k) for k in range(n + 1)]

    def series(self, x):
        x = np.asarray(x, dtype=float)
        total = np.zeros_like(x)
        for k, c in enumerate(self.coefficients()):
            total = total + float(c) * x**k
        return _scalar(total)

    def characteristic(self):
        a = self.alpha
        return (a + 1 - G) / G, X.Const(Fraction(self.n)) / G

    def integral_M(self):
        return (self.alpha + 1) * X.ln(G) - G

    def as_expr(self, g: Expr = G):
        return _horner(self.coefficients(), g)

    def singular_points(self):
        return (0.0,)

    def describe(self):
        return {"kind": self.kind, "n": self.n, "alpha": float(self.alpha)}


@dataclass(frozen=True)
class Hypergeometric(PolynomialFamily):
    """Terminating Gauss function 2F1(-n, beta; gamma; x)."""

    beta: object = 1
    gamma: object = 1
    kind = "Hypergeometric2F1"

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "beta", _num(self.beta))
        object.__setattr__(self, "gamma", _num(self.gamma))
        c = self.gamma
        if float(c).is_integer() and -(self.n - 1) <= c <= 0:
            raise InvalidFamily(f"gamma={c} makes the series coefficients infinite for n={self.n}")

    @property
    def alpha(self):
        return Fraction(-self.n)

    def evaluate(self, x):
        # contiguous relation in the first parameter, stepping a = -k -> -(k+1)
        x = np.asarray(x, dtype=float)
        b, c = float(self.beta), float(self.gamma)
        prev, cur = np.ones_like(x), 1.0 - b * x / c
        if self.n == 0:
            return _scalar(prev)
        for k in range(1, self.n):
            prev, cur = cur, ((2 * k + c - (b + k) * x) * cur + k * (x - 1.0) * prev) / (c + k)
        return _scalar(cur)

    def coefficients(self):
        n, b, c = self.n, self.beta, self.gamma
        return [_rising(Fraction(-n), k) * _rising(b, k) / (_rising(c, k) * factorial(k)) for k in range(n + 1)]

    def series(self, x):
        x = np.asarray(x, dtype=float)
        total = np.zeros_like(x)
        term = np.ones_like(x)
        a, b, c = -self.n, float(self.beta), float(self.gamma)
        for k in range(self.n + 1):
            total = total + term
            term = term * (a + k) * (b + k) / ((c + k) * (k + 1)) * x
        return _scalar(total)

    def characteristic(self):
        a, b, c = self.alpha, self.beta, self.gamma
        denom = G * (1 - G)
        return (c - (a + b + 1) * G) / denom, X.Const(-a * b) / denom

    def integral_M(self):
        a, b, c = self.alpha, self.beta, self.gamma
        return c * X.ln(G) + (a + b + 1 - c) * X.ln(1 - G)

    def as_expr(self, g: Expr = G):
        return _horner(self.coefficients(), g)

    def singular_points(self):
        return (0.0, 1.0)

    def describe(self):
        return {"kind": self.kind, "n": self.n, "alpha": -self.n, "beta": float(self.beta), "gamma": float(self.gamma)}


@dataclass(frozen=True)
class AssociatedLegendre(PolynomialFamily):
    """Associated Legendre function P_n^m with the Condon-Shortley phase."""

    m: int = 0
    kind = "AssociatedLegendre"

    def __post_init__(self):
        super().__post_init__()
        if not isinstance(self.m, (int, np.integer)) or abs(self.m) > self.n:
            raise InvalidFamily(f"need integer |m| <= n, got n={self.n}, m={self.m!r}")

    def _negative_factor(self):
        am = abs(self.m)
        if self.m >= 0:
            return Fraction(1)
        return Fraction((-1) ** am * factorial(self.n - am), factorial(self.n + am))

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        n, m = self.n, abs(self.m)
        if m % 2 and np.any(np.abs(x) > 1):
            raise X.DomainError("odd-order associated Legendre function is complex for |x| > 1")
        s = np.abs(1.0 - x * x) ** (m / 2)
        pmm = (-1) ** m * float(_double_factorial(2 * m - 1)) * s
        if n == m:
            return _scalar(float(self._negative_factor()) * pmm)
        prev, cur = pmm, x * (2 * m + 1) * pmm
        for k in range(m + 1, n):
            prev, cur = cur, ((2 * k + 1) * x * cur - (k + m) * prev) / (k - m + 1)
        return _scalar(float(self._negative_factor()) * cur)

    def legendre_coefficients(self):
        """Monomial coefficients of d^|m|/dx^|m| P_n(x), P_n by the explicit sum."""
        n, m = self.n, abs(self.m)
        coeffs = [Fraction(0)] * (n + 1)
        for k in range(n // 2 + 1):
            coeffs[n - 2 * k] += Fraction((-1) ** k * _binom_int(n, k) * _binom_int(2 * n - 2 * k, n), 2**n)
        for _ in range(m):
            coeffs = [coeffs[j] * j for j in range(1, len(coeffs))] or [Fraction(0)]
        return coeffs

    def series(self, x):
        x = np.asarray(x, dtype=float)
        m = abs(self.m)
        if m % 2 and np.any(np.abs(x) > 1):
            raise X.DomainError("odd-order associated Legendre function is complex for |x| > 1")
        poly = _poly_eval(self.legendre_coefficients(), x)
        value = (-1) ** m * np.abs(1.0 - x * x) ** (m / 2) * poly * float(self._negative_factor())
        return _scalar(value)

    def characteristic(self):
        n, m = self.n, self.m
        one_minus = 1 - G**2
        M = -2 * G / one_minus
        J = (X.Const(Fraction(n * (n + 1))) - X.Const(Fraction(m * m)) / one_minus) / one_minus
        return M, J

    def integral_M(self):
        return X.ln(1 - G**2)

    def as_expr(self, g: Expr = G):
        m = abs(self.m)
        poly = _horner(self.legendre_coefficients(), g)
        scale = (-1) ** m * self._negative_factor()
        if m == 0:
            return X.Const(scale) * poly
        return X.Const(scale) * X.Pow(1 - g**2, Fraction(m, 2)) * poly

    def singular_points(self):
        return (-1.0, 1.0)

    def describe(self):
        return {"kind": self.kind, "n": self.n, "m": self.m}


@dataclass(frozen=True)
class Jacobi(PolynomialFamily):
    """Jacobi polynomial P_n^(alpha, beta)."""

    alpha: object = 0
    beta: object = 0
    kind = "Jacobi"

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "alpha", _num(self.alpha))
        object.__setattr__(self, "beta", _num(self.beta))

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        a, b = float(self.alpha), float(self.beta)
        prev = np.ones_like(x)
        if self.n == 0:
            return _scalar(prev)
        cur = (a + 1) + (a + b + 2) * (x - 1) / 2
        for k in range(2, self.n + 1):
            s = 2 * k + a + b
            d = 2 * k * (k + a + b) * (s - 2)
            if d == 0:
                return self.series(x)
            prev, cur = cur, ((s - 1) * (s * (s - 2) * x + a * a - b * b) * cur - 2 * (k + a - 1) * (k + b - 1) * s * prev) / d
        return _scalar(cur)

    def coefficients(self):
        n, a, b = self.n, self.alpha, self.beta
        total = [Fraction(0)] * (n + 1)
        for s in range(n + 1):
            c = _binom(n + a, n - s) * _binom(n + b, s)
            p = [c]
            for _ in range(s):
                p = _polymul(p, [Fraction(-1, 2), Fraction(1, 2)])
            for _ in range(n - s):
                p = _polymul(p, [Fraction(1, 2), Fraction(1, 2)])
            total = [t + q for t, q in zip(total, p)]
        return total

    def series(self, x):
        x = np.asarray(x, dtype=float)
        n, a, b = self.n, self.alpha, self.beta
        total = np.zeros_like(x)
        for s in range(n + 1):
            c = float(_binom(n + a, n - s) * _binom(n + b, s))
            total = total + c * ((x - 1) / 2) ** s * ((x + 1) / 2) ** (n - s)
        return _scalar(total)

    def characteristic(self):
        a, b, n = self.alpha, self.beta, self.n
        one_minus = 1 - G**2
        M = (b - a - (a + b + 2) * G) / one_minus
        J = X.Const(n * (n + a + b + 1)) / one_minus
        return M, J

    def integral_M(self):
        return (self.alpha + 1) * X.ln(1 - G) + (self.beta + 1) * X.ln(1 + G)

    def as_expr(self, g: Expr = G):
        return _horner(self.coefficients(), g)

    def singular_points(self):
        return (-1.0, 1.0)

    def describe(self):
        return {"kind": self.kind, "n": self.n, "alpha": float(self.alpha), "beta": float(self.beta)}


def _binom_int(n: int, k: int) -> int:
    return factorial(n) // (factorial(k) * factorial(n - k))


def _double_factorial(k: int) -> int:
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


def _scalar(v):
    return float(v) if np.ndim(v) == 0 else v


def eval_poly(fam: PolynomialFamily, x):
    return fam.evaluate(x)


def characteristic(fam: PolynomialFamily) -> tuple[Expr, Expr]:
    return fam.characteristic()


def ode_residual(fam: PolynomialFamily, x: float) -> float:
    """|Q'' + M Q' + J Q| at ``x`` with exact symbolic derivatives of Q."""
    for s in fam.singular_points():
        if abs(x - s) < 1e-12:
            raise SingularPoint(f"x={x} is a singular point of {fam.kind}")
    Q = fam.as_expr(G)
    dQ = X.diff(Q, "g")
    d2Q = X.diff(dQ, "g")
    M, J = fam.characteristic()
    env = {"g": x}
    return abs(X.evaluate(d2Q, env) + X.evaluate(M, env) * X.evaluate(dQ, env) + X.evaluate(J, env) * X.evaluate(Q, env))
