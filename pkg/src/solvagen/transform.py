"""Coordinate plus functional transformation of a polynomial ODE into a
D-dimensional radial Schrodinger equation.

Given a family with characteristic functions M(g), J(g) and a mapping
g(r), the wavefunction is psi = Q(g(r)) / f(r) with

    f(r) = r^((D-1)/2) |g'|^(1/2) exp(-1/2 * int M dg)

and psi''/psi + (D-1)/r psi'/psi equals :func:`effective_rhs`, i.e.
``-(E - V(r))``.  ``|g'|`` replaces ``g'`` so that decreasing maps stay
real; the sign is a constant absorbed by the normalization.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import expr as X
from .expr import Expr, Var
from .polys import PolynomialFamily

R = Var("r")


def _simp(e: Expr) -> Expr:
    return X.simplify(e, positive=("r",))


class Relation(enum.Enum):
    POWER_OVER_SQUARE = "g'^2/g^2"
    POWER_OVER_G = "g'^2/g"
    POWER_PLAIN = "g'^2"
    SECOND_DERIV = "g''^2/g'^2"
    ONE_MINUS_G2 = "g'^2/(1-g^2)"
    ONE_MINUS_G2_SQ = "g'^2/(1-g^2)^2"
    ONE_MINUS_G = "g'^2/(1-g)^2"


class DomainMismatch(ValueError):
    """The mapped range of g(r) leaves the domain of the family's M(g)."""


@dataclass(frozen=True)
class Mapping:
    """A closed-form g(r) and the constant-valued relation it satisfies."""

    g: Expr
    relation: Relation
    c: float
    A: float = 1.0
    domain: tuple[float, float] = (0.0, math.inf)
    note: str = ""

    @classmethod
    def exponential(cls, c, A=1) -> "Mapping":
        return cls(A * X.exp(-c * R), Relation.POWER_OVER_SQUARE, c, A)

    @classmethod
    def second_derivative(cls, c, A=1) -> "Mapping":
        # g''/g' = -c has the same exponential solution as g'/g = -c
        return cls(A * X.exp(-c * R), Relation.SECOND_DERIV, c, A, note="alias of the exponential map")

    @classmethod
    def quadratic(cls, c) -> "Mapping":
        c = X._num(c)
        return cls(c * c / 4 * R**2, Relation.POWER_OVER_G, c)

    @classmethod
    def linear(cls, c) -> "Mapping":
        return cls(c * R, Relation.POWER_PLAIN, c)

    @classmethod
    def sine(cls, p) -> "Mapping":
        return cls(X.sin(p * R), Relation.ONE_MINUS_G2, p, domain=(0.0, math.pi / (2 * float(p))))

    @classmethod
    def hyperbolic_tangent(cls, p) -> "Mapping":
        return cls(X.tanh(p * R), Relation.ONE_MINUS_G2_SQ, p)

    @classmethod
    def one_minus_exponential(cls, p, A=1) -> "Mapping":
        return cls(1 - A * X.exp(-p * R), Relation.ONE_MINUS_G, p, A)

    def derivative(self, order: int = 1) -> Expr:
        return X.diff(self.g, "r", order)

    def sample_points(self, count: int = 50) -> np.ndarray:
        lo, hi = self.domain
        scale = 1.0 / float(self.c)
        lo = max(lo, 0.0) + 1e-2 * scale
        hi = min(hi * (1 - 1e-3), 10.0 * scale)
        return np.geomspace(lo, hi, count)


def relation_lhs(mapping: Mapping) -> Expr:
    g = mapping.g
    g1 = mapping.derivative(1)
    rel = mapping.relation
    if rel is Relation.POWER_OVER_SQUARE:
        e = g1**2 / g**2
    elif rel is Relation.POWER_OVER_G:
        e = g1**2 / g
    elif rel is Relation.POWER_PLAIN:
        e = g1**2
    elif rel is Relation.SECOND_DERIV:
        e = mapping.derivative(2) ** 2 / g1**2
    elif rel is Relation.ONE_MINUS_G2:
        e = g1**2 / (1 - g**2)
    elif rel is Relation.ONE_MINUS_G2_SQ:
        e = g1**2 / (1 - g**2) ** 2
    else:
        e = g1**2 / (1 - g) ** 2
    return _simp(e)


def verify_mapping(mapping: Mapping, count: int = 50) -> tuple[bool, float]:
    """Check the relation residual |lhs - c^2| at log-spaced radii."""
    r = mapping.sample_points(count)
    c2 = float(mapping.c) ** 2
    try:
        lhs = X.evaluate(relation_lhs(mapping), {"r": r})
    except X.DomainError:
        return False, math.inf
    dev = float(np.max(np.abs(lhs - c2)))
    return dev < 1e-9 * c2, dev


def schwartzian(g: Expr, var: str = "r") -> Expr:
    """{g, r} = g'''/g' - 3/2 (g''/g')^2."""
    g1 = X.diff(g, var)
    if g1 == X.ZERO:
        raise ValueError("Schwartzian undefined: g' is identically zero")
    g2 = X.diff(g1, var)
    g3 = X.diff(g2, var)
    return _simp(g3 / g1 - Fraction(3, 2) * (g2 / g1) ** 2)


def _in_r(e: Expr, mapping: Mapping) -> Expr:
    return _simp(X.substitute(e, {"g": mapping.g}))


def _abs_sqrt_derivative(mapping: Mapping, power: Fraction) -> Expr:
    g1 = mapping.derivative(1)
    return _simp(X.Pow(X.Pow(g1, Fraction(2)), power / 2))


def _background(D: int) -> Expr:
    return X.Const(Fraction((D - 1) * (D - 3), 4)) / R**2


def _check_range(e: Expr, mapping: Mapping, fam: PolynomialFamily):
    try:
        X.evaluate(e, {"r": mapping.sample_points(20)})
    except X.DomainError as exc:
        raise DomainMismatch(f"g(r) = {mapping.g} leaves the domain of {fam.kind}: {exc}") from None


def modulating_function(fam: PolynomialFamily, mapping: Mapping, D: int) -> Expr:
    """f(r) without the normalization constant."""
    if D < 1:
        raise ValueError("dimension must be >= 1")
    weight = _simp(X.exp(-X.Const(Fraction(1, 2)) * fam.integral_M()))
    f = _simp(
        X.Pow(R, Fraction(D - 1, 2)) * _abs_sqrt_derivative(mapping, Fraction(1, 2)) * _in_r(weight, mapping)
    )
    _check_range(f, mapping, fam)
    return f


def effective_rhs(fam: PolynomialFamily, mapping: Mapping, D: int) -> Expr:
    """Right side psi''/psi + (D-1)/r psi'/psi, i.e. -(E_n - V(r))."""
    M, J = fam.characteristic()
    bracket = M**2 + 2 * X.diff(M, "g") - 4 * J
    g1 = mapping.derivative(1)
    rhs = (
        X.Const(Fraction(1, 4)) * g1**2 * _in_r(bracket, mapping)
        - X.Const(Fraction(1, 2)) * schwartzian(mapping.g)
        - _background(D)
    )
    return _simp(rhs)


def wavefunction_template(fam: PolynomialFamily, mapping: Mapping, D: int) -> Expr:
    """psi(r)/N = r^(-(D-1)/2) |g'|^(-1/2) exp(1/2 int M dg) Q(g(r))."""
    if D < 1:
        raise ValueError("dimension must be >= 1")
    weight = _simp(X.exp(X.Const(Fraction(1, 2)) * fam.integral_M()))
    psi = _simp(
        X.Pow(R, Fraction(-(D - 1), 2))
        * _abs_sqrt_derivative(mapping, Fraction(-1, 2))
        * _in_r(weight, mapping)
        * X.substitute(fam.as_expr(), {"g": mapping.g})
    )
    _check_range(psi, mapping, fam)
    return psi


@dataclass(frozen=True)
class TransformResult:
    f: Expr
    rhs: Expr
    psi_template: Expr
    family: PolynomialFamily = field(repr=False)
    mapping: Mapping = field(repr=False)
    D: int = 3

    def potential(self, energy: float) -> Expr:
        """V(r) implied by splitting rhs = -(E - V) at the given energy."""
        return _simp(X.as_expr(X._num(energy)) + self.rhs)


def transform(fam: PolynomialFamily, mapping: Mapping, D: int) -> TransformResult:
    return TransformResult(
        f=modulating_function(fam, mapping, D),
        rhs=effective_rhs(fam, mapping, D),
        psi_template=wavefunction_template(fam, mapping, D),
        family=fam,
        mapping=mapping,
        D=D,
    )


def radial_operator_ratio(psi: Expr, D: int, r: np.ndarray, h: float = 1e-3) -> np.ndarray:
    """psi''/psi + (D-1)/r psi'/psi by 5-point central differences."""
    f = X.lambdify(psi)
    fm2, fm1, f0, fp1, fp2 = (f(r + k * h) for k in (-2, -1, 0, 1, 2))
    d1 = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h)
    d2 = (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h * h)
    return d2 / f0 + (D - 1) / r * d1 / f0


def schwartzian_numeric(g, r: np.ndarray, h: float = 5e-3) -> np.ndarray:
    """{g, r} from 7-point central differences of a callable g (the symbolic-free oracle)."""
    f = X.lambdify(g) if isinstance(g, Expr) else g
    v = {k: np.asarray(f(r + k * h), dtype=float) for k in range(-3, 4)}
    d1 = (-v[-3] + 9 * v[-2] - 45 * v[-1] + 45 * v[1] - 9 * v[2] + v[3]) / (60 * h)
    d2 = (2 * v[-3] - 27 * v[-2] + 270 * v[-1] - 490 * v[0] + 270 * v[1] - 27 * v[2] + 2 * v[3]) / (180 * h * h)
    d3 = (v[-3] - 8 * v[-2] + 13 * v[-1] - 13 * v[1] + 8 * v[2] - v[3]) / (8 * h**3)
    return d3 / d1 - 1.5 * (d2 / d1) ** 2
