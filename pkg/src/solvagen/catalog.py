"""Closed-form quantum systems generated by the transformation method.

Every system couples a polynomial family and a mapping g(r) and exposes its
energy, potential and wavefunction.  Two versions of V and psi exist:

* ``table_potential`` / ``table_psi`` reproduce the tabulated reference closed
  forms as given, inconsistencies included;
* ``potential`` / ``psi`` / ``u`` are what the solver and the residual checks
  use.  ``psi`` always comes from :func:`transform.wavefunction_template`.

For the power-law systems (oscillator, Coulomb) ``potential`` excludes the
centrifugal term, which the radial equation adds from ``ell``.  For every other
system ``ell`` is 0 and ``potential`` carries the background term
``-(D-1)(D-3)/(4 r^2)`` exactly as tabulated.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import expr as X
from . import transform as T
from .expr import Expr
from .polys import AssociatedLegendre, Hypergeometric, Jacobi, Laguerre, PolynomialFamily
from .transform import Mapping, Relation

R = X.Var("r")


class Status(str, enum.Enum):
    VERIFIED = "Verified"
    AMBIGUOUS = "PaperAmbiguous"
    UNVERIFIED = "Unverified"


class ConstraintError(ValueError):
    """A parameter or state index violates the system's validity conditions."""


def rational(value):
    """Exact Fraction for ints, Fractions and decimal-looking floats."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, str):
        return Fraction(value)
    value = float(value)
    if not math.isfinite(value):
        raise ConstraintError(f"parameter must be finite, got {value}")
    return Fraction(repr(value))


def _simp(e: Expr) -> Expr:
    return X.simplify(e, positive=("r",))


def _background(D: int) -> Expr:
    return X.Const(Fraction((D - 1) * (D - 3), 4)) / R**2


@dataclass(frozen=True)
class Domain:
    """Physical interval for the reduced function u.

    kind is ``half`` (lo finite, hi = inf, u(lo) = 0), ``line`` (both ends
    infinite) or ``cell`` (both ends finite, u vanishes at both).
    """

    kind: str
    lo: float
    hi: float


@dataclass(frozen=True)
class QuantumSystem:
    D: int = 3
    ell: int = 0

    id = "abstract"
    family_kind = ""
    status = Status.VERIFIED
    power_law = False
    notes = ""
    # names of the potential parameters, in constructor order
    param_names = ()
    constraint_text = ()

    def __post_init__(self):
        if not isinstance(self.D, (int, np.integer)) or self.D < 1:
            raise ConstraintError(f"dimension must be an integer >= 1, got {self.D!r}")
        if not isinstance(self.ell, (int, np.integer)) or self.ell < 0:
            raise ConstraintError(f"ell must be an integer >= 0, got {self.ell!r}")
        if not self.power_law and self.ell != 0:
            raise ConstraintError(f"{self.id} carries no angular momentum; ell must be 0")
        for name in self.param_names:
            object.__setattr__(self, name, rational(getattr(self, name)))
        self.validate()

    # -- per-system hooks ------------------------------------------------
    def validate(self):
        pass

    def check_index(self, n: int):
        if not isinstance(n, (int, np.integer)) or n < 0:
            raise ConstraintError(f"state index must be a non-negative integer, got {n!r}")

    def family(self, n: int) -> PolynomialFamily:
        raise NotImplementedError

    def mapping(self, n: int) -> Mapping:
        raise NotImplementedError

    def energy(self, n: int) -> float:
        raise NotImplementedError

    def table_potential(self, n: int) -> Expr:
        raise NotImplementedError

    def table_psi(self, n: int) -> Expr:
        raise NotImplementedError

    def domain(self) -> Domain:
        return Domain("half", 0.0, math.inf)

    def expected_nodes(self, n: int) -> int:
        self.check_index(n)
        return int(n)

    def first_index(self) -> int:
        return 0

    def is_bound(self, n: int) -> bool:
        """False for threshold states (zero binding)."""
        return True

    # -- shared behaviour ------------------------------------------------
    @property
    def params(self) -> dict:
        return {k: getattr(self, k) for k in self.param_names}

    @property
    def constraints(self) -> list[str]:
        return list(self.constraint_text)

    def indices(self, n_max: int) -> list[int]:
        """Valid state indices up to n_max, ordered by increasing energy."""
        out = []
        for n in range(self.first_index(), n_max + 1):
            try:
                self.check_index(n)
            except ConstraintError:
                continue
            out.append(n)
        return out

    def bound_indices(self, n_max: int) -> list[int]:
        return [n for n in self.indices(n_max) if self.is_bound(n)]

    def potential(self, n: int = 0) -> Expr:
        V = self.table_potential(n)
        if self.power_law:
            V = _simp(V - X.Const(Fraction(self.ell * (self.ell + self.D - 2))) / R**2)
        return V

    def centrifugal(self) -> Fraction:
        return Fraction(self.ell * (self.ell + self.D - 2))

    def transform(self, n: int) -> T.TransformResult:
        self.check_index(n)
        return _transform(self.family(n), self.mapping(n), self.D)

    def psi(self, n: int) -> Expr:
        """Unnormalized psi_n(r) from the general wavefunction formula."""
        return self.transform(n).psi_template

    def u(self, n: int) -> Expr:
        """Reduced function r^((D-1)/2) psi_n, valid on the whole domain."""
        self.check_index(n)
        return _transform(self.family(n), self.mapping(n), 1).psi_template

    def assembled_potential(self, n: int) -> Expr:
        """E_n + rhs of the transformed equation; includes any 1/r^2 barrier."""
        return self.transform(n).potential(self.energy(n))

    def construction_mismatch(self, n: int, count: int = 50) -> float:
        """max |(E_n + rhs) - tabulated V| / max(1, |tabulated V|) at sample radii."""
        r = self.sample_radii(count)
        built = X.evaluate(self.assembled_potential(n), {"r": r})
        ref = X.evaluate(self.table_potential(n), {"r": r})
        return float(np.max(np.abs(built - ref) / np.maximum(1.0, np.abs(ref))))

    def psi_mismatch(self, n: int, count: int = 50) -> float:
        """Relative difference of tabulated and constructed psi after scaling at a reference point."""
        r = self.sample_radii(count)
        a = X.evaluate(self.psi(n), {"r": r})
        b = X.evaluate(self.table_psi(n), {"r": r})
        k = int(np.argmax(np.abs(a)))
        if b[k] == 0:
            return math.inf
        b = b * (a[k] / b[k])
        return float(np.max(np.abs(a - b)) / np.max(np.abs(a)))

    def sample_radii(self, count: int = 50) -> np.ndarray:
        """Points r > 0 inside the domain, away from its ends."""
        dom = self.domain()
        lo = max(dom.lo, 0.0)
        if dom.kind == "cell":
            width = dom.hi - lo
            return np.linspace(lo + 0.05 * width, dom.hi - 0.05 * width, count)
        scale = self.length_scale()
        return np.linspace(lo + 0.1 * scale, lo + 6.0 * scale, count)

    def length_scale(self) -> float:
        return 1.0

    def describe(self) -> dict:
        return {
            "id": self.id,
            "family": self.family_kind,
            "status": self.status.value,
            "D": int(self.D),
            "ell": int(self.ell),
            "params": {k: float(v) for k, v in self.params.items()},
            "constraints": self.constraints,
            "domain": self.domain().kind,
            "notes": self.notes,
        }


@lru_cache(maxsize=1024)
def _transform(fam, mapping, D):
    return T.transform(fam, mapping, D)


def _require(cond: bool, message: str):
    if not cond:
        raise ConstraintError(message)


# ---------------------------------------------------------------------------
# Associated Laguerre systems


@dataclass(frozen=True)
class MorseLike(QuantumSystem):
    c1: object = 1
    beta: object = Fraction(11, 2)

    id = "morse_like"
    family_kind = "AssociatedLaguerre"
    param_names = ("c1", "beta")
    constraint_text = ("c1 > 0", "beta > 1/2", "state n requires beta >= n + 1/2")
    notes = "g = exp(-c1 r); full line in r so that the well minimum is reachable"

    def validate(self):
        _require(self.c1 > 0, "c1 must be positive")
        _require(self.beta > Fraction(1, 2), "beta must exceed 1/2")

    def check_index(self, n):
        super().check_index(n)
        _require(self.beta >= n + Fraction(1, 2), f"beta={float(self.beta)} < n + 1/2 for n={n}")

    def alpha(self, n):
        return 2 * self.beta - 2 * n - 1

    def family(self, n):
        return Laguerre(n, self.alpha(n))

    def mapping(self, n):
        return Mapping.exponential(self.c1)

    def energy(self, n):
        self.check_index(n)
        return float(-(self.c1**2) / 4 * (2 * self.beta - 2 * n - 1) ** 2)

    def is_bound(self, n):
        return self.alpha(n) > 0

    def table_potential(self, n=0):
        c = self.c1
        e = X.exp(-c * R)
        return _simp(c * c * e * (Fraction(1, 4) * e - self.beta) - _background(self.D))

    def table_psi(self, n):
        # tabulated superscript 2*beta - 2n - 2
        c = self.c1
        a = self.alpha(n)
        g = X.exp(-c * R)
        poly = X.substitute(Laguerre(n, a - 1).as_expr(), {"g": g})
        return _simp(
            X.Pow(R, Fraction(-(self.D - 1), 2)) * X.exp(-a * c * R / 2) * X.exp(-g / 2) * poly
        )

    def domain(self):
        return Domain("line", -math.inf, math.inf)

    def length_scale(self):
        return float(1 / self.c1)


@dataclass(frozen=True)
class HarmonicOscillator(QuantumSystem):
    omega: object = 1

    id = "harmonic_oscillator"
    family_kind = "AssociatedLaguerre"
    power_law = True
    param_names = ("omega",)
    constraint_text = ("omega > 0", "principal n = 2 n_r + ell with n_r >= 0")
    notes = "state index is the principal number n; D = 1 uses the full line"

    def validate(self):
        _require(self.omega > 0, "omega must be positive")

    def check_index(self, n):
        super().check_index(n)
        _require(n >= self.ell and (n - self.ell) % 2 == 0, f"n - ell must be even and >= 0 (n={n}, ell={self.ell})")

    def first_index(self):
        return self.ell

    def alpha(self):
        return Fraction(self.ell) + Fraction(self.D - 2, 2)

    def family(self, n):
        return Laguerre((n - self.ell) // 2, self.alpha())

    def mapping(self, n):
        return Mapping(self.omega / 2 * R**2, Relation.POWER_OVER_G, math.sqrt(2 * self.omega))

    def energy(self, n):
        self.check_index(n)
        return float(self.omega * (n + Fraction(self.D, 2)))

    def expected_nodes(self, n):
        self.check_index(n)
        # the full-line D = 1 problem counts nodes on both sides of the origin
        return int(n) if self.D == 1 else (n - self.ell) // 2

    def table_potential(self, n=0):
        return _simp(self.omega**2 / 4 * R**2 + self.centrifugal() / R**2)

    def table_psi(self, n):
        w = self.omega
        poly = X.substitute(self.family(n).as_expr(), {"g": w / 2 * R**2})
        return _simp(X.Pow(R, Fraction(self.ell)) * X.exp(-w * R**2 / 4) * poly)

    def domain(self):
        if self.D == 1:
            return Domain("line", -math.inf, math.inf)
        return Domain("half", 0.0, math.inf)

    def length_scale(self):
        return float(1 / math.sqrt(float(self.omega)))


@dataclass(frozen=True)
class Coulomb(QuantumSystem):
    strength: object = 1

    id = "coulomb"
    family_kind = "AssociatedLaguerre"
    power_law = True
    param_names = ("strength",)
    constraint_text = (
        "coupling 2*strength (atomic units: strength = 1)",
        "state index n_r >= 0; principal n = n_r + ell + (D-1)/2 must be positive",
        "D = 1 requires ell = 0",
    )
    notes = "state index is n_r; the mapping g = (2/n) r depends on the state"

    def validate(self):
        _require(self.strength > 0, "strength must be positive")
        _require(self.D >= 2 or self.ell == 0, "D = 1 requires ell = 0")

    def principal(self, n_r):
        return Fraction(n_r) + self.ell + Fraction(self.D - 1, 2)

    def check_index(self, n):
        super().check_index(n)
        _require(self.principal(n) > 0, f"principal number must be positive (n_r={n}, D={self.D})")

    def first_index(self):
        return 1 if self.D == 1 else 0

    def family(self, n):
        return Laguerre(n, Fraction(2 * self.ell + self.D - 2))

    def mapping(self, n):
        c = 2 * self.strength / self.principal(n)
        return Mapping.linear(c)

    def energy(self, n):
        self.check_index(n)
        return float(-(self.strength**2) / self.principal(n) ** 2)

    def expected_nodes(self, n):
        self.check_index(n)
        # D = 1: the regular solution of the alpha = -1 family loses its first node to the origin
        return int(n) - 1 if self.D == 1 else int(n)

    def r_max_hint(self, n):
        return 30.0 * float(self.principal(n)) ** 2

    def table_potential(self, n=0):
        return _simp(-2 * self.strength / R + self.centrifugal() / R**2)

    def table_psi(self, n):
        # tabulated superscript 2*ell + D - 1, argument 2r/n
        nn = self.principal(n)
        fam = Laguerre(n, Fraction(2 * self.ell + self.D - 1))
        poly = X.substitute(fam.as_expr(), {"g": 2 * self.strength / nn * R})
        return _simp(X.Pow(R, Fraction(self.ell)) * X.exp(-self.strength * R / nn) * poly)

    def length_scale(self):
        return 1.0


# ---------------------------------------------------------------------------
# Hypergeometric systems


@dataclass(frozen=True)
class HyperOscillator(QuantumSystem):
    beta: object = 6

    id = "hyper_oscillator"
    family_kind = "Hypergeometric2F1"
    status = Status.AMBIGUOUS
    power_law = True
    param_names = ("beta",)
    constraint_text = ("g = r^2 (p1 = 2), domain 0 < r < 1", "2F1(-n, beta+1, ell+D/2; r^2)")
    notes = "built as tabulated; c = ell + D/2 is read as the third 2F1 parameter"

    def family(self, n):
        return Hypergeometric(n, self.beta + 1, Fraction(self.ell) + Fraction(self.D, 2))

    def mapping(self, n):
        return Mapping(R**2, Relation.POWER_OVER_G, 2.0, domain=(0.0, 1.0))

    def _lam(self):
        return Fraction(self.ell) + Fraction(self.D, 2)

    def energy(self, n):
        self.check_index(n)
        lam, b = self._lam(), self.beta
        return float(-2 * (-2 * n * (b + 1) + lam * (lam + n - b - 2)))

    def table_potential(self, n=0):
        lam, b = self._lam(), self.beta
        D, ell = self.D, self.ell
        inner = (
            -4 * n * (b + 1)
            + (2 * ell + D) * (2 * ell + D + 2 * n - 2 * b - 4)
            + X.Const(((-n + b - lam + 1) ** 2 - 1) / 4) / (1 - R**2)
        )
        return _simp(R**2 / (1 - R**2) * inner + self.centrifugal() / R**2)

    def table_psi(self, n):
        lam, b = self._lam(), self.beta
        poly = X.substitute(self.family(n).as_expr(), {"g": R**2})
        return _simp(X.Pow(R, Fraction(self.ell)) * X.Pow(1 - R**2, (-n + b - lam + 2) / 2) * poly)

    def domain(self):
        return Domain("cell", 0.0, 1.0)


@dataclass(frozen=True)
class _HulthenBase(QuantumSystem):
    """Shared construction for the two exponential-well rows."""

    family_kind = "Hypergeometric2F1"

    def _coupling(self):
        raise NotImplementedError

    def _rate(self):
        raise NotImplementedError

    def _amp(self):
        raise NotImplementedError

    def validate(self):
        _require(self._rate() > 0, "decay rate must be positive")
        _require(0 < self._amp() <= 1, "amplitude must lie in (0, 1]")
        _require(self._coupling() > 0, "coupling must be positive")

    def check_index(self, n):
        super().check_index(n)
        _require(self._coupling() > n + 1, f"bound state n={n} needs coupling > n + 1")

    def _kappa(self, n):
        b2 = self._coupling() ** 2
        return (b2 - (n + 1) ** 2) / (2 * (n + 1))

    def family(self, n):
        b2 = self._coupling() ** 2
        return Hypergeometric(n, (b2 + n + 1) / (n + 1), (b2 - n * n - n) / (n + 1))

    def table_potential(self, n=0):
        p, A, b = self._rate(), self._amp(), self._coupling()
        e = A * X.exp(-p * R)
        return _simp(-(b * b) * p * p * e / (1 - e) - _background(self.D))

    def table_psi(self, n):
        p, A = self._rate(), self._amp()
        g = A * X.exp(-p * R)
        poly = X.substitute(self.family(n).as_expr(), {"g": g})
        return _simp(X.Pow(R, Fraction(-(self.D - 1), 2)) * X.Pow(g, self._kappa(n)) * (1 - g) * poly)

    def domain(self):
        return Domain("half", float(math.log(self._amp()) / self._rate()), math.inf)

    def length_scale(self):
        return float(1 / self._rate())


@dataclass(frozen=True)
class HulthenLike(_HulthenBase):
    p2: object = 1
    A2: object = 1
    beta1: object = 3

    id = "hulthen_like"
    param_names = ("p2", "A2", "beta1")
    constraint_text = ("p2 > 0", "0 < A2 <= 1", "state n requires beta1 > n + 1", "a + b - c = 1")
    notes = "beta1^2 = (n+1)(n+c) fixes c; u vanishes where A2 exp(-p2 r) = 1"

    def _coupling(self):
        return self.beta1

    def _rate(self):
        return self.p2

    def _amp(self):
        return self.A2

    def mapping(self, n):
        return Mapping.exponential(self.p2, self.A2)

    def energy(self, n):
        self.check_index(n)
        return float(-(self.p2**2) * self._kappa(n) ** 2)


@dataclass(frozen=True)
class HulthenDelta(_HulthenBase):
    p4: object = 1
    A4: object = 1
    delta: object = 3

    id = "hulthen_delta"
    status = Status.UNVERIFIED
    param_names = ("p4", "A4", "delta")
    constraint_text = ("p4 > 0", "0 < A4 <= 1", "state n requires delta > n + 1")
    notes = "second-derivative mapping, same g as hulthen_like; tabulated energy lacks the square"

    def _coupling(self):
        return self.delta

    def _rate(self):
        return self.p4

    def _amp(self):
        return self.A4

    def mapping(self, n):
        return Mapping.second_derivative(self.p4, self.A4)

    def energy(self, n):
        self.check_index(n)
        return float(-(self.p4**2) * self._kappa(n))


@dataclass(frozen=True)
class EckartLike(QuantumSystem):
    p3: object = 1
    A3: object = 1
    gamma1: object = 1

    id = "eckart_like"
    family_kind = "Hypergeometric2F1"
    status = Status.AMBIGUOUS
    param_names = ("p3", "A3", "gamma1")
    constraint_text = ("p3 > 0", "0 < A3 <= 1", "third 2F1 parameter fixed to 2")
    notes = "built as tabulated; V >= 0 leaves no room for the negative energies"

    def validate(self):
        _require(self.p3 > 0, "p3 must be positive")
        _require(0 < self.A3 <= 1, "A3 must lie in (0, 1]")

    def _b(self, n):
        return (n - (self.gamma1**2 - 1)) / (n + 1)

    def _kappa(self, n):
        return (self.gamma1**2 + (n + 1) ** 2) / (2 * (n + 1))

    def family(self, n):
        return Hypergeometric(n, self._b(n), 2)

    def mapping(self, n):
        return Mapping.one_minus_exponential(self.p3, self.A3)

    def energy(self, n):
        self.check_index(n)
        return float(-(self.p3**2) * self._kappa(n) ** 2)

    def table_potential(self, n=0):
        p, A = self.p3, self.A3
        e = A * X.exp(-p * R)
        return _simp(p * p * self.gamma1**2 * e / (1 - e) - _background(self.D))

    def table_psi(self, n):
        p, A = self.p3, self.A3
        poly = X.substitute(self.family(n).as_expr(), {"g": 1 - X.exp(-p * R)})
        return _simp(
            X.Pow(R, Fraction(-(self.D - 1), 2)) * (1 - A * X.exp(-p * R)) * X.exp(-p * self._kappa(n) * R) * poly
        )

    def domain(self):
        return Domain("half", float(math.log(self.A3) / self.p3), math.inf)

    def length_scale(self):
        return float(1 / self.p3)


# ---------------------------------------------------------------------------
# Legendre and Jacobi systems


@dataclass(frozen=True)
class TrigPoschlTeller(QuantumSystem):
    p1: object = 1
    m: int = 1

    id = "trig_poschl_teller"
    family_kind = "AssociatedLegendre"
    param_names = ("p1", "m")
    constraint_text = ("p1 > 0", "integer m >= 1", "state n >= m", "cell |r| < pi/(2 p1)")
    notes = "m is a potential parameter, n the state; n - m nodes across the full cell"

    def validate(self):
        _require(self.p1 > 0, "p1 must be positive")
        _require(self.m.denominator == 1 and self.m >= 1, "m must be an integer >= 1")

    def check_index(self, n):
        super().check_index(n)
        _require(n >= self.m, f"state n={n} must be >= m={int(self.m)}")

    def first_index(self):
        return int(self.m)

    def family(self, n):
        return AssociatedLegendre(n, int(self.m))

    def mapping(self, n):
        return Mapping.sine(self.p1)

    def energy(self, n):
        self.check_index(n)
        return float(-(self.p1**2) * (self.m**2 - n * (n + 1) - Fraction(1, 2)))

    def expected_nodes(self, n):
        self.check_index(n)
        return int(n - self.m)

    def table_potential(self, n=0):
        cm2 = self.p1**2 * (self.m**2 - Fraction(1, 4))
        return _simp(cm2 * X.tan(self.p1 * R) ** 2 - _background(self.D))

    def table_psi(self, n):
        s = X.sin(self.p1 * R)
        poly = X.substitute(self.family(n).as_expr(), {"g": s})
        return _simp(
            X.Pow(R, Fraction(-(self.D - 1), 2)) * X.Pow(X.cos(self.p1 * R), Fraction(1, 2)) * poly
        )

    def domain(self):
        half = math.pi / (2 * float(self.p1))
        return Domain("cell", -half, half)


@dataclass(frozen=True)
class SechPoschlTeller(QuantumSystem):
    p2: object = 1
    n: int = 4

    id = "sech_poschl_teller"
    family_kind = "AssociatedLegendre"
    param_names = ("p2", "n")
    constraint_text = ("p2 > 0", "depth parameter n >= 2", "state index m with 2 <= m <= n")
    notes = "n sets the depth, the state index is m; energy rises as m falls"

    def validate(self):
        _require(self.p2 > 0, "p2 must be positive")
        _require(self.n.denominator == 1 and self.n >= 2, "n must be an integer >= 2")

    def check_index(self, m):
        super().check_index(m)
        _require(1 <= m <= self.n, f"state m={m} must satisfy 1 <= m <= n={int(self.n)}")

    def indices(self, n_max):
        top = int(self.n)
        return [m for m in range(top, 1, -1) if top - m <= n_max]

    def is_bound(self, m):
        return m >= 2

    def family(self, m):
        return AssociatedLegendre(int(self.n) - 1, m - 1)

    def mapping(self, m):
        return Mapping.hyperbolic_tangent(self.p2)

    def energy(self, m):
        self.check_index(m)
        return float(-((m - 1) ** 2) * self.p2**2)

    def expected_nodes(self, m):
        self.check_index(m)
        return int(self.n) - m

    def table_potential(self, m=0):
        return _simp(-self.n * (self.n - 1) * self.p2**2 * X.sech(self.p2 * R) ** 2 - _background(self.D))

    def table_psi(self, m):
        poly = X.substitute(self.family(m).as_expr(), {"g": X.tanh(self.p2 * R)})
        return _simp(X.Pow(R, Fraction(-(self.D - 1), 2)) * poly)

    def domain(self):
        return Domain("line", -math.inf, math.inf)

    def length_scale(self):
        return float(1 / self.p2)


@dataclass(frozen=True)
class TrigScarf(QuantumSystem):
    p3: object = 1
    alpha: object = 2
    beta: object = 1

    id = "trig_scarf"
    family_kind = "Jacobi"
    status = Status.UNVERIFIED
    param_names = ("p3", "alpha", "beta")
    constraint_text = ("p3 > 0", "alpha, beta > -1", "cell |r| < pi/(2 p3)")
    notes = "built as tabulated; V coefficients and energy sign disagree with the construction"

    def validate(self):
        _require(self.p3 > 0, "p3 must be positive")
        _require(self.alpha > -1 and self.beta > -1, "alpha and beta must exceed -1")

    def family(self, n):
        return Jacobi(n, self.alpha, self.beta)

    def mapping(self, n):
        return Mapping.sine(self.p3)

    def energy(self, n):
        self.check_index(n)
        a, b = self.alpha, self.beta
        return float(Fraction(1, 4) * ((a - b) ** 2 - 4 * n * (n + a + b + 1) - 2 * (a + b) - 2) * self.p3**2)

    def table_potential(self, n=0):
        a, b, p = self.alpha, self.beta, self.p3
        c1 = (a * a - b * b) / 2 * p * p
        c2 = (a * a + b * b) / 2 * p * p
        t = X.tan(p * R)
        return _simp(c1 * t**2 + c2 * t / X.cos(p * R) - _background(self.D))

    def table_psi(self, n):
        a, b, p = self.alpha, self.beta, self.p3
        s = X.sin(p * R)
        poly = X.substitute(self.family(n).as_expr(), {"g": s})
        return _simp(
            X.Pow(R, Fraction(-(self.D - 1), 2))
            * X.Pow(X.cos(p * R), (a + b + 1) / 2)
            * X.Pow((1 + s) / (1 - s), (b - a) / 4)
            * poly
        )

    def domain(self):
        half = math.pi / (2 * float(self.p3))
        return Domain("cell", -half, half)


@dataclass(frozen=True)
class RosenMorse(QuantumSystem):
    p4: object = 1
    alpha: object = 3
    beta: object = 1

    id = "rosen_morse"
    family_kind = "Jacobi"
    status = Status.UNVERIFIED
    param_names = ("p4", "alpha", "beta")
    constraint_text = ("p4 > 0", "alpha, beta > -1", "c3 depends on the state n as tabulated")
    notes = "built as tabulated; the energy has the opposite overall sign"

    def validate(self):
        _require(self.p4 > 0, "p4 must be positive")
        _require(self.alpha > -1 and self.beta > -1, "alpha and beta must exceed -1")

    def family(self, n):
        return Jacobi(n, self.alpha, self.beta)

    def mapping(self, n):
        return Mapping.hyperbolic_tangent(self.p4)

    def energy(self, n):
        self.check_index(n)
        a, b = self.alpha, self.beta
        return float(Fraction(1, 4) * ((a - b) ** 2 - 4 * n * (n + a + b + 1) - 2 * (a + b)) * self.p4**2)

    def table_potential(self, n=0):
        a, b, p = self.alpha, self.beta, self.p4
        c3 = Fraction(1, 4) * ((2 * n + a + b + 1) ** 2 - 1) * p * p
        c4 = (a * a - b * b) / 2 * p * p
        t = X.tanh(p * R)
        return _simp(c3 * t**2 + c4 * t - _background(self.D))

    def table_psi(self, n):
        a, b, p = self.alpha, self.beta, self.p4
        poly = X.substitute(self.family(n).as_expr(), {"g": X.tanh(p * R)})
        return _simp(
            X.Pow(R, Fraction(-(self.D - 1), 2))
            * X.Pow(X.sech(p * R), (a + b) / 2)
            * X.exp(-(a - b) / 2 * p * R)
            * poly
        )

    def domain(self):
        return Domain("line", -math.inf, math.inf)

    def length_scale(self):
        return float(1 / self.p4)


# ---------------------------------------------------------------------------
# factories


def _with_state(system: QuantumSystem, n):
    if n is not None:
        system.check_index(n)
    return system


def morse_like(D=3, c1=1, beta=Fraction(11, 2)) -> MorseLike:
    return MorseLike(D=D, c1=c1, beta=beta)


def harmonic_oscillator(D=3, ell=0, omega=1) -> HarmonicOscillator:
    return HarmonicOscillator(D=D, ell=ell, omega=omega)


def coulomb(D=3, ell=0, strength=1) -> Coulomb:
    return Coulomb(D=D, ell=ell, strength=strength)


def hulthen_like(D=3, p2=1, A2=1, n=None, beta1=3) -> HulthenLike:
    return _with_state(HulthenLike(D=D, p2=p2, A2=A2, beta1=beta1), n)


def hulthen_delta(D=3, p4=1, A4=1, n=None, delta=3) -> HulthenDelta:
    return _with_state(HulthenDelta(D=D, p4=p4, A4=A4, delta=delta), n)


def eckart_like(D=3, p3=1, A3=1, n=None, gamma1=1) -> EckartLike:
    return _with_state(EckartLike(D=D, p3=p3, A3=A3, gamma1=gamma1), n)


def hyper_oscillator(D=3, ell=0, n=None, beta=6) -> HyperOscillator:
    return _with_state(HyperOscillator(D=D, ell=ell, beta=beta), n)


def trig_poschl_teller(D=3, p1=1, m=1, n=None) -> TrigPoschlTeller:
    return _with_state(TrigPoschlTeller(D=D, p1=p1, m=m), n)


def sech_poschl_teller(D=3, p2=1, n=4, m=None) -> SechPoschlTeller:
    return _with_state(SechPoschlTeller(D=D, p2=p2, n=n), m)


def trig_scarf(D=3, p3=1, n=None, alpha=2, beta=1) -> TrigScarf:
    return _with_state(TrigScarf(D=D, p3=p3, alpha=alpha, beta=beta), n)


def rosen_morse(D=3, p4=1, n=None, alpha=3, beta=1) -> RosenMorse:
    return _with_state(RosenMorse(D=D, p4=p4, alpha=alpha, beta=beta), n)


FACTORIES = {
    "morse_like": morse_like,
    "harmonic_oscillator": harmonic_oscillator,
    "coulomb": coulomb,
    "hyper_oscillator": hyper_oscillator,
    "hulthen_like": hulthen_like,
    "eckart_like": eckart_like,
    "hulthen_delta": hulthen_delta,
    "trig_poschl_teller": trig_poschl_teller,
    "sech_poschl_teller": sech_poschl_teller,
    "trig_scarf": trig_scarf,
    "rosen_morse": rosen_morse,
}

ALIASES = {"hulthen_delta": "hulthen_like"}


def system_ids() -> list[str]:
    return list(FACTORIES)


def build(system_id: str, D: int = 3, ell: int = 0, **params) -> QuantumSystem:
    """Construct a system by id; unknown parameter names raise ConstraintError."""
    try:
        factory = FACTORIES[system_id]
    except KeyError:
        raise ConstraintError(f"unknown system {system_id!r}") from None
    cls = {
        "morse_like": MorseLike, "harmonic_oscillator": HarmonicOscillator, "coulomb": Coulomb,
        "hyper_oscillator": HyperOscillator, "hulthen_like": HulthenLike, "eckart_like": EckartLike,
        "hulthen_delta": HulthenDelta, "trig_poschl_teller": TrigPoschlTeller,
        "sech_poschl_teller": SechPoschlTeller, "trig_scarf": TrigScarf, "rosen_morse": RosenMorse,
    }[system_id]
    unknown = set(params) - set(cls.param_names)
    if unknown:
        raise ConstraintError(f"{system_id} has no parameter(s) {sorted(unknown)}; known: {list(cls.param_names)}")
    kwargs = dict(params)
    if cls.power_law:
        kwargs["ell"] = ell
    elif ell != 0:
        raise ConstraintError(f"{system_id} carries no angular momentum; ell must be 0")
    return cls(D=D, **kwargs)


def listing() -> list[dict]:
    """JSON-ready summary of every catalog entry with default parameters."""
    rows = []
    for sid in FACTORIES:
        s = build(sid)
        row = s.describe()
        row["params"] = {k: float(v) for k, v in s.params.items()}
        if sid in ALIASES:
            row["alias_of"] = ALIASES[sid]
        rows.append(row)
    return rows
