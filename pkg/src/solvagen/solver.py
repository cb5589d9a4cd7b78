"""Numerov shooting solver for the reduced radial equation u'' = (V_eff - E) u.

The integration runs in a stretched coordinate x with r = R(x).  Writing
u = sqrt(R') phi turns the equation into

    phi'' = [R'^2 (V_eff - E) - 1/2 {R, x}] phi

which is again Numerov-friendly.  Three maps are used:

* ``uniform``:  r = x (boxes and the full line)
* ``log``:      r = origin + e^x (half-line with a singular end at origin)
* ``interval``: r = origin + L (1 + tanh x)/2 (finite cells with poles at both ends)

Near a regular-singular end the transformed k(x) tends to a constant, so the
regular solution is selected by seeding the exponentially growing branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numba
import numpy as np
from scipy.integrate import simpson

from . import expr as X
from .catalog import ConstraintError, QuantumSystem

R = X.Var("r")


class NoBoundState(RuntimeError):
    """The requested state does not exist below the continuum threshold."""


class ConvergenceError(RuntimeError):
    pass


class FallToCenter(ValueError):
    """Inverse-square attraction below -1/4: the radial operator is not self-adjoint."""


@dataclass(frozen=True)
class RadialGrid:
    r_min: float
    r_max: float
    N: int = 20000
    kind: str = "uniform"
    origin: float = 0.0
    end: float = math.inf
    left: str = "dirichlet"
    right: str = "dirichlet"

    def __post_init__(self):
        if self.N < 100:
            raise ValueError(f"grid needs N >= 100 points, got {self.N}")
        if not self.r_max > self.r_min:
            raise ValueError(f"need r_max > r_min, got {self.r_min}, {self.r_max}")
        if self.kind not in ("uniform", "log", "interval"):
            raise ValueError(f"unknown grid kind {self.kind!r}")
        if self.kind == "log" and not self.r_min > self.origin:
            raise ValueError("log grid needs r_min > origin")
        if self.kind == "interval" and not (self.origin < self.r_min and self.r_max < self.end):
            raise ValueError("interval grid must lie strictly inside (origin, end)")
        for side in (self.left, self.right):
            if side not in ("dirichlet", "decay"):
                raise ValueError(f"boundary must be 'dirichlet' or 'decay', got {side!r}")

    @classmethod
    def uniform(cls, r_min, r_max, N=20000, left="dirichlet", right="dirichlet"):
        return cls(r_min, r_max, N, "uniform", left=left, right=right)

    @classmethod
    def logarithmic(cls, r_min, r_max, N=20000, origin=0.0):
        return cls(r_min, r_max, N, "log", origin=origin, left="decay", right="decay")

    @classmethod
    def cell(cls, lo, hi, N=20000, depth=12.0):
        L = hi - lo
        x = math.tanh(depth)
        return cls(lo + L * (1 - x) / 2, lo + L * (1 + x) / 2, N, "interval", origin=lo, end=hi,
                   left="decay", right="decay")

    def _x_bounds(self):
        if self.kind == "uniform":
            return self.r_min, self.r_max
        if self.kind == "log":
            return math.log(self.r_min - self.origin), math.log(self.r_max - self.origin)
        L = self.end - self.origin
        return (math.atanh(2 * (self.r_min - self.origin) / L - 1),
                math.atanh(2 * (self.r_max - self.origin) / L - 1))

    @property
    def x(self) -> np.ndarray:
        a, b = self._x_bounds()
        return np.linspace(a, b, self.N)

    @property
    def h(self) -> float:
        a, b = self._x_bounds()
        return (b - a) / (self.N - 1)

    @property
    def r(self) -> np.ndarray:
        x = self.x
        if self.kind == "uniform":
            return x
        if self.kind == "log":
            return self.origin + np.exp(x)
        L = self.end - self.origin
        return self.origin + L * (1 + np.tanh(x)) / 2

    @property
    def jacobian(self) -> np.ndarray:
        """dr/dx."""
        x = self.x
        if self.kind == "uniform":
            return np.ones_like(x)
        if self.kind == "log":
            return np.exp(x)
        L = self.end - self.origin
        return L / 2 / np.cosh(x) ** 2

    @property
    def liouville_shift(self) -> float:
        """-1/2 {R, x}: 0, 1/4 and 1 for the three maps."""
        return {"uniform": 0.0, "log": 0.25, "interval": 1.0}[self.kind]


@dataclass
class Shot:
    u: np.ndarray
    phi: np.ndarray
    nodes: int
    rescaled: bool


@dataclass
class EigenResult:
    E_numeric: float
    nodes: int
    norm: float
    residual_max: float
    E_analytic: float = math.nan
    rel_error: float = math.nan
    iterations: int = 0
    r: np.ndarray = field(default=None, repr=False)
    u: np.ndarray = field(default=None, repr=False)


# ---------------------------------------------------------------------------
# Numerov kernel


@numba.njit(cache=True, nogil=True)
def _numerov(k, h, y0, y1):
    n = k.shape[0]
    y = np.empty(n)
    y[0] = y0
    y[1] = y1
    t = h * h / 12.0
    nodes = 0
    rescaled = False
    last = y0 if y0 != 0.0 else y1
    for i in range(1, n - 1):
        y[i + 1] = ((2.0 + 10.0 * t * k[i]) * y[i] - (1.0 - t * k[i - 1]) * y[i - 1]) / (1.0 - t * k[i + 1])
        v = y[i + 1]
        if v != 0.0:
            if (v > 0.0) != (last > 0.0):
                nodes += 1
            last = v
        if abs(v) > 1e150:
            for j in range(i + 2):
                y[j] *= 1e-150
            rescaled = True
    return y, nodes, rescaled


def _seed(k, h, side):
    if side == "dirichlet":
        return 0.0, h
    kk = max(0.5 * (k[0] + k[1]), 0.0)
    return 1.0, math.exp(min(h * math.sqrt(kk), 50.0))


def _sample(V_eff: X.Expr, r: np.ndarray) -> np.ndarray:
    """V_eff on the grid; a pole sitting exactly on an end point becomes +inf."""
    with np.errstate(all="ignore"):
        try:
            return np.asarray(X.evaluate(V_eff, {"r": r}), dtype=float) * np.ones_like(r)
        except X.DomainError:
            pass
        V = np.empty_like(r)
        V[1:-1] = np.asarray(X.evaluate(V_eff, {"r": r[1:-1]}), dtype=float)
        for i in (0, -1):
            try:
                V[i] = float(X.evaluate(V_eff, {"r": r[i]}))
            except X.DomainError:
                V[i] = math.inf
        return V


@dataclass
class _Problem:
    """V_eff sampled on a grid; k(x, E) = J^2 (V - E) + shift."""

    grid: RadialGrid
    r: np.ndarray
    J2: np.ndarray
    V: np.ndarray

    @classmethod
    def build(cls, V_eff, grid: RadialGrid):
        r = grid.r
        if isinstance(V_eff, X.Expr):
            V = _sample(V_eff, r)
        else:
            V = np.asarray(V_eff(r), dtype=float) * np.ones_like(r)
        V = np.where(np.isfinite(V), V, 1e300)
        J = grid.jacobian
        return cls(grid, r, J * J, V)

    def k(self, E):
        with np.errstate(over="ignore", invalid="ignore"):
            k = self.J2 * (self.V - E) + self.grid.liouville_shift
        # deep in a forbidden zone h^2 k / 12 must stay below 1 or the
        # recurrence flips sign; clipping there only alters the decaying tail
        return np.minimum(np.where(np.isfinite(k), k, np.inf), 6.0 / self.grid.h**2)

    def check_singular_ends(self):
        if self.grid.kind == "uniform":
            return
        for i in (0, -1):
            if self.J2[i] < 1e-6 and self.J2[i] * self.V[i] + self.grid.liouville_shift < -1e-6:
                raise FallToCenter("inverse-square attraction below -1/4 at a domain end")

    def floor(self):
        """Energy below which k > 0 everywhere (no nodes possible)."""
        W = self.V + self.grid.liouville_shift / self.J2
        return float(np.min(W))

    def _shoot(self, k, side, pole):
        h = self.grid.h
        y0, y1 = _seed(k, h, side)
        if side == "dirichlet" and pole:
            # k u is 0 * inf at a pole on the wall; extrapolating k u linearly from
            # the next two points turns the first step into y2 = y1 (2 + h^2 k1)
            y2 = y1 * (2.0 + h * h * k[1])
            y, nodes, resc = _numerov(k[1:], h, y1, y2)
            return np.concatenate(([0.0], y)), nodes, resc
        return _numerov(k, h, y0, y1)

    def forward(self, E) -> tuple[np.ndarray, int, bool]:
        return self._shoot(self.k(E), self.grid.left, self.V[0] >= 1e300)

    def backward(self, E) -> tuple[np.ndarray, int, bool]:
        y, nodes, resc = self._shoot(self.k(E)[::-1].copy(), self.grid.right, self.V[-1] >= 1e300)
        return y[::-1].copy(), nodes, resc

    def count(self, E) -> int:
        return self.forward(E)[1]

    def match_index(self, E) -> int:
        allowed = np.nonzero(self.k(E) < 0)[0]
        N = len(self.r)
        m = int(allowed[-1]) if len(allowed) else N // 2
        return int(min(max(m, N // 10), (9 * N) // 10))

    def wronskian(self, E, m) -> float:
        f = self.forward(E)[0]
        b = self.backward(E)[0]
        sf = np.max(np.abs(f[m - 1:m + 2])) or 1.0
        sb = np.max(np.abs(b[m - 1:m + 2])) or 1.0
        return (f[m] * b[m + 1] - f[m + 1] * b[m]) / (sf * sb)

    def to_u(self, phi):
        return np.sqrt(self.grid.jacobian) * phi

    def norm(self, u):
        return float(simpson(u * u * self.grid.jacobian, x=self.grid.x))


# ---------------------------------------------------------------------------
# public operations


def reduce_to_u(system: QuantumSystem, n: int = 0) -> X.Expr:
    """V_eff = V + [l(l+D-2) + (D-1)(D-3)/4] / r^2 for the reduced function u."""
    D, ell = system.D, system.ell
    coeff = X.Const(Fraction(ell * (ell + D - 2)) + Fraction((D - 1) * (D - 3), 4))
    return X.simplify(system.potential(n) + coeff / R**2, positive=("r",))


def numerov_integrate(V_eff, E: float, grid: RadialGrid, direction: str = "forward") -> Shot:
    prob = _Problem.build(V_eff, grid)
    if direction == "forward":
        phi, nodes, resc = prob.forward(E)
    elif direction == "backward":
        phi, nodes, resc = prob.backward(E)
    else:
        raise ValueError(f"direction must be 'forward' or 'backward', got {direction!r}")
    return Shot(prob.to_u(phi), phi, nodes, resc)


def count_nodes(u) -> int:
    u = np.asarray(u, dtype=float)
    if u.size < 2:
        return 0
    cut = 1e-12 * np.max(np.abs(u))
    s = np.sign(u[np.abs(u) > cut])
    return int(np.count_nonzero(s[1:] != s[:-1]))


def matching_mismatch(V_eff, E: float, grid: RadialGrid, m: int | None = None) -> float:
    """|phi_f'/phi_f - phi_b'/phi_b| at the match point, in units of 1/r."""
    prob = _Problem.build(V_eff, grid)
    if m is None:
        m = prob.match_index(E)
    f = prob.forward(E)[0]
    b = prob.backward(E)[0]
    h = grid.h
    df = (f[m + 1] - f[m - 1]) / (2 * h * f[m])
    db = (b[m + 1] - b[m - 1]) / (2 * h * b[m])
    return float(abs(df - db) / grid.jacobian[m])


def _threshold(prob: _Problem) -> float:
    g = prob.grid
    ends = []
    if g.kind == "uniform" and g.left == "decay":
        ends.append(prob.V[0])
    if g.kind in ("uniform", "log") and g.right == "decay":
        ends.append(prob.V[-1])
    return min(ends) if ends else math.inf


def find_eigenvalue(
    V_eff,
    grid: RadialGrid,
    k: int,
    bracket: tuple[float, float] | None = None,
    E_analytic: float = math.nan,
    threshold: float | None = None,
    method: str = "match",
    max_iter: int = 200,
) -> EigenResult:
    """Eigenvalue with k nodes by node-count bracketing and bisection."""
    prob = _Problem.build(V_eff, grid)
    prob.check_singular_ends()
    if threshold is None:
        threshold = _threshold(prob)
    tol = lambda e: 1e-10 * max(1.0, abs(e))  # noqa: E731

    if bracket is None:
        lo = prob.floor() - 1.0
        hi = threshold if math.isfinite(threshold) else lo + max(1.0, abs(lo))
    else:
        lo, hi = map(float, bracket)
    for _ in range(max_iter):
        if prob.count(lo) <= k:
            break
        lo -= 2 * max(1.0, hi - lo)
    else:
        raise ConvergenceError("could not find a lower energy bound")
    for _ in range(max_iter):
        if prob.count(hi) >= k + 1:
            break
        if math.isfinite(threshold) and hi >= threshold:
            raise NoBoundState(f"no state with {k} nodes below the threshold {threshold:.6g}")
        hi = lo + 2 * (hi - lo)
        if math.isfinite(threshold):
            hi = min(hi, threshold)
    else:
        raise ConvergenceError("could not find an upper energy bound")

    iterations = 0
    # node-count bisection until the bracket isolates state k and is narrow
    coarse = lambda a, b: b - a > 1e-4 * max(1.0, abs(a), abs(b))  # noqa: E731
    while iterations < max_iter:
        if prob.count(lo) == k and prob.count(hi) == k + 1 and not coarse(lo, hi):
            break
        mid = 0.5 * (lo + hi)
        if prob.count(mid) <= k:
            lo = mid
        else:
            hi = mid
        iterations += 1

    m = prob.match_index(0.5 * (lo + hi))
    use_match = False
    if method == "match":
        w_lo = prob.wronskian(lo, m)
        use_match = w_lo * prob.wronskian(hi, m) < 0
    while iterations < max_iter and hi - lo > tol(0.5 * (lo + hi)):
        mid = 0.5 * (lo + hi)
        if use_match:
            w = prob.wronskian(mid, m)
            if (w < 0) == (w_lo < 0):
                lo, w_lo = mid, w
            else:
                hi = mid
        elif prob.count(mid) <= k:
            lo = mid
        else:
            hi = mid
        iterations += 1
    if hi - lo > tol(0.5 * (lo + hi)):
        raise ConvergenceError(f"bisection did not converge in {max_iter} iterations")
    E = 0.5 * (lo + hi)
    if math.isfinite(threshold) and E >= threshold:
        raise NoBoundState(f"state with {k} nodes sits at the threshold")

    phi = _join(prob, E, m)
    u = prob.to_u(phi)
    u = u / math.sqrt(prob.norm(u))
    # fix the overall sign so that u starts positive
    first = u[np.argmax(np.abs(u) > 1e-8 * np.max(np.abs(u)))]
    if first < 0:
        u = -u
    phi = u / np.sqrt(grid.jacobian)
    res = _discrete_residual(prob, E, phi)
    rel = abs(E - E_analytic) / max(abs(E_analytic), 1e-12) if math.isfinite(E_analytic) else math.nan
    return EigenResult(E, count_nodes(u), prob.norm(u), res, E_analytic, rel, iterations, prob.r, u)


def _join(prob: _Problem, E: float, m: int) -> np.ndarray:
    f = prob.forward(E)[0]
    b = prob.backward(E)[0]
    scale = f[m] / b[m] if b[m] != 0 else 1.0
    return np.concatenate([f[: m + 1], scale * b[m + 1:]])


def _discrete_residual(prob: _Problem, E: float, phi: np.ndarray) -> float:
    """Max Numerov defect of the joined solution relative to max |h^2 k phi|."""
    k = prob.k(E)
    t = prob.grid.h ** 2 / 12.0
    with np.errstate(invalid="ignore", over="ignore"):
        d = (1.0 - t * k[2:]) * phi[2:] - (2.0 + 10.0 * t * k[1:-1]) * phi[1:-1] + (1.0 - t * k[:-2]) * phi[:-2]
        kp = np.where(phi == 0.0, 0.0, k * phi)
        scale = 12.0 * t * np.max(np.abs(kp))
        # the same linear extrapolation of k*phi the integrator uses at a pole on a wall
        if prob.grid.left == "dirichlet" and prob.V[0] >= 1e300:
            d[0] -= t * (2.0 * kp[1] - kp[2])
        if prob.grid.right == "dirichlet" and prob.V[-1] >= 1e300:
            d[-1] -= t * (2.0 * kp[-2] - kp[-3])
    d = np.where(np.isfinite(d), d, 0.0)
    return float(np.max(np.abs(d)) / scale)


# ---------------------------------------------------------------------------
# system-level helpers


def _extent(V, E, start, step, limit, action=40.0):
    """Walk from start in the sign of step until the WKB decay action reaches the target."""
    r, acc, s = start, 0.0, step
    for _ in range(100000):
        with np.errstate(all="ignore"):
            v = float(V(np.array([r + s / 2]))[0])
        if not math.isfinite(v):
            v = 1e300
        if v > E:
            acc += math.sqrt(min(v - E, 1e12)) * abs(s)
        if acc >= action or abs(r - start) > limit:
            return r + s
        r += s
        s *= 1.02
    return r


def default_grid(system: QuantumSystem, n: int, N: int = 20000) -> RadialGrid:
    """Grid suited to state n: adaptive tails on open ends, tanh-stretched cells."""
    dom = system.domain()
    if dom.kind == "cell":
        return RadialGrid.cell(dom.lo, dom.hi, N)
    V = X.lambdify(reduce_to_u(system, n))
    scale = system.length_scale()
    E = system.energy(n)
    lo_probe = dom.lo + 1e-3 * scale if dom.kind == "half" else -60 * scale
    probe = np.linspace(lo_probe, dom.lo + 60 * scale if dom.kind == "half" else 60 * scale, 4001)
    with np.errstate(all="ignore"):
        vals = np.asarray(V(probe), dtype=float) * np.ones_like(probe)
    vals = np.where(np.isfinite(vals), vals, np.inf)
    i0 = int(np.argmin(vals))
    vmin = float(vals[i0])
    far = [v for v in (vals[0] if dom.kind == "line" else np.inf, vals[-1]) if np.isfinite(v)]
    top = min(far) if far else math.inf
    E_ref = min(max(E, vmin), top - 1e-3 * abs(top - vmin)) if math.isfinite(top) else max(E, vmin)
    step = 1e-2 * scale
    right = _extent(V, E_ref, float(probe[i0]), step, 400 * scale)
    right = max(right, system.r_max_hint(n)) if hasattr(system, "r_max_hint") else right
    if dom.kind == "half":
        return RadialGrid.logarithmic(dom.lo + 1e-7 * scale, right, N, origin=dom.lo)
    left = _extent(V, E_ref, float(probe[i0]), -step, 400 * scale)
    return RadialGrid.uniform(left, right, N, left="decay", right="decay")


def _threshold_for(system: QuantumSystem, n: int) -> float:
    dom = system.domain()
    if dom.kind == "cell":
        return math.inf
    V = reduce_to_u(system, n)
    pts = [1e6] if dom.kind == "half" else [-1e6, 1e6]
    with np.errstate(all="ignore"):
        vals = [float(X.evaluate(V, {"r": np.array([p])})[0]) for p in pts]
    vals = [v if math.isfinite(v) else math.inf for v in vals]
    return min(vals)


def solve_state(system: QuantumSystem, n: int, grid: RadialGrid | None = None, method: str = "match") -> EigenResult:
    if grid is None:
        grid = default_grid(system, n)
    return find_eigenvalue(
        reduce_to_u(system, n),
        grid,
        system.expected_nodes(n),
        E_analytic=system.energy(n),
        threshold=_threshold_for(system, n),
        method=method,
    )


def _window(system: QuantumSystem, grid: RadialGrid, count: int) -> np.ndarray:
    dom = system.domain()
    scale = system.length_scale()
    if dom.kind == "cell":
        width = dom.hi - dom.lo
        a = max(dom.lo, 0.0) + 0.02 * width
        b = dom.hi - 0.02 * width
    else:
        a = max(dom.lo, 0.0) + 0.05 * scale
        b = grid.r_max
    return np.linspace(a, b, count)


def residual(system: QuantumSystem, n: int, grid: RadialGrid | None = None, h: float = 1e-3,
             energy: float | None = None, count: int = 2000) -> float:
    """Max |psi'' + (D-1)/r psi' + (E - V - l(l+D-2)/r^2) psi| / max|psi| by 5-point differences."""
    if grid is None:
        grid = default_grid(system, n)
    D = system.D
    E = system.energy(n) if energy is None else energy
    r = _window(system, grid, count)
    psi = X.lambdify(system.psi(n))
    V = X.lambdify(system.potential(n))
    fm2, fm1, f0, fp1, fp2 = (np.asarray(psi(r + j * h), dtype=float) for j in (-2, -1, 0, 1, 2))
    d1 = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h)
    d2 = (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h * h)
    res = d2 + (D - 1) / r * d1 + (E - V(r) - float(system.centrifugal()) / r**2) * f0
    return float(np.max(np.abs(res)) / np.max(np.abs(f0)))


def _normalized_u(system: QuantumSystem, n: int, grid: RadialGrid) -> np.ndarray:
    with np.errstate(all="ignore"):
        u = np.asarray(X.evaluate(system.u(n), {"r": grid.r}), dtype=float) * np.ones(grid.N)
    u = np.where(np.isfinite(u), u, 0.0)
    return u / math.sqrt(simpson(u * u * grid.jacobian, x=grid.x))


def orthogonality(system: QuantumSystem, i: int, j: int, grid: RadialGrid | None = None) -> float:
    """|int psi_i psi_j r^(D-1) dr| after normalizing both, by composite Simpson."""
    if grid is None:
        grid = default_grid(system, max(i, j, key=lambda s: system.expected_nodes(s)))
    ui = _normalized_u(system, i, grid)
    uj = _normalized_u(system, j, grid)
    return float(abs(simpson(ui * uj * grid.jacobian, x=grid.x)))


@dataclass
class StateCheck:
    system: str
    index: int
    expected_nodes: int
    result: EigenResult | None
    analytic_residual: float
    orthogonality: float
    passed: bool
    error: str = ""

    def row(self) -> dict:
        r = self.result
        return {
            "system": self.system,
            "n": self.index,
            "E_analytic": r.E_analytic if r else math.nan,
            "E_numeric": r.E_numeric if r else math.nan,
            "rel_error": r.rel_error if r else math.nan,
            "nodes": r.nodes if r else -1,
            "expected_nodes": self.expected_nodes,
            "residual_max": r.residual_max if r else math.nan,
            "analytic_residual": self.analytic_residual,
            "orthogonality": self.orthogonality,
            "pass": self.passed,
            "error": self.error,
        }


def verify_state(system: QuantumSystem, n: int, tol: float = 1e-6, grid: RadialGrid | None = None,
                 partner: int | None = None) -> StateCheck:
    """Numeric eigenvalue, analytic residual and orthogonality for one state."""
    nodes = system.expected_nodes(n)
    try:
        g = grid if grid is not None else default_grid(system, n)
        res = solve_state(system, n, g)
    except (NoBoundState, ConvergenceError, FallToCenter, ConstraintError) as exc:
        return StateCheck(system.id, n, nodes, None, math.nan, math.nan, False, str(exc))
    try:
        an = residual(system, n, g)
    except (X.DomainError, ValueError) as exc:
        an = math.inf
        err = str(exc)
    else:
        err = ""
    orth = 0.0
    if partner is not None and partner != n:
        try:
            orth = orthogonality(system, n, partner)
        except (X.DomainError, ValueError):
            orth = math.inf
    ok = (
        res.rel_error < tol
        and res.residual_max < 10 * tol
        and res.nodes == nodes
        and an < 1e-5
        and orth < 1e-5
    )
    return StateCheck(system.id, n, nodes, res, an, orth, bool(ok), err)
