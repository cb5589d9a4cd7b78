"""solvagen command line: list, inspect, tabulate, sample and verify systems.

Exit codes: 0 ok, 1 verification failure, 2 invalid input or constraint
violation, 3 I/O failure.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import click
import numpy as np

from . import catalog as C
from . import expr as X
from . import solver as S
from . import transform as T

EXIT_FAIL, EXIT_INPUT, EXIT_IO = 1, 2, 3
CONFIG_ENV = "SOLVAGEN_CONFIG"


class InputError(click.ClickException):
    exit_code = EXIT_INPUT


class IOFailure(click.ClickException):
    exit_code = EXIT_IO


# ---------------------------------------------------------------------------
# configuration


@dataclass
class RunConfig:
    dimension: int = 3
    ell: int = 0
    n_max: int = 3
    params: dict = field(default_factory=dict)
    grid: tuple | None = None
    tol: float = 1e-6
    format: str = "json"
    output: str | None = None
    strict: bool = False


def _parse_param(text: str) -> tuple[str, str]:
    key, sep, value = text.partition("=")
    if not sep or not key.strip():
        raise InputError(f"--param expects key=value, got {text!r}")
    return key.strip(), value.strip()


def _parse_grid(text: str) -> tuple[float, float, int]:
    try:
        a, b, n = text.split(",")
        grid = (float(a), float(b), int(n))
    except ValueError:
        raise InputError(f"--grid expects rmin,rmax,N, got {text!r}") from None
    if not grid[1] > grid[0] or grid[2] < 2:
        raise InputError(f"--grid needs rmax > rmin and N >= 2, got {text!r}")
    return grid


def read_config_file(path: str) -> dict:
    """Parse ``key = value`` lines; ``param = k=v`` may repeat."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IOFailure(f"cannot read config {path}: {exc}") from None
    out: dict = {"param": []}
    for raw in lines:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise InputError(f"bad config line {raw!r}")
        key = key.strip().replace("-", "_")
        if key == "param":
            out["param"].append(value.strip())
        else:
            out[key] = value.strip()
    return out


def build_config(dimension, ell, n_max, params, grid, tol, fmt, output, strict) -> RunConfig:
    """Merge defaults, the optional config file and command-line flags (flags win)."""
    cfg = RunConfig()
    path = os.environ.get(CONFIG_ENV)
    file_params: list[str] = []
    if path:
        data = read_config_file(path)
        file_params = data.pop("param")
        try:
            for key, value in data.items():
                if key == "dimension":
                    cfg.dimension = int(value)
                elif key == "ell":
                    cfg.ell = int(value)
                elif key == "n_max":
                    cfg.n_max = int(value)
                elif key == "tol":
                    cfg.tol = float(value)
                elif key == "format":
                    cfg.format = value
                elif key == "output":
                    cfg.output = value
                elif key == "strict":
                    cfg.strict = value.lower() in ("1", "true", "yes", "on")
                elif key == "grid":
                    cfg.grid = _parse_grid(value)
                else:
                    raise InputError(f"unknown config key {key!r}")
        except ValueError as exc:
            raise InputError(f"bad config value: {exc}") from None
    merged = dict(_parse_param(p) for p in file_params)
    merged.update(dict(_parse_param(p) for p in params))
    cfg.params = merged
    if dimension is not None:
        cfg.dimension = dimension
    if ell is not None:
        cfg.ell = ell
    if n_max is not None:
        cfg.n_max = n_max
    if grid is not None:
        cfg.grid = _parse_grid(grid)
    if tol is not None:
        cfg.tol = tol
    if fmt is not None:
        cfg.format = fmt
    if output is not None:
        cfg.output = output
    if strict:
        cfg.strict = True
    if cfg.format not in ("json", "csv"):
        raise InputError(f"format must be json or csv, got {cfg.format!r}")
    if cfg.dimension < 1 or cfg.ell < 0 or cfg.n_max < 0 or not cfg.tol > 0:
        raise InputError("need dimension >= 1, ell >= 0, n-max >= 0 and tol > 0")
    return cfg


def make_system(system_id: str, cfg: RunConfig) -> C.QuantumSystem:
    try:
        params = {k: C.rational(v) for k, v in cfg.params.items()}
    except (ValueError, ZeroDivisionError):
        raise InputError(f"parameters must be numbers, got {cfg.params}") from None
    try:
        return C.build(system_id, D=cfg.dimension, ell=cfg.ell, **params)
    except (C.ConstraintError, ValueError) as exc:
        raise InputError(str(exc)) from None


# ---------------------------------------------------------------------------
# output


def fmt_float(x) -> str:
    return "%.12g" % x


def _json(obj, indent=0) -> str:
    """Deterministic JSON with %.12g floats; non-finite floats become null."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad + _json(v, indent + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj) if math.isfinite(obj) else "null"
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def _csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = list(rows[0])
    w.writerow(header)
    for row in rows:
        out = []
        for k in header:
            v = row.get(k)
            if isinstance(v, (float, np.floating)):
                out.append(fmt_float(v))
            elif isinstance(v, (list, tuple)):
                out.append("; ".join(map(str, v)))
            else:
                out.append(v)
        w.writerow(out)
    return buf.getvalue()


def emit(cfg: RunConfig, payload, rows: list[dict]):
    text = _json(payload) + "\n" if cfg.format == "json" else _csv(rows)
    if cfg.output:
        try:
            with open(cfg.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise IOFailure(f"cannot write {cfg.output}: {exc}") from None
    else:
        click.echo(text, nl=False)


# ---------------------------------------------------------------------------
# commands


def common_options(f):
    opts = [
        click.option("--dimension", "-D", type=int, default=None, help="Spatial dimension D."),
        click.option("--ell", type=int, default=None, help="Angular momentum (power-law systems)."),
        click.option("--n-max", type=int, default=None, help="Highest state index."),
        click.option("--param", "params", multiple=True, help="Potential parameter key=value (repeatable)."),
        click.option("--grid", default=None, help="rmin,rmax,N"),
        click.option("--tol", type=float, default=None, help="Relative eigenvalue tolerance."),
        click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default=None),
        click.option("--output", "-o", default=None, help="Write to this path instead of stdout."),
        click.option("--strict", is_flag=True, default=False, help="Count non-Verified systems as failures."),
    ]
    for opt in reversed(opts):
        f = opt(f)
    return f


def _cfg(kw) -> RunConfig:
    return build_config(
        kw.pop("dimension"), kw.pop("ell"), kw.pop("n_max"), kw.pop("params"), kw.pop("grid"),
        kw.pop("tol"), kw.pop("fmt"), kw.pop("output"), kw.pop("strict"),
    )


def _check_id(system_id):
    if system_id not in C.FACTORIES:
        raise InputError(f"unknown system {system_id!r}; try `solvagen list`")


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Exactly solvable radial Schrodinger systems and their numerical verification."""


@main.command("list")
@common_options
def cmd_list(**kw):
    """One row per catalog system."""
    cfg = _cfg(kw)
    rows = C.listing()
    flat = [
        {
            "id": r["id"],
            "family": r["family"],
            "status": r["status"],
            "domain": r["domain"],
            "constraints": r["constraints"],
            "alias_of": r.get("alias_of", ""),
        }
        for r in rows
    ]
    emit(cfg, {"systems": rows}, flat)


@main.command("info")
@click.argument("system_id")
@common_options
def cmd_info(system_id, **kw):
    """Parameters, constraints, potential and wavefunctions of one system."""
    cfg = _cfg(kw)
    _check_id(system_id)
    s = make_system(system_id, cfg)
    states = []
    for n in s.indices(cfg.n_max):
        states.append(
            {
                "n": n,
                "E": s.energy(n),
                "nodes": s.expected_nodes(n),
                "family": s.family(n).describe(),
                "mapping": str(s.mapping(n).g),
                "psi": str(s.psi(n)),
            }
        )
    payload = s.describe()
    payload["potential"] = str(s.table_potential(s.indices(cfg.n_max)[0] if states else 0))
    payload["states"] = states
    rows = [{"n": st["n"], "E": st["E"], "nodes": st["nodes"], "mapping": st["mapping"], "psi": st["psi"]} for st in states]
    emit(cfg, payload, rows)


@main.command("energies")
@click.argument("system_id")
@common_options
def cmd_energies(system_id, **kw):
    """Closed-form energies for the valid states up to --n-max."""
    cfg = _cfg(kw)
    _check_id(system_id)
    s = make_system(system_id, cfg)
    idx = s.indices(cfg.n_max)
    rows = [{"n": n, "E_analytic": s.energy(n)} for n in idx]
    skipped = [n for n in range(s.first_index(), cfg.n_max + 1) if n not in idx]
    if skipped and system_id != "sech_poschl_teller":
        click.echo(f"note: indices {skipped} violate the constraints of {system_id}", err=True)
    emit(cfg, {"system": s.describe(), "energies": rows}, rows)


def _sample_radii(s: C.QuantumSystem, cfg: RunConfig) -> np.ndarray:
    if cfg.grid:
        a, b, n = cfg.grid
        return np.linspace(a, b, n)
    dom = s.domain()
    if dom.kind == "cell":
        width = dom.hi - max(dom.lo, 0.0)
        return np.linspace(max(dom.lo, 0.0) + 0.01 * width, dom.hi - 0.01 * width, 200)
    scale = s.length_scale()
    lo = max(dom.lo, 0.0) + 0.01 * scale
    return np.linspace(lo, lo + 20 * scale, 200)


@main.command("sample")
@click.argument("system_id")
@common_options
def cmd_sample(system_id, **kw):
    """Tabulate r, V(r) and normalized psi_n(r) on a grid."""
    cfg = _cfg(kw)
    _check_id(system_id)
    s = make_system(system_id, cfg)
    idx = s.bound_indices(cfg.n_max)
    r = _sample_radii(s, cfg)
    with np.errstate(all="ignore"):
        try:
            V = np.asarray(X.evaluate(s.table_potential(idx[0] if idx else 0), {"r": r}), dtype=float) * np.ones_like(r)
            cols = {}
            for n in idx:
                grid = S.default_grid(s, n)
                u = X.evaluate(s.u(n), {"r": grid.r}) * np.ones(grid.N)
                norm = math.sqrt(S.simpson(u * u * grid.jacobian, x=grid.x))
                cols[f"psi_{n}"] = np.asarray(X.evaluate(s.psi(n), {"r": r}), dtype=float) * np.ones_like(r) / norm
        except X.DomainError as exc:
            raise InputError(f"grid leaves the domain of {system_id}: {exc}") from None
    rows = []
    for i, ri in enumerate(r):
        row = {"r": float(ri), "V": float(V[i])}
        row.update({k: float(v[i]) for k, v in cols.items()})
        rows.append(row)
    emit(cfg, {"system": s.describe(), "columns": ["r", "V", *cols], "rows": rows}, rows)


@dataclass
class SystemReport:
    system: C.QuantumSystem
    checks: list

    @property
    def all_pass(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    @property
    def outcome(self) -> str:
        if self.all_pass:
            return "pass"
        if self.system.status is C.Status.VERIFIED:
            return "fail"
        return "skipped"


def verify_system(s: C.QuantumSystem, cfg: RunConfig) -> SystemReport:
    idx = s.bound_indices(cfg.n_max)
    grid = None
    if cfg.grid:
        a, b, n = cfg.grid
        try:
            grid = S.RadialGrid.uniform(a, b, n)
        except ValueError as exc:
            raise InputError(f"bad --grid: {exc}") from None
    checks = []
    for n in idx:
        partner = idx[1] if len(idx) > 1 and n == idx[0] else (idx[0] if len(idx) > 1 else None)
        checks.append(S.verify_state(s, n, tol=cfg.tol, grid=grid, partner=partner))
    return SystemReport(s, checks)


@main.command("verify")
@click.argument("system_id", required=False)
@click.option("--all", "run_all", is_flag=True, help="Verify every catalog system.")
@click.option("--workers", type=int, default=4, show_default=True)
@common_options
def cmd_verify(system_id, run_all, workers, **kw):
    """Numerov eigenvalues, analytic residuals and orthogonality per state."""
    cfg = _cfg(kw)
    if run_all == bool(system_id):
        raise InputError("give exactly one of SYSTEM_ID or --all")
    if run_all:
        systems = []
        for sid in C.system_ids():
            try:
                ell = cfg.ell if C.build(sid).power_law else 0
                systems.append(C.build(sid, D=cfg.dimension, ell=ell))
            except C.ConstraintError as exc:
                raise InputError(f"{sid}: {exc}") from None
    else:
        _check_id(system_id)
        systems = [make_system(system_id, cfg)]
    t0 = time.perf_counter()
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        reports = list(pool.map(lambda s: verify_system(s, cfg), systems))
    wall = time.perf_counter() - t0

    rows, summary = [], {"pass": 0, "fail": 0, "skipped": 0}
    out_systems = []
    for rep in reports:
        outcome = rep.outcome
        if cfg.strict and outcome == "skipped":
            outcome = "fail"
        summary[outcome] += 1
        state_rows = []
        for c in rep.checks:
            row = c.row()
            row["status"] = rep.system.status.value
            state_rows.append(row)
            rows.append(row)
        out_systems.append({"id": rep.system.id, "status": rep.system.status.value, "outcome": outcome,
                            "states": state_rows})
    emit(cfg, {"tolerance": cfg.tol, "summary": summary, "systems": out_systems}, rows)
    click.echo(
        f"verified {len(reports)} system(s): {summary['pass']} pass, {summary['fail']} fail, "
        f"{summary['skipped']} skipped in {wall:.2f}s",
        err=True,
    )
    if summary["fail"]:
        sys.exit(EXIT_FAIL)


@main.command("schwartzian-check")
@click.argument("expression")
@common_options
def cmd_schwartzian_check(expression, **kw):
    """Compare the symbolic Schwartzian of g(r) with finite differences at 50 points."""
    cfg = _cfg(kw)
    try:
        g = X.parse(expression, variables={"r"})
        sym = T.schwartzian(g)
    except (X.ParseError, ValueError) as exc:
        raise InputError(f"cannot use {expression!r}: {exc}") from None
    a, b, n = cfg.grid if cfg.grid else (0.1, 2.0, 50)
    r = np.linspace(a, b, n)
    try:
        exact = np.asarray(X.evaluate(sym, {"r": r}), dtype=float) * np.ones_like(r)
        approx = T.schwartzian_numeric(g, r)
    except X.DomainError as exc:
        raise InputError(f"g is not defined on [{a}, {b}]: {exc}") from None
    dev = np.abs(exact - approx) / np.maximum(1.0, np.abs(exact))
    worst = float(np.max(dev))
    rows = [{"r": float(ri), "symbolic": float(e), "finite_difference": float(f)} for ri, e, f in zip(r, exact, approx)]
    emit(cfg, {"g": str(g), "schwartzian": str(sym), "max_deviation": worst, "points": rows}, rows)
    click.echo(f"{{g, r}} = {sym}; max deviation {worst:.3g}", err=True)
    if not worst < 1e-6:
        sys.exit(EXIT_FAIL)


if __name__ == "__main__":
    main()
