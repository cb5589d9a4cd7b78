"""Exactly solvable Schrodinger equations from polynomial ODEs, with numerical checks."""

from . import catalog, expr, polys, solver, transform
from .catalog import QuantumSystem, Status, build, system_ids
from .solver import RadialGrid, find_eigenvalue, solve_state, verify_state

__all__ = [
    "QuantumSystem", "RadialGrid", "Status", "build", "catalog", "expr", "find_eigenvalue",
    "polys", "solve_state", "solver", "system_ids", "transform", "verify_state",
]
__version__ = "0.1.0"
