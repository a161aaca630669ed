"""Exact maximum Nash social welfare for goods valued 1 or p/2 (p odd)."""
from .core import Allocation, Instance, NswKey, nsw_compare, nsw_key
from .oracle import OracleResult, brute_force, phase_one_brute_force
from .solver import SolveReport, initial_allocation, phase_one, solve

__all__ = [
    "Allocation",
    "Instance",
    "NswKey",
    "OracleResult",
    "SolveReport",
    "brute_force",
    "initial_allocation",
    "nsw_compare",
    "nsw_key",
    "phase_one",
    "phase_one_brute_force",
    "solve",
]
