"""Bose-Hubbard state-engineering strategies (FUMES, Z-FUMES, ManQala)."""

from manqala._core import (
    Experiment,
    ManqalaError,
    basis_dimension,
    bosonic_distance,
    compile_moves,
    demarcate,
    designated_time,
    enumerate_basis,
    strategies,
    tchoukaillon_plan,
    tunneling_distance,
)

__all__ = [
    "Experiment",
    "ManqalaError",
    "basis_dimension",
    "bosonic_distance",
    "compile_moves",
    "demarcate",
    "designated_time",
    "enumerate_basis",
    "strategies",
    "tchoukaillon_plan",
    "tunneling_distance",
]
