"""Energy evaluation, baseline thresholding and subspace correction solvers"""
from src.solvers.baseline import iterative_threshold_solve
from src.solvers.energy import energy, penalty_value, surrogate_energy
from src.solvers.naive import naive_tv1d_solve
from src.solvers.problem import EnergyTrace, SolveProblem, SolveResult, SolverConfig
from src.solvers.subspace import (
    SubspaceCorrection,
    inner_subspace_min,
    parallel_solve,
    sequential_solve,
    solve,
)

__all__ = [
    "EnergyTrace",
    "SolveProblem",
    "SolveResult",
    "SolverConfig",
    "SubspaceCorrection",
    "energy",
    "inner_subspace_min",
    "iterative_threshold_solve",
    "naive_tv1d_solve",
    "parallel_solve",
    "penalty_value",
    "sequential_solve",
    "solve",
    "surrogate_energy",
]
