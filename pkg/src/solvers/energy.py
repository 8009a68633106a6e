"""Energy J and the surrogate functional, in units of the original problem"""
from typing import Optional

import numpy as np

from src.decomp import SubspaceDecomposition
from src.errors import ShapeMismatchError
from src.grids.calculus import discrete_tv
from src.prox.thresholding import weighted_l1
from src.solvers.problem import SolveProblem


def _check_shape(problem: SolveProblem, u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape != problem.shape:
        raise ShapeMismatchError(f"Energy expects a function of shape {problem.shape}, got {u.shape}")
    return u


def penalty_value(problem: SolveProblem, u: np.ndarray) -> float:
    """psi(u): discrete TV or weighted l1"""
    if problem.is_tv:
        return discrete_tv(u)
    return weighted_l1(u, problem.weights)


def energy(problem: SolveProblem, u: np.ndarray) -> float:
    """J(u) = ||Tu - g||^2 + 2 alpha psi(u)"""
    u = _check_shape(problem, u)
    residual = problem.operator.apply(u) - problem.datum
    scaled = float(np.sum(residual**2)) + 2.0 * problem.alpha * penalty_value(problem, u)
    return problem.scale**2 * scaled


def surrogate_energy(
    problem: SolveProblem,
    u: np.ndarray,
    a: np.ndarray,
    i: int,
    decomposition: Optional[SubspaceDecomposition] = None,
) -> float:
    """
    J(u) + ||u_i - a||^2 - ||T(u_i - a)||^2 with u_i the V_i component of u.

    With ||T|| < 1 this dominates J(u), with equality when a = u_i.
    """
    u = _check_shape(problem, u)
    a = _check_shape(problem, a)
    decomposition = decomposition or problem.decomposition
    diff = decomposition.project(i, u) - a
    gap = float(np.sum(diff**2)) - float(np.sum(problem.operator.apply(diff) ** 2))
    return energy(problem, u) + problem.scale**2 * gap
