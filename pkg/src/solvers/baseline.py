"""Single-domain iterative thresholding u <- S(u + T*(g - Tu))"""
from typing import Optional

import numpy as np
from loguru import logger

from src.solvers.energy import energy
from src.solvers.problem import (
    REASON_MAX_OUTER,
    REASON_TOL,
    EnergyTrace,
    SolveProblem,
    SolveResult,
    SolverConfig,
)

log = logger.bind(component="baseline-solver")

THRESHOLD_KEY = ("threshold", 0)


def iterative_threshold_solve(
    problem: SolveProblem,
    cfg: Optional[SolverConfig] = None,
    u0: Optional[np.ndarray] = None,
    timing: bool = True,
) -> SolveResult:
    """
    Baseline solver: one generalized thresholding per outer iteration.

    Stops when |J(u^(n+1)) - J(u^n)| < outer_tol or after max_outer steps.
    The problem's decomposition is ignored.
    """
    cfg = cfg or SolverConfig.from_config(problem.psi_kind)
    penalty = problem.make_penalty(cfg.chambolle, cfg.warm_start)
    T, g = problem.operator, problem.datum

    u = np.zeros(problem.shape) if u0 is None else np.array(u0, dtype=float)
    trace = EnergyTrace(timing)
    current = energy(problem, u)
    trace.record(0, current, 0.0)
    reference = current
    increases = 0
    reason = REASON_MAX_OUTER

    for n in range(1, cfg.max_outer + 1):
        w = u + T.adjoint_apply(g - T.apply(u))
        u_next = penalty.threshold(w, problem.alpha, THRESHOLD_KEY)
        increment = float(np.linalg.norm(u_next - u))
        u = u_next
        new = energy(problem, u)
        trace.record(n, new, increment)

        if new > current + cfg.monotone_slack * (1.0 + reference):
            increases += 1
            log.warning(f"Energy rose by {new - current:.3g} at iteration {n}")
        log.info(f"iter {n}: J={new:.12g} increment={increment:.3g}")

        done = abs(new - current) < cfg.outer_tol
        current = new
        if done:
            reason = REASON_TOL
            break

    if reason == REASON_TOL:
        log.success(f"Baseline converged after {len(trace) - 1} iterations, J={current:.12g}")
    else:
        log.info(f"Baseline stopped at max_outer={cfg.max_outer}, J={current:.12g}")
    return SolveResult(u, trace, reason, energy_increases=increases)
