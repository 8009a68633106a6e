"""
Subspace correction by oblique thresholding.

Each outer iteration minimizes J over every subspace V_i in turn
(sequential, Gauss-Seidel) or over all subspaces from the same iterate and
averages the updates (parallel):

    u^(n+1) = u^n + (1/N) sum_i (u_i^new - pi_{V_i} u^n)

Inside a subspace, L steps of the surrogate minimization are taken, each an
oblique thresholding of z = pi_{V_i}(u + T*(g - Tu)) given the frozen
complement u2.
"""
from concurrent.futures import ThreadPoolExecutor
from functools import partial
from typing import List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from src.decomp import SubspaceDecomposition
from src.errors import EtaDivergenceError
from src.oblique import (
    EtaState,
    StripePiece,
    eta_fixed_point,
    oblique_threshold,
    restrict_to_stripe,
    restricted_eta,
)
from src.prox import Penalty
from src.solvers.energy import energy
from src.solvers.problem import (
    REASON_ETA,
    REASON_MAX_OUTER,
    REASON_TOL,
    EnergyTrace,
    SolveProblem,
    SolveResult,
    SolverConfig,
)


def inner_subspace_min(
    problem: SolveProblem,
    u: np.ndarray,
    i: int,
    inner: int,
    decomposition: SubspaceDecomposition,
    penalty: Penalty,
    cfg: SolverConfig,
    eta_warm: Optional[np.ndarray] = None,
    stripes: Optional[Sequence[StripePiece]] = None,
) -> Tuple[np.ndarray, EtaState]:
    """
    `inner` surrogate steps on V_i with u2 = u - pi_{V_i} u held fixed.

    Args:
        problem: Rescaled problem
        u: Current iterate
        i: Subspace index
        inner: Number of steps L
        decomposition: Active decomposition
        penalty: Penalty owning the warm-start duals of this subspace
        cfg: Solver settings (eta options, splitting, warm starts)
        eta_warm: Multiplier from the previous pass
        stripes: Bands for the restricted eta computation, if any

    Returns:
        Tuple of the new V_i component and the last multiplier state

    Raises:
        EtaDivergenceError: when eta has no fixed point in the complement
    """
    T, g, alpha = problem.operator, problem.datum, problem.alpha
    u_i = decomposition.project(i, u)
    u2 = u - u_i

    direct = decomposition.count == 1 or (cfg.use_splitting and penalty.splits_over(decomposition))
    threshold_key = ("threshold", i)
    state = EtaState.zero(u.shape) if eta_warm is None else EtaState(np.array(eta_warm))

    for _ in range(inner):
        current = u_i + u2
        z = decomposition.project(i, current + T.adjoint_apply(g - T.apply(current)))

        if direct:
            # psi splits, so the multiplier does not affect the V_i entries
            u_i = decomposition.project(i, penalty.threshold(z + u2, alpha, threshold_key) - u2)
            continue

        warm = state.eta if cfg.warm_start else None
        if stripes is not None:
            state = restricted_eta(
                z,
                u2,
                alpha,
                stripes,
                lambda k: partial(penalty.project, key=("eta", i, k)),
                warm_start=warm,
                **cfg.eta_options,
            )
        else:
            state = eta_fixed_point(
                z,
                u2,
                alpha,
                partial(penalty.project, key=("eta", i)),
                partial(decomposition.complement, i),
                warm_start=warm,
                **cfg.eta_options,
            )
        u_i = oblique_threshold(
            z,
            u2,
            alpha,
            state,
            partial(penalty.threshold, key=threshold_key),
            partial(decomposition.project, i),
            subspace=i,
        )

    return u_i, state


class SubspaceCorrection:
    """Outer iteration of the sequential and parallel subspace correction methods"""

    def __init__(self, problem: SolveProblem, cfg: Optional[SolverConfig] = None, timing: bool = True):
        self.problem = problem
        self.cfg = cfg or SolverConfig.from_config(problem.psi_kind)
        self.timing = timing
        self.logger = logger.bind(component="subspace-solver")

        self._decomposition: Optional[SubspaceDecomposition] = None
        self._penalties: List[Penalty] = []
        self._etas: List[Optional[np.ndarray]] = []
        self._stripes: List[Optional[List[StripePiece]]] = []

    def _decomposition_for(self, outer_iter: int) -> SubspaceDecomposition:
        if self.problem.schedule is None:
            return self.problem.decomposition
        return self.problem.schedule.decomposition_for(outer_iter)

    def _activate(self, decomposition: SubspaceDecomposition) -> None:
        """Make `decomposition` current, resetting warm starts when it changes"""
        if decomposition is self._decomposition:
            return
        if self._decomposition is not None:
            self.logger.warning(
                f"Switching to {decomposition.describe()}; eta and dual warm starts reset"
            )
        else:
            self.logger.info(f"Decomposition: {decomposition.describe()}")

        self._decomposition = decomposition
        count = decomposition.count
        base = self.problem.make_penalty(self.cfg.chambolle, self.cfg.warm_start)
        self._penalties = [base] + [base.fork() for _ in range(count - 1)]
        self._etas = [None] * count

        restrict = (
            self.problem.stripe is not None
            and self.problem.is_tv
            and decomposition.kind.startswith("stripes")
        )
        self._stripes = [
            restrict_to_stripe(decomposition, i, self.problem.stripe) if restrict else None
            for i in range(count)
        ]

    def _subspace_update(self, u: np.ndarray, i: int) -> Tuple[np.ndarray, EtaState]:
        return inner_subspace_min(
            self.problem,
            u,
            i,
            self.cfg.inner_for(i),
            self._decomposition,
            self._penalties[i],
            self.cfg,
            eta_warm=self._etas[i],
            stripes=self._stripes[i],
        )

    def _sweep_sequential(self, u: np.ndarray) -> np.ndarray:
        dec = self._decomposition
        for i in range(dec.count):
            new_i, state = self._subspace_update(u, i)
            self._etas[i] = state.eta
            u = u - dec.project(i, u) + new_i
            self.logger.debug(f"subspace {i}: eta iterations {state.iters_used}")
        return u

    def _sweep_parallel(self, u: np.ndarray, pool: Optional[ThreadPoolExecutor]) -> np.ndarray:
        dec = self._decomposition
        indices = range(dec.count)
        if pool is None:
            results = [self._subspace_update(u, i) for i in indices]
        else:
            results = list(pool.map(lambda i: self._subspace_update(u, i), indices))

        # Merge in subspace order so the sum does not depend on scheduling
        correction = np.zeros_like(u)
        for i, (new_i, state) in enumerate(results):
            self._etas[i] = state.eta
            correction += new_i - dec.project(i, u)
        return u + correction / dec.count

    def solve(self, u0: Optional[np.ndarray] = None, parallel: bool = False) -> SolveResult:
        """
        Run outer iterations until |J(u^(n+1)) - J(u^n)| < outer_tol or max_outer.

        On eta divergence the failing pass is discarded and the previous
        iterate is returned with reason "eta-divergence".
        """
        problem, cfg = self.problem, self.cfg
        mode = "parallel" if parallel else "sequential"
        u = np.zeros(problem.shape) if u0 is None else np.array(u0, dtype=float)

        trace = EnergyTrace(self.timing)
        current = energy(problem, u)
        trace.record(0, current, 0.0)
        reference = current
        increases = 0
        warnings: List[str] = []
        reason = REASON_MAX_OUTER

        workers = min(cfg.max_workers, max(self._decomposition_for(0).count, 1))
        pool = ThreadPoolExecutor(max_workers=workers) if parallel and workers > 1 else None
        self.logger.info(
            f"Starting {mode} solve: {problem.psi_kind}, alpha={problem.original_alpha:.6g}, "
            f"inner={list(cfg.inner_iters)}, max_outer={cfg.max_outer}, workers={workers if pool else 1}"
        )

        try:
            for n in range(1, cfg.max_outer + 1):
                self._activate(self._decomposition_for(n - 1))
                try:
                    u_next = self._sweep_parallel(u, pool) if parallel else self._sweep_sequential(u)
                except EtaDivergenceError as e:
                    self.logger.error(f"Outer iteration {n} aborted: {e}")
                    warnings.append(str(e))
                    reason = REASON_ETA
                    break

                increment = float(np.linalg.norm(u_next - u))
                u = u_next
                new = energy(problem, u)
                trace.record(n, new, increment)

                if new > current + cfg.monotone_slack * (1.0 + reference):
                    increases += 1
                    self.logger.warning(
                        f"Energy rose by {new - current:.3g} at outer iteration {n} (inexact inner solves)"
                    )
                self.logger.info(f"outer {n}: J={new:.12g} increment={increment:.3g}")

                done = abs(new - current) < cfg.outer_tol
                current = new
                if done:
                    reason = REASON_TOL
                    break
        finally:
            if pool is not None:
                pool.shutdown()

        final = self._decomposition
        if final is not None and not self._penalties[0].splits_over(final):
            warnings.append(
                f"Minimizer not certified: psi does not split across the {final.label} subspaces"
            )
        if reason == REASON_TOL:
            self.logger.success(
                f"{mode.capitalize()} solve converged after {len(trace) - 1} outer iterations, J={current:.12g}"
            )
        else:
            self.logger.info(
                f"{mode.capitalize()} solve stopped ({reason}) after {len(trace) - 1} outer iterations"
            )
        return SolveResult(u, trace, reason, warnings=warnings, energy_increases=increases)


def sequential_solve(
    problem: SolveProblem,
    cfg: Optional[SolverConfig] = None,
    u0: Optional[np.ndarray] = None,
    timing: bool = True,
) -> SolveResult:
    """Gauss-Seidel sweep over the subspaces in block order"""
    return SubspaceCorrection(problem, cfg, timing).solve(u0, parallel=False)


def parallel_solve(
    problem: SolveProblem,
    cfg: Optional[SolverConfig] = None,
    u0: Optional[np.ndarray] = None,
    timing: bool = True,
) -> SolveResult:
    """All subspaces from the same iterate, merged by averaging; threads capped by max_workers"""
    return SubspaceCorrection(problem, cfg, timing).solve(u0, parallel=True)


def solve(
    problem: SolveProblem,
    cfg: Optional[SolverConfig] = None,
    u0: Optional[np.ndarray] = None,
    timing: bool = True,
) -> SolveResult:
    """Dispatch on cfg.parallel"""
    cfg = cfg or SolverConfig.from_config(problem.psi_kind)
    runner = parallel_solve if cfg.parallel else sequential_solve
    return runner(problem, cfg, u0, timing)
