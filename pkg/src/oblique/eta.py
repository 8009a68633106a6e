"""
Oblique thresholding.

For z in V1 and u2 in V2 the minimizer over V1 of

    ||u - z||^2 + 2 alpha psi(u + u2)

is S(z + u2 - eta) - u2, where S = I - P_{alpha K} and the multiplier eta in
V2 is a fixed point of

    eta <- pi_{V2} P_{alpha K}(eta - (z + u2)).

The iteration diverges (||eta|| -> infinity) exactly when no such eta exists.
"""
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from loguru import logger

from src.config import ETA_CONFIG
from src.errors import EtaDivergenceError, InvalidInputError

log = logger.bind(component="oblique")

# (w, alpha) -> P_{alpha K}(w) or (I - P_{alpha K})(w)
AlphaMap = Callable[[np.ndarray, float], np.ndarray]
# u -> orthogonal projection of u
Projector = Callable[[np.ndarray], np.ndarray]


@dataclass
class EtaState:
    """Multiplier eta in V2 and how the fixed-point iteration ended"""

    eta: np.ndarray
    iters_used: int = 0
    diverged: bool = False
    converged: bool = True
    increment: float = 0.0

    @classmethod
    def zero(cls, shape) -> "EtaState":
        return cls(np.zeros(shape))


def eta_fixed_point(
    z: np.ndarray,
    u2: np.ndarray,
    alpha: float,
    projector: AlphaMap,
    complement_projector: Projector,
    warm_start: Optional[np.ndarray] = None,
    max_iters: Optional[int] = None,
    guard: Optional[float] = None,
    rel_tol: Optional[float] = None,
) -> EtaState:
    """
    Iterate eta <- pi_{V2} P_{alpha K}(eta - (z + u2)).

    Stops when the sup-norm increment falls below rel_tol * (1 + ||z + u2||)
    or after max_iters. Divergence (||eta|| > guard * (1 + ||z + u2||)) is
    flagged on the returned state, never raised.

    Args:
        z: Component in V1
        u2: Fixed component in V2
        alpha: Threshold parameter
        projector: Evaluator of P_{alpha K}
        complement_projector: pi_{V2}
        warm_start: Initial eta; projected onto V2 before use
        max_iters: Iteration cap (defaults to the TV cap)
        guard: Divergence factor
        rel_tol: Relative stopping tolerance
    """
    max_iters = ETA_CONFIG["max_iters_tv"] if max_iters is None else max_iters
    guard = ETA_CONFIG["guard"] if guard is None else guard
    rel_tol = ETA_CONFIG["rel_tol"] if rel_tol is None else rel_tol
    if alpha < 0:
        raise InvalidInputError(f"alpha must be nonnegative, got {alpha}")
    if max_iters < 1:
        raise InvalidInputError(f"eta max_iters must be >= 1, got {max_iters}")

    shifted = np.asarray(z, dtype=float) + np.asarray(u2, dtype=float)
    scale = 1.0 + float(np.linalg.norm(shifted))

    if warm_start is not None and np.shape(warm_start) == shifted.shape:
        eta = complement_projector(np.asarray(warm_start, dtype=float))
    else:
        eta = np.zeros_like(shifted)

    increment = 0.0
    for m in range(1, max_iters + 1):
        new_eta = complement_projector(projector(eta - shifted, alpha))
        increment = float(np.max(np.abs(new_eta - eta), initial=0.0))
        eta = new_eta
        norm = float(np.linalg.norm(eta))
        if norm > guard * scale:
            log.warning(f"eta iteration diverging: ||eta||={norm:.3g} after {m} steps")
            return EtaState(eta, m, diverged=True, converged=False, increment=increment)
        if increment < rel_tol * scale:
            return EtaState(eta, m, converged=True, increment=increment)

    log.debug(f"eta stopped at max_iters={max_iters} with increment {increment:.3g}")
    return EtaState(eta, max_iters, converged=False, increment=increment)


def oblique_threshold(
    z: np.ndarray,
    u2: np.ndarray,
    alpha: float,
    eta_state: EtaState,
    thresholder: AlphaMap,
    v1_projector: Projector,
    subspace: int = -1,
) -> np.ndarray:
    """
    pi_{V1}(S(z + u2 - eta) - u2), the oblique thresholding of z given u2.

    At an exact fixed point eta the projection is a no-op; its size is
    logged as the V2 leakage of the inexact multiplier.

    Raises:
        EtaDivergenceError: if eta_state flags divergence
    """
    if eta_state.diverged:
        raise EtaDivergenceError(
            f"No multiplier eta in the complement of subspace {subspace}: "
            f"||eta||={np.linalg.norm(eta_state.eta):.3g}",
            subspace=subspace,
            norm=float(np.linalg.norm(eta_state.eta)),
        )

    u2 = np.asarray(u2, dtype=float)
    raw = thresholder(np.asarray(z, dtype=float) + u2 - eta_state.eta, alpha) - u2
    result = v1_projector(raw)

    leakage = float(np.linalg.norm(raw - result))
    scale = 1.0 + float(np.linalg.norm(np.asarray(z) + u2))
    # nonzero whenever eta or the dual projections are inexact
    log.debug(
        f"subspace {subspace}: oblique threshold leakage {leakage:.3g} (relative {leakage / scale:.3g})"
    )
    return result
