"""Spectral norm estimation and the ||T|| < 1 rescaling"""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from loguru import logger

from src.config import OPERATOR_CONFIG
from src.errors import InvalidInputError
from src.operators import LinearMap
from src.operators.maps import IdentityMap, MaskMap, ScaledMap

log = logger.bind(component="operator-norm")


@dataclass(frozen=True)
class NormBound:
    """Estimate of ||T|| and the power iterations spent on it"""

    estimate: float
    iterations_used: int

    def __post_init__(self):
        if self.estimate < 0:
            raise InvalidInputError(f"Norm estimate must be nonnegative, got {self.estimate}")


def estimate_spectral_norm(
    linear_map: LinearMap,
    tol: Optional[float] = None,
    max_iters: Optional[int] = None,
    seed: Optional[int] = None,
) -> NormBound:
    """
    Estimate the largest singular value of T by power iteration on T*T.

    Identity and mask operators short-circuit to their exact norm (1, or 0
    for an all-zero mask); scaled maps reuse the base estimate.

    Args:
        linear_map: Operator T
        tol: Relative change of the estimate below which iteration stops
        max_iters: Iteration cap; hitting it returns the best estimate so far
        seed: Seed of the random starting vector

    Returns:
        NormBound with the estimate and the number of iterations used
    """
    tol = OPERATOR_CONFIG["norm_tol"] if tol is None else tol
    max_iters = OPERATOR_CONFIG["norm_max_iters"] if max_iters is None else max_iters
    seed = OPERATOR_CONFIG["seed"] if seed is None else seed
    if tol <= 0:
        raise InvalidInputError(f"Norm tolerance must be positive, got {tol}")

    if isinstance(linear_map, IdentityMap):
        return NormBound(1.0, 0)
    if isinstance(linear_map, MaskMap):
        return NormBound(0.0 if linear_map.is_zero else 1.0, 0)
    if isinstance(linear_map, ScaledMap):
        inner = estimate_spectral_norm(linear_map.base, tol, max_iters, seed)
        return NormBound(abs(linear_map.factor) * inner.estimate, inner.iterations_used)

    rng = np.random.default_rng(seed)
    x = rng.standard_normal(linear_map.domain_shape)
    x /= np.linalg.norm(x)
    estimate = 0.0

    for iteration in range(1, max_iters + 1):
        y = linear_map.normal_apply(x)
        y_norm = np.linalg.norm(y)
        if y_norm == 0.0:
            return NormBound(0.0, iteration)
        new_estimate = float(np.sqrt(y_norm))
        x = y / y_norm
        if abs(new_estimate - estimate) <= tol * new_estimate:
            log.debug(f"Power iteration converged to {new_estimate:.10g} in {iteration} steps")
            return NormBound(new_estimate, iteration)
        estimate = new_estimate

    log.warning(f"Power iteration hit max_iters={max_iters}; returning estimate {estimate:.10g}")
    return NormBound(estimate, max_iters)


def rescale_problem(
    linear_map: LinearMap,
    g: np.ndarray,
    target: Optional[float] = None,
    tol: Optional[float] = None,
    max_iters: Optional[int] = None,
    seed: Optional[int] = None,
) -> Tuple[LinearMap, np.ndarray, float]:
    """
    Rescale (T, g) to (T/c, g/c) so that the scaled operator norm is about target.

    Minimizers of the scaled problem with alpha/c^2 equal minimizers of the
    original problem with alpha.

    Returns:
        Tuple of (scaled map, scaled datum, scale c); c = 1 for a zero operator
    """
    target = OPERATOR_CONFIG["rescale_target"] if target is None else target
    if not 0.0 < target < 1.0:
        raise InvalidInputError(f"Rescaling target must lie in (0, 1), got {target}")

    bound = estimate_spectral_norm(linear_map, tol, max_iters, seed)
    if bound.estimate == 0.0:
        log.warning("Operator norm estimate is zero; problem left unscaled")
        return linear_map, np.asarray(g, dtype=float), 1.0

    scale = bound.estimate / target
    log.debug(f"Rescaling by c={scale:.10g} (||T|| ~ {bound.estimate:.10g}, target {target})")
    return linear_map.scaled(1.0 / scale), np.asarray(g, dtype=float) / scale, scale
