"""
Chambolle's semi-implicit dual iteration for the projection onto alpha*K,
K = {div p : |p_i| <= 1}, in one and two dimensions.

    p <- (p + tau * grad(div p - g/alpha)) / (1 + tau * |grad(div p - g/alpha)|)

alpha * div p approximates P_{alpha K}(g); g - alpha * div p is the
generalized thresholding (the prox of alpha * TV).
"""
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from loguru import logger

from src.config import CHAMBOLLE_CONFIG
from src.errors import InvalidInputError
from src.grids.calculus import divergence, gradient, gradient_magnitude

log = logger.bind(component="chambolle")

FEASIBILITY_SLACK = 1e-12


@dataclass(frozen=True)
class ChambolleConfig:
    """Step size, stopping tolerance (max per-node dual change) and iteration cap"""

    tau: float = field(default_factory=lambda: CHAMBOLLE_CONFIG["tau"])
    tol: float = field(default_factory=lambda: CHAMBOLLE_CONFIG["tol"])
    max_iters: int = field(default_factory=lambda: CHAMBOLLE_CONFIG["max_iters"])

    def __post_init__(self):
        if self.tau <= 0:
            raise InvalidInputError(f"Chambolle step tau must be positive, got {self.tau}")
        if self.tol <= 0:
            raise InvalidInputError(f"Chambolle tolerance must be positive, got {self.tol}")
        if self.max_iters < 1:
            raise InvalidInputError(f"Chambolle max_iters must be >= 1, got {self.max_iters}")
        if self.tau > 0.25:
            log.warning(f"tau={self.tau} exceeds 1/4; the dual iteration may not converge")


class Projection(NamedTuple):
    """Result of a dual projection: P_{alpha K}(g), the dual field and iterations used"""

    projection: np.ndarray
    dual: np.ndarray
    iters: int


def _dual_shape(g: np.ndarray):
    return g.shape if g.ndim == 1 else (2,) + g.shape


def _chambolle(
    g: np.ndarray,
    alpha: float,
    cfg: ChambolleConfig,
    dual: Optional[np.ndarray],
) -> Projection:
    if alpha <= 0:
        raise InvalidInputError(f"Projection radius alpha must be positive, got {alpha}")
    if not np.all(np.isfinite(g)):
        raise InvalidInputError("Projection input contains non-finite values")

    shape = _dual_shape(g)
    if dual is None or dual.shape != shape:
        p = np.zeros(shape)
    else:
        p = np.array(dual, dtype=float)

    scaled = g / alpha
    iters = 0
    for iters in range(1, cfg.max_iters + 1):
        step = gradient(divergence(p) - scaled)
        p_new = (p + cfg.tau * step) / (1.0 + cfg.tau * gradient_magnitude(step))
        change = float(np.max(gradient_magnitude(p_new - p), initial=0.0))
        p = p_new
        if change < cfg.tol:
            break
    else:
        log.debug(f"Dual iteration reached max_iters={cfg.max_iters} (last change {change:.3g})")

    worst = float(np.max(gradient_magnitude(p), initial=0.0))
    assert worst <= 1.0 + FEASIBILITY_SLACK, f"dual field left the unit ball: {worst}"
    return Projection(alpha * divergence(p), p, iters)


def chambolle_project_1d(
    g: np.ndarray,
    alpha: float,
    cfg: Optional[ChambolleConfig] = None,
    dual: Optional[np.ndarray] = None,
) -> Projection:
    """Approximate P_{alpha K}(g) for a 1D signal; `dual` warm-starts p"""
    g = np.asarray(g, dtype=float)
    if g.ndim != 1:
        raise InvalidInputError(f"chambolle_project_1d expects a 1D signal, got shape {g.shape}")
    return _chambolle(g, alpha, cfg or ChambolleConfig(), dual)


def chambolle_project_2d(
    g: np.ndarray,
    alpha: float,
    cfg: Optional[ChambolleConfig] = None,
    dual: Optional[np.ndarray] = None,
) -> Projection:
    """Approximate P_{alpha K}(g) for a 2D image; `dual` warm-starts p"""
    g = np.asarray(g, dtype=float)
    if g.ndim != 2:
        raise InvalidInputError(f"chambolle_project_2d expects a 2D image, got shape {g.shape}")
    return _chambolle(g, alpha, cfg or ChambolleConfig(), dual)


def generalized_threshold(
    g: np.ndarray,
    alpha: float,
    cfg: Optional[ChambolleConfig] = None,
    geometry: Optional[str] = None,
    dual: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    (I - P_{alpha K})(g): the minimizer of ||u - g||^2 + 2 alpha TV(u).

    Args:
        g: Signal or image
        alpha: Regularization weight; 0 returns g unchanged
        cfg: Dual iteration settings
        geometry: "1d" or "2d"; inferred from g when omitted
        dual: Optional warm start for the dual field
    """
    g = np.asarray(g, dtype=float)
    if alpha == 0:
        return g.copy()
    geometry = geometry or f"{g.ndim}d"
    if geometry == "1d":
        result = chambolle_project_1d(g, alpha, cfg, dual)
    elif geometry == "2d":
        result = chambolle_project_2d(g, alpha, cfg, dual)
    else:
        raise InvalidInputError(f"Unknown geometry {geometry!r}")
    return g - result.projection
