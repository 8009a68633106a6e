"""
Naive two-domain TV scheme in 1D, kept as a comparison solver.

Each subdomain takes a semi-implicit (lagged diffusivity) descent step of

    lambda |u - g|^2 + |Du|,

    u^(n+1) - (tau/h^2) [ (u_{i+1} - u_i)/c_{i+1} - (u_i - u_{i-1})/c_i ]^(n+1)
        = u^n - 2 tau lambda (u^n - g),     c_i = sqrt(eps^2 + (u^n_i - u^n_{i-1})^2 / h^2),

with Neumann conditions at the outer ends. The two subdomains share the
interface node s, which acts as a Dirichlet value for both and is moved
only through the subdifferential inclusion at the interface:

    u(s) <- u(s) - S_{c h}(u(s) - u(s-1)),   c = sqrt(eps^2 + (u(s+1) - u(s))^2 / h^2).

When the gradients on both sides of s have equal magnitude the threshold
never fires and the interface node stays frozen, which is the known
failure mode of this approach.
"""
import math
from typing import Optional

import numpy as np
from loguru import logger
from scipy.linalg import solve_banded

from src.errors import InvalidInputError, ShapeMismatchError
from src.prox.thresholding import soft_threshold

log = logger.bind(component="naive-solver")


def _diffusivity(differences: np.ndarray, eps: float, h: float) -> np.ndarray:
    return np.sqrt(eps**2 + (differences / h) ** 2)


def _implicit_step(
    u: np.ndarray,
    g: np.ndarray,
    lam: np.ndarray,
    tau: float,
    eps: float,
    h: float,
    left: Optional[float] = None,
    right: Optional[float] = None,
) -> np.ndarray:
    """One semi-implicit step on a subdomain; `left`/`right` are Dirichlet neighbours"""
    m = u.size
    if m == 0:
        return u.copy()

    # Edge weights tau / (h^2 c) between consecutive nodes
    weights = tau / (h**2 * _diffusivity(np.diff(u), eps, h))
    diag = np.ones(m)
    diag[:-1] += weights
    diag[1:] += weights
    rhs = u - 2.0 * tau * lam * (u - g)

    if left is not None:
        w = tau / (h**2 * _diffusivity(np.array([u[0] - left]), eps, h)[0])
        diag[0] += w
        rhs[0] += w * left
    if right is not None:
        w = tau / (h**2 * _diffusivity(np.array([right - u[-1]]), eps, h)[0])
        diag[-1] += w
        rhs[-1] += w * right

    banded = np.zeros((3, m))
    banded[0, 1:] = -weights
    banded[1] = diag
    banded[2, :-1] = -weights
    return solve_banded((1, 1), banded, rhs)


def naive_tv1d_solve(
    g: np.ndarray,
    mask: Optional[np.ndarray] = None,
    lambda0: float = 1.0,
    tau_step: float = 0.5,
    eps: float = 0.01,
    interface: Optional[int] = None,
    iters: int = 500,
    h: float = 1.0,
    u0: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Naive domain decomposition for 1D TV denoising / inpainting.

    Args:
        g: Observed signal
        mask: 1 where g is observed, 0 on the inpainting gap (default all ones)
        lambda0: Fidelity weight on observed nodes; the matching J has alpha = 1/(2 lambda0)
        tau_step: Descent step
        eps: Diffusivity regularization
        interface: Shared interface node s (default ceil(N/2) - 1)
        iters: Number of iterations
        h: Grid step
        u0: Initial signal (default g)

    Returns:
        The final iterate
    """
    g = np.asarray(g, dtype=float)
    if g.ndim != 1:
        raise InvalidInputError(f"Naive solver is 1D only, got shape {g.shape}")
    n = g.size
    mask = np.ones(n) if mask is None else np.asarray(mask, dtype=float)
    if mask.shape != g.shape:
        raise ShapeMismatchError(f"Mask of shape {mask.shape} does not match signal {g.shape}")
    s = math.ceil(n / 2) - 1 if interface is None else int(interface)
    if not 1 <= s <= n - 2:
        raise InvalidInputError(f"Interface node {s} must have a neighbour on both sides (N={n})")
    if lambda0 < 0 or tau_step <= 0 or eps <= 0 or h <= 0:
        raise InvalidInputError(
            f"Need lambda0 >= 0 and positive tau, eps, h; got {lambda0}, {tau_step}, {eps}, {h}"
        )

    lam = lambda0 * mask
    u = g.copy() if u0 is None else np.array(u0, dtype=float)

    for it in range(1, iters + 1):
        w = u[s]
        c = _diffusivity(np.array([u[s + 1] - w]), eps, h)[0]
        w = w - soft_threshold(w - u[s - 1], c * h)

        left = _implicit_step(u[:s], g[:s], lam[:s], tau_step, eps, h, right=w)
        right = _implicit_step(u[s + 1:], g[s + 1:], lam[s + 1:], tau_step, eps, h, left=w)
        u = np.concatenate([left, [w], right])

        if it % 100 == 0:
            log.debug(f"naive iteration {it}: interface value {w:.6g}")

    log.info(f"Naive scheme finished {iters} iterations (interface node {s})")
    return u
