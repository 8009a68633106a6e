"""
Forward-difference gradients, backward-difference divergences and discrete TV.

The divergence is the negative adjoint of the gradient:
    <grad u, p> = -<u, div p>
Dual fields are stored as arrays of shape (N,) in 1D and (2, N, M) in 2D,
with p[0] the x (row) component and p[1] the y (column) component.
"""
import numpy as np

from src.errors import InvalidInputError


def _require_ndim(array: np.ndarray, ndim: int, name: str) -> np.ndarray:
    array = np.asarray(array, dtype=float)
    if array.ndim != ndim:
        raise InvalidInputError(f"{name} expects a {ndim}D array, got shape {array.shape}")
    return array


def gradient_1d(u: np.ndarray) -> np.ndarray:
    """(u_x)_i = u_{i+1} - u_i for i < N, 0 at i = N"""
    u = _require_ndim(u, 1, "gradient_1d")
    grad = np.zeros_like(u)
    grad[:-1] = u[1:] - u[:-1]
    return grad


def gradient_2d(u: np.ndarray) -> np.ndarray:
    """Forward differences along rows (x) and columns (y), zero on the last row/column"""
    u = _require_ndim(u, 2, "gradient_2d")
    grad = np.zeros((2,) + u.shape)
    grad[0, :-1, :] = u[1:, :] - u[:-1, :]
    grad[1, :, :-1] = u[:, 1:] - u[:, :-1]
    return grad


def _backward_difference(p: np.ndarray, axis: int) -> np.ndarray:
    """
    Three-case backward difference along one axis:
        p_1 at the first node, p_i - p_{i-1} inside, -p_{N-1} at the last node.
    The last entry of p along the axis is never read.
    """
    p = np.moveaxis(p, axis, 0)
    out = np.zeros_like(p)
    n = p.shape[0]
    if n > 1:
        out[0] = p[0]
        out[1:-1] = p[1:-1] - p[:-2]
        out[-1] = -p[-2]
    return np.moveaxis(out, 0, axis)


def divergence_1d(p: np.ndarray) -> np.ndarray:
    """Backward-difference divergence of a 1D dual field"""
    p = _require_ndim(p, 1, "divergence_1d")
    return _backward_difference(p, 0)


def divergence_2d(p: np.ndarray) -> np.ndarray:
    """Backward-difference divergence of a (2, N, M) dual field"""
    p = np.asarray(p, dtype=float)
    if p.ndim != 3 or p.shape[0] != 2:
        raise InvalidInputError(f"divergence_2d expects shape (2, N, M), got {p.shape}")
    return _backward_difference(p[0], 0) + _backward_difference(p[1], 1)


def gradient(u: np.ndarray) -> np.ndarray:
    """Dispatch to the 1D or 2D gradient by dimension"""
    u = np.asarray(u, dtype=float)
    if u.ndim == 1:
        return gradient_1d(u)
    if u.ndim == 2:
        return gradient_2d(u)
    raise InvalidInputError(f"Only 1D and 2D grids are supported, got ndim={u.ndim}")


def divergence(p: np.ndarray) -> np.ndarray:
    """Dispatch to the 1D or 2D divergence by dual field layout"""
    p = np.asarray(p, dtype=float)
    if p.ndim == 1:
        return divergence_1d(p)
    return divergence_2d(p)


def gradient_magnitude(field: np.ndarray) -> np.ndarray:
    """Per-node magnitude of a dual field: |p_i| in 1D, sqrt(px^2 + py^2) in 2D"""
    field = np.asarray(field, dtype=float)
    if field.ndim == 1:
        return np.abs(field)
    return np.sqrt(field[0] ** 2 + field[1] ** 2)


def discrete_tv(u: np.ndarray) -> float:
    """Sum over nodes of |grad u| (isotropic in 2D)"""
    return float(np.sum(gradient_magnitude(gradient(u))))
