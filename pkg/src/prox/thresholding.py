"""Soft thresholding and box projections for the (weighted) l1 norm"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.errors import InvalidInputError, ShapeMismatchError


@dataclass(frozen=True)
class WeightVector:
    """Strictly positive l1 weights w_lambda >= floor > 0"""

    values: np.ndarray
    floor: float = 1e-12

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if self.floor <= 0:
            raise InvalidInputError(f"Weight floor must be positive, got {self.floor}")
        if np.any(values < self.floor):
            raise InvalidInputError(
                f"Weights must be >= floor {self.floor}; minimum is {values.min():.6g}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def shape(self):
        return self.values.shape


def soft_threshold(x: float, theta: float) -> float:
    """S_theta(x) = x - sgn(x) theta if |x| > theta, else 0"""
    if theta < 0:
        raise InvalidInputError(f"Threshold must be nonnegative, got {theta}")
    if abs(x) > theta:
        return x - np.sign(x) * theta
    return 0.0


def _thresholds(u: np.ndarray, alpha: float, weights: Optional[WeightVector]) -> np.ndarray:
    if alpha < 0:
        raise InvalidInputError(f"Threshold must be nonnegative, got {alpha}")
    if weights is None:
        return np.full(u.shape, float(alpha))
    if weights.shape != u.shape:
        raise ShapeMismatchError(f"Weights of shape {weights.shape} do not match {u.shape}")
    return alpha * weights.values


def soft_threshold_vector(
    u: np.ndarray, alpha: float, weights: Optional[WeightVector] = None
) -> np.ndarray:
    """Componentwise S_{alpha * w_lambda}(u_lambda); no weights means w = 1"""
    u = np.asarray(u, dtype=float)
    theta = _thresholds(u, alpha, weights)
    return np.sign(u) * np.maximum(np.abs(u) - theta, 0.0)


def project_box(u: np.ndarray, alpha: float, weights: Optional[WeightVector] = None) -> np.ndarray:
    """Projection onto alpha*K for the weighted l1 norm: clip to [-alpha w, alpha w]"""
    u = np.asarray(u, dtype=float)
    theta = _thresholds(u, alpha, weights)
    return np.clip(u, -theta, theta)


def weighted_l1(u: np.ndarray, weights: Optional[WeightVector] = None) -> float:
    """sum_lambda w_lambda |u_lambda|"""
    u = np.asarray(u, dtype=float)
    if weights is None:
        return float(np.sum(np.abs(u)))
    if weights.shape != u.shape:
        raise ShapeMismatchError(f"Weights of shape {weights.shape} do not match {u.shape}")
    return float(np.sum(weights.values * np.abs(u)))
