"""Discrete calculus on regular grids with unit step"""
from src.grids.calculus import (
    discrete_tv,
    divergence,
    divergence_1d,
    divergence_2d,
    gradient,
    gradient_1d,
    gradient_2d,
    gradient_magnitude,
)

__all__ = [
    "discrete_tv",
    "divergence",
    "divergence_1d",
    "divergence_2d",
    "gradient",
    "gradient_1d",
    "gradient_2d",
    "gradient_magnitude",
]
