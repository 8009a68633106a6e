"""Linear operators T acting on grid functions"""
from abc import ABC, abstractmethod
from typing import Tuple

import numpy as np
from loguru import logger

from src.errors import ShapeMismatchError


class LinearMap(ABC):
    """Base class for all operators T with an adjoint T*

    Instances are immutable after construction, so they can be shared by
    concurrent subspace solves.
    """

    kind: str = "abstract"

    def __init__(self, domain_shape: Tuple[int, ...], codomain_shape: Tuple[int, ...]):
        self.domain_shape = tuple(int(n) for n in domain_shape)
        self.codomain_shape = tuple(int(n) for n in codomain_shape)
        self.logger = logger.bind(component=f"operator-{self.kind}")

    @abstractmethod
    def _apply(self, u: np.ndarray) -> np.ndarray:
        """Evaluate Tu on a validated input"""
        pass

    @abstractmethod
    def _adjoint(self, v: np.ndarray) -> np.ndarray:
        """Evaluate T*v on a validated input"""
        pass

    def apply(self, u: np.ndarray) -> np.ndarray:
        """Return Tu"""
        u = np.asarray(u, dtype=float)
        if u.shape != self.domain_shape:
            raise ShapeMismatchError(
                f"{self.kind} map expects domain shape {self.domain_shape}, got {u.shape}"
            )
        return self._apply(u)

    def adjoint_apply(self, v: np.ndarray) -> np.ndarray:
        """Return T*v"""
        v = np.asarray(v, dtype=float)
        if v.shape != self.codomain_shape:
            raise ShapeMismatchError(
                f"{self.kind} map expects codomain shape {self.codomain_shape}, got {v.shape}"
            )
        return self._adjoint(v)

    def normal_apply(self, u: np.ndarray) -> np.ndarray:
        """Return T*Tu"""
        return self.adjoint_apply(self.apply(u))

    def scaled(self, factor: float) -> "LinearMap":
        """Return the map factor * T"""
        from src.operators.maps import ScaledMap

        return ScaledMap(self, factor)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.domain_shape} -> {self.codomain_shape})"


from src.operators.maps import DenseMap, IdentityMap, MaskMap, ScaledMap  # noqa: E402
from src.operators.norms import NormBound, estimate_spectral_norm, rescale_problem  # noqa: E402

__all__ = [
    "DenseMap",
    "IdentityMap",
    "LinearMap",
    "MaskMap",
    "NormBound",
    "ScaledMap",
    "estimate_spectral_norm",
    "rescale_problem",
]
