"""Concrete operators: dense matrices, inpainting masks, identity and scalings"""
from pathlib import Path
from typing import Tuple, Union

import numpy as np
import pandas as pd

from src.errors import InvalidInputError
from src.operators import LinearMap


class DenseMap(LinearMap):
    """Dense matrix acting on flat vectors"""

    kind = "dense-matrix"

    def __init__(self, matrix: np.ndarray):
        matrix = np.array(matrix, dtype=float)
        if matrix.ndim != 2:
            raise InvalidInputError(f"Dense operator needs a 2D matrix, got ndim={matrix.ndim}")
        if not np.all(np.isfinite(matrix)):
            raise InvalidInputError("Dense operator contains non-finite entries")
        matrix.setflags(write=False)
        self.matrix = matrix
        super().__init__((matrix.shape[1],), (matrix.shape[0],))

    def _apply(self, u: np.ndarray) -> np.ndarray:
        return self.matrix @ u

    def _adjoint(self, v: np.ndarray) -> np.ndarray:
        return self.matrix.T @ v

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "DenseMap":
        """Load a header-free, row-major CSV matrix"""
        frame = pd.read_csv(path, header=None, float_precision="round_trip")
        return cls(frame.to_numpy(dtype=float))


class MaskMap(LinearMap):
    """Pointwise multiplication by a 0/1 mask (inpainting); self-adjoint"""

    kind = "diagonal-mask"

    def __init__(self, mask: np.ndarray):
        mask = np.array(mask, dtype=float)
        if not np.all((mask == 0.0) | (mask == 1.0)):
            raise InvalidInputError("Mask entries must be 0 or 1")
        mask.setflags(write=False)
        self.mask = mask
        super().__init__(mask.shape, mask.shape)

    def _apply(self, u: np.ndarray) -> np.ndarray:
        return self.mask * u

    def _adjoint(self, v: np.ndarray) -> np.ndarray:
        return self.mask * v

    @property
    def is_zero(self) -> bool:
        return not np.any(self.mask)


class IdentityMap(LinearMap):
    """Identity on a grid of the given shape"""

    kind = "identity"

    def __init__(self, shape: Tuple[int, ...]):
        super().__init__(shape, shape)

    def _apply(self, u: np.ndarray) -> np.ndarray:
        return u.copy()

    def _adjoint(self, v: np.ndarray) -> np.ndarray:
        return v.copy()


class ScaledMap(LinearMap):
    """factor * base"""

    kind = "scaled"

    def __init__(self, base: LinearMap, factor: float):
        if not np.isfinite(factor):
            raise InvalidInputError(f"Scale factor must be finite, got {factor}")
        if isinstance(base, ScaledMap):
            factor = factor * base.factor
            base = base.base
        self.base = base
        self.factor = float(factor)
        super().__init__(base.domain_shape, base.codomain_shape)

    def _apply(self, u: np.ndarray) -> np.ndarray:
        return self.factor * self.base.apply(u)

    def _adjoint(self, v: np.ndarray) -> np.ndarray:
        return self.factor * self.base.adjoint_apply(v)
