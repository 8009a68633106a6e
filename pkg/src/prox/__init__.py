"""Thresholding and projection primitives for 1-homogeneous penalties psi"""
from abc import ABC, abstractmethod
from typing import Hashable, Optional

import numpy as np
from loguru import logger


class Penalty(ABC):
    """
    A 1-homogeneous penalty psi with its projection P_{alpha K_psi}.

    The generalized thresholding is I - P_{alpha K_psi}. Implementations may
    keep warm-start state per `key`; `fork()` returns an instance with
    independent state so concurrent solves never share it.
    """

    kind: str = "abstract"

    def __init__(self):
        self.logger = logger.bind(component=f"penalty-{self.kind}")

    @abstractmethod
    def value(self, u: np.ndarray) -> float:
        """psi(u)"""
        pass

    @abstractmethod
    def project(self, w: np.ndarray, alpha: float, key: Optional[Hashable] = None) -> np.ndarray:
        """P_{alpha K_psi}(w)"""
        pass

    def threshold(self, w: np.ndarray, alpha: float, key: Optional[Hashable] = None) -> np.ndarray:
        """(I - P_{alpha K_psi})(w)"""
        w = np.asarray(w, dtype=float)
        return w - self.project(w, alpha, key)

    @abstractmethod
    def fork(self) -> "Penalty":
        """Copy with fresh warm-start state"""
        pass

    def splits_over(self, decomposition) -> bool:
        """Whether psi(sum_i u_i) = sum_i psi(u_i) for components of the decomposition"""
        return decomposition.count == 1


from src.prox.penalties import L1Penalty, TVPenalty  # noqa: E402

__all__ = ["L1Penalty", "Penalty", "TVPenalty"]
