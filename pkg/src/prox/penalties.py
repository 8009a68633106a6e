"""Penalties used by the solvers: discrete total variation and weighted l1"""
from typing import Dict, Hashable, Optional

import numpy as np

from src.grids.calculus import discrete_tv
from src.prox import Penalty
from src.prox.chambolle import ChambolleConfig, chambolle_project_1d, chambolle_project_2d
from src.prox.thresholding import WeightVector, project_box, soft_threshold_vector, weighted_l1


class TVPenalty(Penalty):
    """Discrete total variation; projections by Chambolle's dual iteration"""

    kind = "tv"

    def __init__(self, cfg: Optional[ChambolleConfig] = None, warm_start: bool = True):
        super().__init__()
        self.cfg = cfg or ChambolleConfig()
        self.warm_start = warm_start
        self._duals: Dict[Hashable, np.ndarray] = {}
        self.projections = 0
        self.dual_iterations = 0

    def value(self, u: np.ndarray) -> float:
        return discrete_tv(u)

    def project(self, w: np.ndarray, alpha: float, key: Optional[Hashable] = None) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        if alpha == 0:
            return np.zeros_like(w)
        dual = self._duals.get(key) if self.warm_start and key is not None else None
        project = chambolle_project_1d if w.ndim == 1 else chambolle_project_2d
        result = project(w, alpha, self.cfg, dual)
        if self.warm_start and key is not None:
            self._duals[key] = result.dual
        self.projections += 1
        self.dual_iterations += result.iters
        return result.projection

    def fork(self) -> "TVPenalty":
        return TVPenalty(self.cfg, self.warm_start)


class L1Penalty(Penalty):
    """Weighted l1 norm; P_{alpha K} is the componentwise clip to [-alpha w, alpha w]"""

    kind = "l1"

    def __init__(self, weights: Optional[WeightVector] = None):
        super().__init__()
        self.weights = weights

    def value(self, u: np.ndarray) -> float:
        return weighted_l1(u, self.weights)

    def project(self, w: np.ndarray, alpha: float, key: Optional[Hashable] = None) -> np.ndarray:
        return project_box(w, alpha, self.weights)

    def threshold(self, w: np.ndarray, alpha: float, key: Optional[Hashable] = None) -> np.ndarray:
        return soft_threshold_vector(w, alpha, self.weights)

    def fork(self) -> "L1Penalty":
        return L1Penalty(self.weights)

    def splits_over(self, decomposition) -> bool:
        # Coordinate blocks split the l1 norm; rotated subspaces do not
        return decomposition.q is None or decomposition.count == 1
