"""Problem, configuration and result types shared by all solvers"""
import dataclasses
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from loguru import logger

from src.config import ETA_CONFIG, PARALLEL_CONFIG, SOLVER_CONFIG
from src.decomp import SubspaceDecomposition, SwitchSchedule, make_index_split, make_stripes
from src.errors import CoercivityError, InvalidInputError, ShapeMismatchError
from src.oblique import StripeSpec
from src.operators import LinearMap
from src.operators.norms import rescale_problem
from src.prox import L1Penalty, Penalty, TVPenalty
from src.prox.chambolle import ChambolleConfig
from src.prox.thresholding import WeightVector

PSI_KINDS = ("tv-1d", "tv-2d", "l1")
REASON_TOL = "tol"
REASON_MAX_OUTER = "max_outer"
REASON_ETA = "eta-divergence"


@dataclass
class SolveProblem:
    """
    J(u) = ||Tu - g||^2 + 2 alpha psi(u) in solver units.

    `operator`, `datum` and `alpha` are the rescaled quantities (||T|| < 1);
    `scale` is the factor c of the rescaling, so energies of the original
    problem are c^2 times the energies computed from these fields. Use
    `SolveProblem.build` to rescale raw inputs.
    """

    operator: LinearMap
    datum: np.ndarray
    alpha: float
    psi_kind: str
    decomposition: SubspaceDecomposition
    weights: Optional[WeightVector] = None
    schedule: Optional[SwitchSchedule] = None
    stripe: Optional[StripeSpec] = None
    scale: float = 1.0

    def __post_init__(self):
        self.datum = np.asarray(self.datum, dtype=float)
        if self.psi_kind not in PSI_KINDS:
            raise InvalidInputError(f"Unknown penalty {self.psi_kind!r}; expected one of {PSI_KINDS}")
        if not np.isfinite(self.alpha) or self.alpha < 0:
            raise InvalidInputError(f"alpha must be finite and nonnegative, got {self.alpha}")
        if self.scale <= 0:
            raise InvalidInputError(f"Scale must be positive, got {self.scale}")
        if self.datum.shape != self.operator.codomain_shape:
            raise ShapeMismatchError(
                f"Datum of shape {self.datum.shape} does not match operator codomain {self.operator.codomain_shape}"
            )
        if not np.all(np.isfinite(self.datum)):
            raise InvalidInputError("Datum contains non-finite values")

        domain = self.operator.domain_shape
        expected_ndim = {"tv-1d": 1, "tv-2d": 2, "l1": 1}[self.psi_kind]
        if len(domain) != expected_ndim:
            raise ShapeMismatchError(f"{self.psi_kind} needs a {expected_ndim}D domain, got shape {domain}")
        decompositions = [self.decomposition]
        if self.schedule is not None:
            decompositions += [self.schedule.initial, self.schedule.final]
        for dec in decompositions:
            if dec.shape != domain:
                raise ShapeMismatchError(f"Decomposition of shape {dec.shape} does not match domain {domain}")

        if self.weights is not None:
            if self.psi_kind != "l1":
                raise InvalidInputError("Weights apply to the l1 penalty only")
            if self.weights.shape != domain:
                raise ShapeMismatchError(f"Weights of shape {self.weights.shape} do not match domain {domain}")
        if self.stripe is not None and not self.is_tv:
            raise InvalidInputError("Stripe restriction applies to TV problems only")

        # Coercivity for TV: T must not annihilate constants
        if self.is_tv and not np.any(self.operator.apply(np.ones(domain))):
            raise CoercivityError("The operator annihilates constants (all-zero mask); J is not coercive")

    @classmethod
    def build(
        cls,
        operator: LinearMap,
        datum: np.ndarray,
        alpha: float,
        psi_kind: str,
        decomposition: Optional[SubspaceDecomposition] = None,
        weights: Optional[WeightVector] = None,
        schedule: Optional[SwitchSchedule] = None,
        stripe: Optional[StripeSpec] = None,
        rescale: bool = True,
        target: Optional[float] = None,
        seed: Optional[int] = None,
    ) -> "SolveProblem":
        """
        Create a problem from raw (T, g, alpha), rescaling to ||T|| < 1 unless told not to.

        The scaled problem uses (T/c, g/c, alpha/c^2), which has the same
        minimizers as the original one.
        """
        if not np.isfinite(alpha) or alpha < 0:
            raise InvalidInputError(f"alpha must be finite and nonnegative, got {alpha}")
        scale = 1.0
        if rescale:
            operator, datum, scale = rescale_problem(operator, datum, target=target, seed=seed)
        if decomposition is None:
            domain = operator.domain_shape
            decomposition = make_index_split(domain[0], 1) if psi_kind == "l1" else make_stripes(domain, 1)
        return cls(
            operator=operator,
            datum=datum,
            alpha=alpha / scale**2,
            psi_kind=psi_kind,
            decomposition=decomposition,
            weights=weights,
            schedule=schedule,
            stripe=stripe,
            scale=scale,
        )

    @property
    def is_tv(self) -> bool:
        return self.psi_kind.startswith("tv")

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.operator.domain_shape

    @property
    def original_alpha(self) -> float:
        return self.alpha * self.scale**2

    def with_decomposition(self, decomposition: SubspaceDecomposition, schedule=None) -> "SolveProblem":
        return dataclasses.replace(self, decomposition=decomposition, schedule=schedule)

    def make_penalty(self, chambolle: Optional[ChambolleConfig] = None, warm_start: bool = True) -> Penalty:
        if self.is_tv:
            return TVPenalty(chambolle, warm_start)
        return L1Penalty(self.weights)


def _inner_tuple(value: Union[int, Sequence[int]]) -> Tuple[int, ...]:
    if isinstance(value, (int, np.integer)):
        return (int(value),)
    return tuple(int(v) for v in value)


@dataclass
class SolverConfig:
    """Iteration budgets and tolerances of the outer and inner loops"""

    inner_iters: Tuple[int, ...] = field(default_factory=lambda: (SOLVER_CONFIG["inner_tv"],))
    outer_tol: float = field(default_factory=lambda: SOLVER_CONFIG["outer_tol"])
    max_outer: int = field(default_factory=lambda: SOLVER_CONFIG["max_outer"])
    eta_max_iters: int = field(default_factory=lambda: ETA_CONFIG["max_iters_tv"])
    eta_rel_tol: float = field(default_factory=lambda: ETA_CONFIG["rel_tol"])
    eta_guard: float = field(default_factory=lambda: ETA_CONFIG["guard"])
    chambolle: ChambolleConfig = field(default_factory=ChambolleConfig)
    monotone_slack: float = field(default_factory=lambda: SOLVER_CONFIG["monotone_slack"])
    max_workers: int = field(default_factory=lambda: PARALLEL_CONFIG["max_workers"])
    parallel: bool = False
    use_splitting: bool = False
    warm_start: bool = True

    def __post_init__(self):
        self.inner_iters = _inner_tuple(self.inner_iters)
        if not self.inner_iters or min(self.inner_iters) < 1:
            raise InvalidInputError(f"Inner iteration counts must be >= 1, got {self.inner_iters}")
        if self.outer_tol < 0:
            raise InvalidInputError(f"outer_tol must be nonnegative, got {self.outer_tol}")
        if self.max_outer < 1:
            raise InvalidInputError(f"max_outer must be >= 1, got {self.max_outer}")
        if self.eta_max_iters < 1:
            raise InvalidInputError(f"eta_max_iters must be >= 1, got {self.eta_max_iters}")
        if self.max_workers < 1:
            raise InvalidInputError(f"max_workers must be >= 1, got {self.max_workers}")

    @classmethod
    def from_config(cls, psi_kind: str, **overrides) -> "SolverConfig":
        """Defaults from SOLVER_CONFIG / ETA_CONFIG for the given penalty, then overrides"""
        tv = psi_kind.startswith("tv")
        cfg = cls(
            inner_iters=(SOLVER_CONFIG["inner_tv"] if tv else SOLVER_CONFIG["inner_l1"],),
            eta_max_iters=ETA_CONFIG["max_iters_tv"] if tv else ETA_CONFIG["max_iters_l1"],
        )
        return dataclasses.replace(cfg, **overrides) if overrides else cfg

    def inner_for(self, i: int) -> int:
        """Inner iteration count of subspace i; a single value applies to all"""
        if len(self.inner_iters) == 1:
            return self.inner_iters[0]
        if i >= len(self.inner_iters):
            raise InvalidInputError(
                f"{len(self.inner_iters)} inner iteration counts given for subspace index {i}"
            )
        return self.inner_iters[i]

    @property
    def eta_options(self) -> Dict[str, float]:
        return {"max_iters": self.eta_max_iters, "rel_tol": self.eta_rel_tol, "guard": self.eta_guard}


class EnergyTrace:
    """Per outer iteration: n, J(u^n), ||u^n - u^(n-1)|| and elapsed seconds"""

    COLUMNS = ["iter", "energy", "increment", "seconds"]

    def __init__(self, timing: bool = True):
        self.timing = timing
        self._rows: List[Tuple[int, float, float, float]] = []
        self._start = time.perf_counter()

    def record(self, n: int, energy: float, increment: float) -> None:
        seconds = time.perf_counter() - self._start if self.timing else 0.0
        self._rows.append((int(n), float(energy), float(increment), float(seconds)))

    def __len__(self) -> int:
        return len(self._rows)

    @property
    def energies(self) -> np.ndarray:
        return np.array([row[1] for row in self._rows])

    @property
    def increments(self) -> np.ndarray:
        return np.array([row[2] for row in self._rows])

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self._rows, columns=self.COLUMNS)

    def to_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(path, index=False, float_format="%.17g")
        logger.bind(component="trace").debug(f"Wrote {len(self)} trace rows to {path}")
        return path


@dataclass
class SolveResult:
    """Minimizer estimate, energy trace and why the iteration stopped"""

    u: np.ndarray
    trace: EnergyTrace
    reason: str
    warnings: List[str] = field(default_factory=list)
    energy_increases: int = 0

    @property
    def final_energy(self) -> float:
        return float(self.trace.energies[-1])

    @property
    def outer_iterations(self) -> int:
        return len(self.trace) - 1

    def summary(self) -> Dict[str, object]:
        return {
            "reason": self.reason,
            "outer_iterations": self.outer_iterations,
            "final_energy": self.final_energy,
            "final_increment": float(self.trace.increments[-1]),
            "energy_increases": self.energy_increases,
            "warnings": list(self.warnings),
        }
