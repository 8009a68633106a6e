"""Switching between two decompositions after a fixed number of outer iterations"""
from dataclasses import dataclass

from src.errors import DecompositionError
from src.decomp.subspaces import SubspaceDecomposition


@dataclass(frozen=True)
class SwitchSchedule:
    """Use `initial` for outer iterations 0..switch_after-1, then `final`"""

    switch_after: int
    initial: SubspaceDecomposition
    final: SubspaceDecomposition

    def __post_init__(self):
        if self.switch_after < 0:
            raise DecompositionError(f"switch_after must be >= 0, got {self.switch_after}")
        if self.initial.shape != self.final.shape:
            raise DecompositionError(
                f"Scheduled decompositions disagree on shape: {self.initial.shape} vs {self.final.shape}"
            )

    def decomposition_for(self, outer_iter: int) -> SubspaceDecomposition:
        return self.initial if outer_iter < self.switch_after else self.final


def schedule_kind(schedule: SwitchSchedule, outer_iter: int) -> str:
    """Label of the decomposition active at the given (0-based) outer iteration"""
    return schedule.decomposition_for(outer_iter).label
