"""Subspace decompositions: stripes for TV, orthogonal splittings for l1"""
from src.decomp.schedule import SwitchSchedule, schedule_kind
from src.decomp.subspaces import (
    SubspaceDecomposition,
    make_index_split,
    make_random_orthogonal,
    make_stripes,
    make_svd_q,
)

__all__ = [
    "SubspaceDecomposition",
    "SwitchSchedule",
    "make_index_split",
    "make_random_orthogonal",
    "make_stripes",
    "make_svd_q",
    "schedule_kind",
]
