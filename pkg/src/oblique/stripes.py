"""
Stripe restriction of the eta fixed point for TV stripe decompositions.

eta lives in the complement of the active stripe and is concentrated near the
interfaces, so the fixed point is computed on narrow bands of rows
[interface - h, interface + h) only, with Neumann edges on each band, and
zero-extended to the full grid.
"""
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from src.config import STRIPE_CONFIG
from src.decomp.subspaces import SubspaceDecomposition
from src.errors import InvalidInputError
from src.oblique.eta import AlphaMap, EtaState, eta_fixed_point

log = logger.bind(component="oblique")


@dataclass(frozen=True)
class StripeSpec:
    """Half-width (in pixels) of the band kept on each side of an interface"""

    half_width: int = field(default_factory=lambda: STRIPE_CONFIG["half_width"])

    def __post_init__(self):
        if self.half_width < 1:
            raise InvalidInputError(f"Stripe half-width must be >= 1, got {self.half_width}")
        low, high = STRIPE_CONFIG["recommended_min"], STRIPE_CONFIG["recommended_max"]
        if not low <= self.half_width <= high:
            log.warning(f"Stripe half-width {self.half_width} is outside the usual range {low}-{high}")


@dataclass(frozen=True)
class StripePiece:
    """
    One band of rows [start, stop) around the interfaces of a subspace.

    Rows [own_start, own_stop) belong to the subspace itself; the multiplier
    vanishes there.
    """

    start: int
    stop: int
    own_start: int
    own_stop: int

    @property
    def height(self) -> int:
        return self.stop - self.start

    def take(self, array: np.ndarray) -> np.ndarray:
        return np.array(array[self.start:self.stop], dtype=float)

    def complement(self, local: np.ndarray) -> np.ndarray:
        out = np.array(local, dtype=float)
        out[self.own_start - self.start:self.own_stop - self.start] = 0.0
        return out


def _clip(lo: int, hi: int, floor: int, ceiling: int, interface: int) -> Tuple[int, int]:
    clipped = (max(lo, floor), min(hi, ceiling))
    if clipped != (lo, hi):
        log.warning(
            f"Stripe [{lo}, {hi}) around interface {interface} clipped to {clipped} by the subdomains"
        )
    return clipped


def restrict_to_stripe(
    decomposition: SubspaceDecomposition, i: int, spec: StripeSpec
) -> List[StripePiece]:
    """
    Bands on which the eta fixed point of subspace i is computed.

    Each interface of block i contributes [interface - h, interface + h),
    clipped to the two blocks it separates; overlapping bands are merged.
    A single-block decomposition has no interfaces and yields no bands.
    """
    if not decomposition.kind.startswith("stripes"):
        raise InvalidInputError(f"Stripe restriction needs a stripe decomposition, got {decomposition.kind}")
    if not 0 <= i < decomposition.count:
        raise InvalidInputError(f"Subspace index {i} out of range for {decomposition.count} subspaces")

    h = spec.half_width
    blocks = decomposition.blocks
    start, stop = blocks[i]
    bands = []
    for k, interface in enumerate(decomposition.interfaces):
        # interface k separates blocks k and k + 1
        if interface in (start, stop):
            floor, ceiling = blocks[k][0], blocks[k + 1][1]
            bands.append(_clip(interface - h, interface + h, floor, ceiling, interface))

    merged: List[List[int]] = []
    for lo, hi in sorted(bands):
        if merged and lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])

    return [
        StripePiece(lo, hi, max(lo, start), min(hi, stop))
        for lo, hi in merged
    ]


def extend_from_stripes(
    shape: Sequence[int], pieces: Sequence[StripePiece], local: Sequence[np.ndarray]
) -> np.ndarray:
    """Zero-extend band-local arrays to the full grid"""
    full = np.zeros(tuple(shape))
    for piece, values in zip(pieces, local):
        full[piece.start:piece.stop] = values
    return full


def restricted_eta(
    z: np.ndarray,
    u2: np.ndarray,
    alpha: float,
    pieces: Sequence[StripePiece],
    projector_for: Callable[[int], AlphaMap],
    warm_start: Optional[np.ndarray] = None,
    **eta_options,
) -> EtaState:
    """
    Run eta_fixed_point on every band and zero-extend the multipliers.

    `projector_for(k)` returns the P_{alpha K} evaluator for band k, computed
    on the band grid alone.
    """
    z = np.asarray(z, dtype=float)
    if not pieces:
        return EtaState.zero(z.shape)

    states = []
    for k, piece in enumerate(pieces):
        warm = piece.take(warm_start) if warm_start is not None else None
        state = eta_fixed_point(
            piece.take(z),
            piece.take(u2),
            alpha,
            projector_for(k),
            piece.complement,
            warm_start=warm,
            **eta_options,
        )
        states.append(state)
        if state.diverged:
            break

    eta = extend_from_stripes(z.shape, pieces[:len(states)], [s.eta for s in states])
    return EtaState(
        eta,
        iters_used=max(s.iters_used for s in states),
        diverged=any(s.diverged for s in states),
        converged=all(s.converged for s in states),
        increment=max(s.increment for s in states),
    )
