"""Oblique thresholding and the multiplier eta in the complementary subspace"""
from src.oblique.eta import EtaState, eta_fixed_point, oblique_threshold
from src.oblique.stripes import (
    StripePiece,
    StripeSpec,
    extend_from_stripes,
    restrict_to_stripe,
    restricted_eta,
)

__all__ = [
    "EtaState",
    "StripePiece",
    "StripeSpec",
    "eta_fixed_point",
    "extend_from_stripes",
    "oblique_threshold",
    "restrict_to_stripe",
    "restricted_eta",
]
