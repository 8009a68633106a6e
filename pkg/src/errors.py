"""Exception hierarchy shared by all solver components"""


class SubcorrError(Exception):
    """Base exception for subspace correction errors"""
    pass


class InvalidInputError(SubcorrError, ValueError):
    """Raised when inputs violate a documented precondition"""
    pass


class ShapeMismatchError(InvalidInputError):
    """Raised when array shapes do not match an operator or decomposition"""
    pass


class CoercivityError(InvalidInputError):
    """Raised when the energy is not coercive (e.g. an all-zero inpainting mask)"""
    pass


class DecompositionError(InvalidInputError):
    """Raised when a subspace decomposition cannot be constructed"""
    pass


class EtaDivergenceError(SubcorrError):
    """Raised when no multiplier eta exists in the complementary subspace"""

    def __init__(self, message: str, subspace: int = -1, norm: float = float("nan")):
        super().__init__(message)
        self.subspace = subspace
        self.norm = norm
