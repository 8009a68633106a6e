"""
Subspace decompositions V_1, ..., V_N of the solution space.

Every decomposition is described by contiguous index blocks along the first
axis and, for orthogonal splittings, a square orthogonal matrix Q whose column
block Q_i spans V_i (pi_{V_i} = Q_i Q_i^*). Without Q the blocks are
coordinate blocks: 1D intervals, 2D row bands or an index split of a vector.
"""
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger
from tenacity import retry, retry_if_exception_type, stop_after_attempt

from src.config import OPERATOR_CONFIG
from src.errors import DecompositionError, InvalidInputError, ShapeMismatchError
from src.operators import LinearMap
from src.operators.maps import DenseMap

log = logger.bind(component="decomp")

KINDS = ("stripes-1d", "stripes-2d", "index-split", "orthogonal")
DEFAULT_LABELS = {
    "stripes-1d": "stripes",
    "stripes-2d": "stripes",
    "index-split": "identity",
    "orthogonal": "orthogonal",
}
ORTHOGONALITY_TOL = 1e-10


@dataclass(frozen=True)
class SubspaceDecomposition:
    """
    N mutually orthogonal subspaces given by index blocks and an optional Q.

    Attributes:
        kind: stripes-1d | stripes-2d | index-split | orthogonal
        shape: Grid shape of the functions being decomposed
        blocks: Half-open ranges (start, stop) along axis 0, partitioning it
        q: Orthogonal matrix for the orthogonal kind, else None
        label: CLI name of the construction (stripes, identity, random-orthogonal, svd)
    """

    kind: str
    shape: Tuple[int, ...]
    blocks: Tuple[Tuple[int, int], ...]
    q: Optional[np.ndarray] = None
    label: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DecompositionError(f"Unknown decomposition kind {self.kind!r}")
        object.__setattr__(self, "shape", tuple(int(n) for n in self.shape))
        object.__setattr__(self, "blocks", tuple((int(a), int(b)) for a, b in self.blocks))

        expected = 0
        for start, stop in self.blocks:
            if start != expected or stop <= start:
                raise DecompositionError(
                    f"Blocks {self.blocks} do not partition 0..{self.shape[0]} into nonempty ranges"
                )
            expected = stop
        if not self.blocks or expected != self.shape[0]:
            raise DecompositionError(f"Blocks {self.blocks} do not cover 0..{self.shape[0]}")

        if self.kind == "orthogonal":
            if self.q is None:
                raise DecompositionError("Orthogonal decomposition requires a matrix Q")
            q = np.array(self.q, dtype=float)
            if len(self.shape) != 1 or q.shape != (self.shape[0], self.shape[0]):
                raise DecompositionError(
                    f"Q of shape {q.shape} does not match a vector space of shape {self.shape}"
                )
            defect = float(np.max(np.abs(q.T @ q - np.eye(q.shape[0]))))
            if defect > ORTHOGONALITY_TOL:
                raise DecompositionError(f"Q is not orthogonal: max |Q*Q - I| = {defect:.3g}")
            q.setflags(write=False)
            object.__setattr__(self, "q", q)
        elif self.q is not None:
            raise DecompositionError(f"Kind {self.kind!r} does not take a matrix Q")

        if not self.label:
            object.__setattr__(self, "label", DEFAULT_LABELS[self.kind])

    @property
    def count(self) -> int:
        return len(self.blocks)

    @property
    def interfaces(self) -> Tuple[int, ...]:
        """First index of every block after the first"""
        return tuple(start for start, _ in self.blocks[1:])

    def _check(self, i: int, u: np.ndarray) -> np.ndarray:
        if not 0 <= i < self.count:
            raise InvalidInputError(f"Subspace index {i} out of range for {self.count} subspaces")
        u = np.asarray(u, dtype=float)
        if u.shape != self.shape:
            raise ShapeMismatchError(f"Decomposition of shape {self.shape} got a function of shape {u.shape}")
        return u

    def project(self, i: int, u: np.ndarray) -> np.ndarray:
        """Orthogonal projection pi_{V_i} u"""
        u = self._check(i, u)
        start, stop = self.blocks[i]
        if self.q is None:
            out = np.zeros_like(u)
            out[start:stop] = u[start:stop]
            return out
        basis = self.q[:, start:stop]
        return basis @ (basis.T @ u)

    def complement(self, i: int, u: np.ndarray) -> np.ndarray:
        """Projection onto the sum of all subspaces other than V_i"""
        u = self._check(i, u)
        if self.q is None:
            out = u.copy()
            start, stop = self.blocks[i]
            out[start:stop] = 0.0
            return out
        return u - self.project(i, u)

    def describe(self) -> str:
        sizes = ",".join(str(stop - start) for start, stop in self.blocks)
        return f"{self.label} ({self.kind}, {self.count} subspaces of sizes {sizes})"


def _dims(dims: Union[int, Sequence[int]]) -> Tuple[int, ...]:
    if isinstance(dims, (int, np.integer)):
        return (int(dims),)
    return tuple(int(n) for n in dims)


def _equal_blocks(n: int, count: int) -> Tuple[Tuple[int, int], ...]:
    """Blocks of size n // count; the last block takes the remainder"""
    if count < 1:
        raise DecompositionError(f"Number of subspaces must be >= 1, got {count}")
    if count > n:
        raise DecompositionError(f"Cannot split dimension {n} into {count} nonempty blocks")
    size = n // count
    edges = [k * size for k in range(count)] + [n]
    return tuple(zip(edges[:-1], edges[1:]))


def make_stripes(dims: Union[int, Sequence[int]], count: int) -> SubspaceDecomposition:
    """
    Contiguous intervals (1D) or row bands (2D) of height s = ceil(N / count).

    The last block absorbs the remainder. When s-high stripes would leave
    the last block empty (e.g. N=5, count=4) the heights are balanced
    instead, differing by at most one row.
    """
    shape = _dims(dims)
    if len(shape) not in (1, 2):
        raise DecompositionError(f"Stripes need a 1D or 2D grid, got shape {shape}")
    n = shape[0]
    if count < 1:
        raise DecompositionError(f"Number of subspaces must be >= 1, got {count}")
    if count > n:
        raise DecompositionError(f"Cannot cut {n} rows into {count} stripes")

    size = math.ceil(n / count)
    if (count - 1) * size < n:
        edges = [k * size for k in range(count)] + [n]
    else:
        base, extra = divmod(n, count)
        edges = [0]
        for k in range(count):
            edges.append(edges[-1] + base + (1 if k < extra else 0))
        log.debug(f"Stripes of height {size} would leave a block empty for N={n}; using balanced heights")

    kind = "stripes-1d" if len(shape) == 1 else "stripes-2d"
    return SubspaceDecomposition(kind, shape, tuple(zip(edges[:-1], edges[1:])), label="stripes")


def make_index_split(dim: int, count: int) -> SubspaceDecomposition:
    """Q = I: disjoint coordinate blocks of a vector"""
    return SubspaceDecomposition("index-split", (dim,), _equal_blocks(int(dim), count), label="identity")


def _modified_gram_schmidt(matrix: np.ndarray) -> np.ndarray:
    q = np.array(matrix, dtype=float)
    for j in range(q.shape[1]):
        column_norm = np.linalg.norm(matrix[:, j])
        for k in range(j):
            q[:, j] -= (q[:, k] @ q[:, j]) * q[:, k]
        norm = np.linalg.norm(q[:, j])
        if norm <= 1e-10 * max(column_norm, 1.0):
            raise DecompositionError(f"Random draw is rank deficient at column {j}")
        q[:, j] /= norm
    return q


def make_random_orthogonal(dim: int, count: int, seed: Optional[int] = None) -> SubspaceDecomposition:
    """
    Q from modified Gram-Schmidt on a seeded Gaussian matrix, with equal blocks.

    Rank-deficient draws are redrawn from the same generator, up to 5 attempts.
    """
    seed = OPERATOR_CONFIG["seed"] if seed is None else seed
    blocks = _equal_blocks(int(dim), count)
    rng = np.random.default_rng(seed)

    @retry(
        stop=stop_after_attempt(5),
        retry=retry_if_exception_type(DecompositionError),
        reraise=True,
    )
    def draw() -> np.ndarray:
        return _modified_gram_schmidt(rng.standard_normal((dim, dim)))

    q = draw()
    log.debug(f"Random orthogonal Q of dimension {dim} (seed {seed})")
    return SubspaceDecomposition("orthogonal", (dim,), blocks, q=q, label="random-orthogonal")


def make_svd_q(linear_map: LinearMap, count: int) -> SubspaceDecomposition:
    """Q = V from T = U D V*, columns ordered by descending singular value"""
    if not isinstance(linear_map, DenseMap):
        raise DecompositionError(f"SVD splitting needs a dense operator, got {linear_map.kind}")
    try:
        _, singular_values, vt = np.linalg.svd(linear_map.matrix, full_matrices=True)
    except np.linalg.LinAlgError as e:
        raise DecompositionError(f"SVD of the operator failed: {e}") from e

    dim = linear_map.domain_shape[0]
    log.debug(
        f"SVD splitting: sigma_max={singular_values[0]:.6g}, sigma_min={singular_values[-1]:.6g}"
    )
    return SubspaceDecomposition("orthogonal", (dim,), _equal_blocks(dim, count), q=vt.T, label="svd")
