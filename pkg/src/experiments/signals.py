"""Seeded synthetic experiments: 1D interface signals, a 2D inpainting image and Gaussian l1 data"""
import math
from pathlib import Path
from typing import Dict, Optional, Tuple

import numpy as np
from loguru import logger

from src.config import EXPERIMENT_CONFIG, OPERATOR_CONFIG, OUTPUT_DIR
from src.errors import InvalidInputError
from src.experiments.formats import write_image, write_matrix, write_signal

log = logger.bind(component="experiments")

EXPERIMENT_KINDS = ("gaussian-l1", "step-1d", "ramp-1d", "tent-1d", "image-2d-synthetic")
SIGNAL_KINDS = ("step-1d", "ramp-1d", "tent-1d")
PEAK = 2.0


def interface_node(n: int) -> int:
    """Last node of the first half, ceil(N/2) in 1-based indexing"""
    return math.ceil(n / 2) - 1


def step_signal(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """0 up to the interface node, 1 after it; fully observed"""
    if n < 4:
        raise InvalidInputError(f"Signal length must be >= 4, got {n}")
    g = np.zeros(n)
    g[interface_node(n) + 1:] = 1.0
    return g, np.ones(n)


def tent_signal(n: int, gap: int) -> Tuple[np.ndarray, np.ndarray]:
    """Symmetric tent peaking at the interface node; the gap hides |i - s| <= gap"""
    s = interface_node(n)
    if not 0 < gap < min(s, n - 1 - s):
        raise InvalidInputError(f"Gap half-width {gap} does not fit a signal of length {n}")
    slope = PEAK / math.ceil(n / 2)
    index = np.arange(n)
    g = PEAK - slope * np.abs(index - s)
    mask = (np.abs(index - s) > gap).astype(float)
    return g, mask


def ramp_signal(n: int, gap: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Asymmetric tent: steep on the left, four times flatter on the right.

    The gap is placed so that its two observed edge values coincide.
    """
    s = interface_node(n)
    left = max(gap // 2 - 1, 1)
    right = 4 * (left + 1) - 1
    if s - left < 1 or s + right > n - 2:
        raise InvalidInputError(f"Gap half-width {gap} does not fit a signal of length {n}")
    slope = PEAK / math.ceil(n / 2)
    index = np.arange(n)
    g = np.where(index <= s, PEAK - slope * (s - index), PEAK - slope / 4 * (index - s))
    mask = ((index < s - left) | (index > s + right)).astype(float)
    return g, mask


def signal_experiment(kind: str, n: Optional[int] = None, gap: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """(signal, mask) of one of the 1D families"""
    n = EXPERIMENT_CONFIG["signal_length"] if n is None else n
    gap = EXPERIMENT_CONFIG["gap_half_width"] if gap is None else gap
    if kind == "step-1d":
        return step_signal(n)
    if kind == "ramp-1d":
        return ramp_signal(n, gap)
    if kind == "tent-1d":
        return tent_signal(n, gap)
    raise InvalidInputError(f"Unknown signal kind {kind!r}; expected one of {SIGNAL_KINDS}")


def synthetic_image(
    size: Optional[int] = None, seed: Optional[int] = None, noise: Optional[float] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Piecewise constant image with a disc and a vertical edge, both crossing
    the middle row interface, plus seeded Gaussian noise; the mask hides a
    rectangle straddling that interface.
    """
    size = EXPERIMENT_CONFIG["image_size"] if size is None else size
    seed = OPERATOR_CONFIG["seed"] if seed is None else seed
    noise = EXPERIMENT_CONFIG["image_noise"] if noise is None else noise
    if size < 16:
        raise InvalidInputError(f"Image size must be >= 16, got {size}")

    rng = np.random.default_rng(seed)
    interface = math.ceil(size / 2)
    rows, cols = np.mgrid[0:size, 0:size]

    image = np.full((size, size), 0.2)
    image[cols >= (11 * size) // 16] = 0.6
    disc = (rows - interface) ** 2 + (cols - size // 3) ** 2 <= (size // 6) ** 2
    image[disc] = 0.8
    image = image + noise * rng.standard_normal(image.shape)

    mask = np.ones((size, size))
    band = size // 10
    mask[interface - band:interface + band, size // 5:(4 * size) // 5] = 0.0
    return image, mask


def gaussian_l1(
    rows: Optional[int] = None,
    cols: Optional[int] = None,
    sparsity: Optional[int] = None,
    noise: Optional[float] = None,
    seed: Optional[int] = None,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gaussian operator, sparse ground truth and noisy datum"""
    rows = EXPERIMENT_CONFIG["l1_rows"] if rows is None else rows
    cols = EXPERIMENT_CONFIG["l1_cols"] if cols is None else cols
    sparsity = EXPERIMENT_CONFIG["l1_sparsity"] if sparsity is None else sparsity
    noise = EXPERIMENT_CONFIG["l1_noise"] if noise is None else noise
    seed = OPERATOR_CONFIG["seed"] if seed is None else seed
    if not 0 <= sparsity <= cols:
        raise InvalidInputError(f"Sparsity {sparsity} must lie in [0, {cols}]")

    rng = np.random.default_rng(seed)
    matrix = rng.standard_normal((rows, cols))
    truth = np.zeros(cols)
    support = rng.choice(cols, size=sparsity, replace=False)
    truth[support] = rng.standard_normal(sparsity) + np.sign(rng.standard_normal(sparsity))
    datum = matrix @ truth + noise * rng.standard_normal(rows)
    return matrix, truth, datum


def generate_experiment(
    kind: str,
    seed: Optional[int] = None,
    out_dir: Optional[Path] = None,
    **sizes,
) -> Dict[str, Path]:
    """
    Write the input files of an experiment.

    Args:
        kind: gaussian-l1 | step-1d | ramp-1d | tent-1d | image-2d-synthetic
        seed: Generator seed (random kinds only)
        out_dir: Target directory (default OUTPUT_DIR)
        **sizes: n, gap, size, rows, cols, sparsity, noise

    Returns:
        Mapping of role (operator, datum, truth, signal, mask, image, preview) to path
    """
    out_dir = Path(out_dir or OUTPUT_DIR)
    written: Dict[str, Path] = {}

    if kind == "gaussian-l1":
        matrix, truth, datum = gaussian_l1(
            sizes.get("rows"), sizes.get("cols"), sizes.get("sparsity"), sizes.get("noise"), seed
        )
        written["operator"] = write_matrix(out_dir / f"{kind}_operator.csv", matrix)
        written["datum"] = write_signal(out_dir / f"{kind}_datum.csv", datum)
        written["truth"] = write_signal(out_dir / f"{kind}_truth.csv", truth)
    elif kind in SIGNAL_KINDS:
        g, mask = signal_experiment(kind, sizes.get("n"), sizes.get("gap"))
        written["signal"] = write_signal(out_dir / f"{kind}_signal.csv", g)
        written["mask"] = write_signal(out_dir / f"{kind}_mask.csv", mask)
    elif kind == "image-2d-synthetic":
        image, mask = synthetic_image(sizes.get("size"), seed, sizes.get("noise"))
        written["image"] = write_image(out_dir / f"{kind}_image.csv", image)
        written["preview"] = write_image(out_dir / f"{kind}_image.pgm", image)
        written["mask"] = write_image(out_dir / f"{kind}_mask.pgm", mask)
    else:
        raise InvalidInputError(f"Unknown experiment kind {kind!r}; expected one of {EXPERIMENT_KINDS}")

    log.info(f"Generated {kind} (seed {seed}) into {out_dir}: {', '.join(sorted(written))}")
    return written
