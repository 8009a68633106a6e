"""
File formats for signals, images, masks and matrices.

Signals are one value per line; images and matrices are header-free CSV
rows, all written with 17 significant digits so they re-read bit-exactly.
Images with a `.pgm` suffix use ASCII PGM (P2, maxval 255) instead.
"""
import json
from pathlib import Path
from typing import Dict, Union

import numpy as np
import pandas as pd

from src.errors import InvalidInputError

PathLike = Union[str, Path]
FLOAT_FORMAT = "%.17g"
PGM_MAXVAL = 255


def _prepare(path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _read_table(path: PathLike) -> np.ndarray:
    frame = pd.read_csv(path, header=None, float_precision="round_trip")
    return frame.to_numpy(dtype=float)


def write_signal(path: PathLike, values: np.ndarray) -> Path:
    values = np.asarray(values, dtype=float)
    if values.ndim != 1:
        raise InvalidInputError(f"Signals are 1D, got shape {values.shape}")
    path = _prepare(path)
    pd.Series(values).to_csv(path, header=False, index=False, float_format=FLOAT_FORMAT)
    return path


def read_signal(path: PathLike) -> np.ndarray:
    table = _read_table(path)
    if table.shape[1] != 1:
        raise InvalidInputError(f"{path}: expected one value per line, found {table.shape[1]} columns")
    return table[:, 0]


def write_matrix(path: PathLike, matrix: np.ndarray) -> Path:
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2:
        raise InvalidInputError(f"Matrices are 2D, got shape {matrix.shape}")
    path = _prepare(path)
    pd.DataFrame(matrix).to_csv(path, header=False, index=False, float_format=FLOAT_FORMAT)
    return path


def read_matrix(path: PathLike) -> np.ndarray:
    return _read_table(path)


def _write_pgm(path: Path, image: np.ndarray) -> None:
    levels = np.rint(np.clip(image, 0.0, 1.0) * PGM_MAXVAL).astype(int)
    rows, cols = levels.shape
    lines = ["P2", f"{cols} {rows}", str(PGM_MAXVAL)]
    lines += [" ".join(str(v) for v in row) for row in levels]
    path.write_text("\n".join(lines) + "\n")


def _read_pgm(path: Path) -> np.ndarray:
    tokens = []
    for line in path.read_text().splitlines():
        tokens.extend(line.split("#", 1)[0].split())
    if len(tokens) < 4 or tokens[0] != "P2":
        raise InvalidInputError(f"{path}: not an ASCII PGM (P2) file")
    try:
        cols, rows, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
        values = np.array([int(t) for t in tokens[4:]], dtype=float)
    except ValueError as e:
        raise InvalidInputError(f"{path}: malformed PGM data: {e}") from e
    if maxval <= 0 or values.size != rows * cols:
        raise InvalidInputError(f"{path}: expected {rows}x{cols} pixels with maxval > 0, got {values.size}")
    return values.reshape(rows, cols) / maxval


def write_image(path: PathLike, image: np.ndarray) -> Path:
    """CSV rows of floats, or PGM (values clipped to [0, 1]) for a .pgm suffix"""
    image = np.asarray(image, dtype=float)
    if image.ndim != 2:
        raise InvalidInputError(f"Images are 2D, got shape {image.shape}")
    path = _prepare(path)
    if path.suffix.lower() == ".pgm":
        _write_pgm(path, image)
    else:
        pd.DataFrame(image).to_csv(path, header=False, index=False, float_format=FLOAT_FORMAT)
    return path


def read_image(path: PathLike) -> np.ndarray:
    path = Path(path)
    if path.suffix.lower() == ".pgm":
        return _read_pgm(path)
    return _read_table(path)


def read_mask(path: PathLike) -> np.ndarray:
    """Read a 0/1 mask from any signal or image format (PGM 255 reads as 1)"""
    path = Path(path)
    values = read_image(path)
    if values.shape[1] == 1 and path.suffix.lower() != ".pgm":
        values = values[:, 0]
    rounded = np.rint(values)
    if not np.all(np.isin(rounded, (0.0, 1.0))) or np.max(np.abs(values - rounded), initial=0.0) > 1e-9:
        raise InvalidInputError(f"{path}: mask values must be 0 or 1")
    return rounded


def write_summary(path: PathLike, summary: Dict[str, object]) -> Path:
    path = _prepare(path)
    path.write_text(json.dumps(summary, indent=2, sort_keys=True, default=str) + "\n")
    return path
