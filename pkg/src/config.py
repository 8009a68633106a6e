"""Configuration management for the subspace correction solvers"""
import os
from pathlib import Path
from typing import Optional, Sequence
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


def _sanitize_env_value(value: Optional[str], placeholders: Optional[Sequence[str]] = None) -> Optional[str]:
    """Normalize env values, treating blanks or placeholders as unset."""
    if value is None:
        return None
    cleaned = value.strip()
    if not cleaned:
        return None

    # Remove inline comments that start with '#'
    if "#" in cleaned:
        hash_index = cleaned.find("#")
        if hash_index == 0:
            return None
        cleaned = cleaned[:hash_index].rstrip()

    if not cleaned:
        return None
    if placeholders:
        lowered = cleaned.lower()
        for placeholder in placeholders:
            if lowered == placeholder.lower():
                return None
    return cleaned


def _get_env(
    name: str,
    default: Optional[str] = None,
    placeholders: Optional[Sequence[str]] = None,
) -> Optional[str]:
    value = _sanitize_env_value(os.getenv(name), placeholders)
    if value is None:
        return _sanitize_env_value(default, placeholders)
    return value


def _get_float(name: str, default: float) -> float:
    value = _get_env(name, placeholders=["auto", "default"])
    return float(value) if value is not None else default


def _get_int(name: str, default: int) -> int:
    value = _get_env(name, placeholders=["auto", "default"])
    return int(value) if value is not None else default


# Base paths
BASE_DIR = Path(__file__).parent.parent
DATA_DIR = Path(_get_env("SUBCORR_DATA_DIR", str(BASE_DIR / "data")))
LOGS_DIR = Path(_get_env("SUBCORR_LOGS_DIR", str(BASE_DIR / "logs")))
OUTPUT_DIR = Path(_get_env("SUBCORR_OUTPUT_DIR", str(DATA_DIR / "output")))


def ensure_directories() -> None:
    """Create the data, log and output directories if missing"""
    for directory in (DATA_DIR, LOGS_DIR, OUTPUT_DIR):
        directory.mkdir(parents=True, exist_ok=True)


# Operator norm estimation and rescaling (||T|| < 1)
OPERATOR_CONFIG = {
    "norm_tol": _get_float("SUBCORR_NORM_TOL", 1e-6),
    "norm_max_iters": _get_int("SUBCORR_NORM_MAX_ITERS", 1000),
    "rescale_target": _get_float("SUBCORR_RESCALE_TARGET", 0.9),
    "seed": _get_int("SUBCORR_SEED", 0),
}

# Chambolle dual projection
CHAMBOLLE_CONFIG = {
    "tau": _get_float("SUBCORR_TAU", 0.25),
    "tol": _get_float("SUBCORR_TOL_PROJECTION", 1e-3),
    "max_iters": _get_int("SUBCORR_CHAMBOLLE_MAX_ITERS", 2000),
}

# Oblique thresholding multiplier (eta) fixed point
ETA_CONFIG = {
    "max_iters_tv": _get_int("SUBCORR_ETA_ITERS_TV", 10),
    "max_iters_l1": _get_int("SUBCORR_ETA_ITERS_L1", 20),
    "rel_tol": _get_float("SUBCORR_ETA_TOL", 1e-4),
    "guard": _get_float("SUBCORR_ETA_GUARD", 1e6),
}

# Stripe restriction around subdomain interfaces (pixels)
STRIPE_CONFIG = {
    "half_width": _get_int("SUBCORR_STRIPE", 10),
    "recommended_min": 6,
    "recommended_max": 20,
}

# Outer / inner iteration budgets
SOLVER_CONFIG = {
    "inner_tv": _get_int("SUBCORR_INNER_TV", 5),
    "inner_l1": _get_int("SUBCORR_INNER_L1", 30),
    "outer_tol": _get_float("SUBCORR_TOL_OUTER", 1e-10),
    "max_outer": _get_int("SUBCORR_MAX_OUTER", 500),
    "monotone_slack": _get_float("SUBCORR_MONOTONE_SLACK", 1e-12),
}

# Worker pool for the parallel solver
PARALLEL_CONFIG = {
    "max_workers": _get_int("SUBCORR_THREADS", os.cpu_count() or 1),
}

# Synthetic experiments
EXPERIMENT_CONFIG = {
    "signal_length": _get_int("SUBCORR_SIGNAL_LENGTH", 200),
    "gap_half_width": 10,
    "image_size": _get_int("SUBCORR_IMAGE_SIZE", 64),
    "image_noise": 0.02,
    "l1_rows": 200,
    "l1_cols": 40,
    "l1_sparsity": 5,
    "l1_noise": 0.01,
}

# Logging Configuration
LOG_CONFIG = {
    "level": os.getenv("LOG_LEVEL", "INFO"),
    "file": os.getenv("LOG_FILE", str(LOGS_DIR / "subcorr.log")),
    "rotation": "50 MB",
    "retention": "30 days",
}
