"""Synthetic experiment data, file formats and the acceleration study"""
from src.experiments.formats import (
    read_image,
    read_mask,
    read_matrix,
    read_signal,
    write_image,
    write_matrix,
    write_signal,
    write_summary,
)
from src.experiments.signals import (
    EXPERIMENT_KINDS,
    SIGNAL_KINDS,
    gaussian_l1,
    generate_experiment,
    interface_node,
    ramp_signal,
    signal_experiment,
    step_signal,
    synthetic_image,
    tent_signal,
)
from src.experiments.studies import energy_at, run_acceleration_study

__all__ = [
    "EXPERIMENT_KINDS",
    "SIGNAL_KINDS",
    "energy_at",
    "gaussian_l1",
    "generate_experiment",
    "interface_node",
    "ramp_signal",
    "read_image",
    "read_mask",
    "read_matrix",
    "read_signal",
    "run_acceleration_study",
    "signal_experiment",
    "step_signal",
    "synthetic_image",
    "tent_signal",
    "write_image",
    "write_matrix",
    "write_signal",
    "write_summary",
]
