"""Null controls and sentinel checks for a coupled KdV cascade."""
from ._hskdv import (
    ConfigError,
    ConvergenceError,
    NumericError,
    canonical_config,
    config_hash,
    control_linear,
    duality_defect,
    run,
    simulate,
    subcommands,
    weight_gap,
)

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "NumericError",
    "canonical_config",
    "config_hash",
    "control_linear",
    "duality_defect",
    "run",
    "simulate",
    "subcommands",
    "weight_gap",
]
