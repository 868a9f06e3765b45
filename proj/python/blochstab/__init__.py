"""Python interface to the blochstab C++ core."""

from ._core import (
    ConfigError,
    Ensemble,
    basin,
    bohr_closed,
    bohr_numeric,
    distance,
    geometric_weights,
    integrate,
    lyapunov,
    random_ensemble,
    simulate_config,
    spectrum,
    target_state,
    unit_weights,
    vandermonde_det,
)

__all__ = [
    "ConfigError",
    "Ensemble",
    "basin",
    "bohr_closed",
    "bohr_numeric",
    "distance",
    "geometric_weights",
    "integrate",
    "lyapunov",
    "random_ensemble",
    "simulate_config",
    "spectrum",
    "target_state",
    "unit_weights",
    "vandermonde_det",
]
