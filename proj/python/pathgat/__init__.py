"""Pathway-structured graph attention for gene expression forecasting."""

from ._pathgat import (  # noqa: F401
    DataError,
    DivergenceError,
    LocoReport,
    PathwayConfig,
    ShapeError,
    SignedInteractionMatrix,
    SignReport,
    SimConfig,
    Trajectory,
    discover,
    generate_dataset,
    run_loco,
    simulate,
    trajectories_from_csv,
    trajectories_to_csv,
)

__all__ = [
    "DataError",
    "DivergenceError",
    "LocoReport",
    "PathwayConfig",
    "ShapeError",
    "SignedInteractionMatrix",
    "SignReport",
    "SimConfig",
    "Trajectory",
    "discover",
    "generate_dataset",
    "run_loco",
    "simulate",
    "trajectories_from_csv",
    "trajectories_to_csv",
]
