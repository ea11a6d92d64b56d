"""Hyperspherical-energy coreset selection."""

from ._core import (
    MhealError,
    boundary_partition,
    energy,
    match_losses,
    maxmin_select,
    normalize,
    run_algorithm1,
    run_mheal,
    select_subset,
    spherical_kmeans,
    theta,
)

__all__ = [
    "MhealError",
    "boundary_partition",
    "energy",
    "match_losses",
    "maxmin_select",
    "normalize",
    "run_algorithm1",
    "run_mheal",
    "select_subset",
    "spherical_kmeans",
    "theta",
]
