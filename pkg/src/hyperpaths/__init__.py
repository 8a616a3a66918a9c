"""Lipschitz paths and quasigeodesics in finite-subset hyperspaces."""

__version__ = "0.1.0"

from .hyperspace import FiniteSubset, canonicalize, hausdorff_distance  # noqa: E402
from .metric import (  # noqa: E402
    EuclideanSpace,
    GroundSpace,
    ScaledQuasiconvex,
    TaxicabCross,
    WeightedGraph,
    space_from_config,
)

__all__ = [
    "EuclideanSpace",
    "FiniteSubset",
    "GroundSpace",
    "ScaledQuasiconvex",
    "TaxicabCross",
    "WeightedGraph",
    "canonicalize",
    "hausdorff_distance",
    "space_from_config",
]
