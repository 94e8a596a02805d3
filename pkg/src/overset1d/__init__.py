"""Entropy-stable overset-grid coupling for 1D conservation laws."""

from overset1d.coupling import PenaltyConfig
from overset1d.geometry import (
    GridField,
    InterpolationOperator,
    OversetGeometry1D,
    build_grids,
)
from overset1d.spatial import BoundaryCondition, OversetRHS, single_domain_rhs
from overset1d.systems import (
    AdmissibilityError,
    Burgers,
    ConservationLawSystem,
    Euler,
    ShallowWater,
    make_system,
)
from overset1d.timeint import IntegratorConfig, advance

__all__ = [
    "AdmissibilityError",
    "BoundaryCondition",
    "Burgers",
    "ConservationLawSystem",
    "Euler",
    "GridField",
    "IntegratorConfig",
    "InterpolationOperator",
    "OversetGeometry1D",
    "OversetRHS",
    "PenaltyConfig",
    "ShallowWater",
    "advance",
    "build_grids",
    "make_system",
    "single_domain_rhs",
]
