"""Discrete exterior calculus on uniform grids and the fluid/field examples built on it."""

from .calculus import (
    contraction,
    exterior_derivative,
    fiber_integrate,
    gradient,
    integrate_top,
    partial,
    pullback_projection,
    translate,
    wedge,
)
from .fluid import (
    abc_clebsch_triple,
    abc_velocity,
    classical_clebsch_field,
    clebsch_report,
    clebsch_residual,
    generalized_clebsch_residual,
    helicity,
    hopf_field,
    liouville_class,
)
from .grid import DiscreteFormField, Grid, SectionGrid, VectorFieldGrid, multi_indices
from .hat import (
    TotalSpaceForm,
    curvature_momentum,
    gauge_momentum_pushforward,
    hat_product_eval,
    hat_symplectic_eval,
    quantomorphism_momentum,
)

__all__ = [
    "DiscreteFormField",
    "Grid",
    "SectionGrid",
    "TotalSpaceForm",
    "VectorFieldGrid",
    "abc_clebsch_triple",
    "abc_velocity",
    "classical_clebsch_field",
    "clebsch_report",
    "clebsch_residual",
    "contraction",
    "curvature_momentum",
    "exterior_derivative",
    "fiber_integrate",
    "gauge_momentum_pushforward",
    "generalized_clebsch_residual",
    "gradient",
    "hat_product_eval",
    "hat_symplectic_eval",
    "helicity",
    "hopf_field",
    "integrate_top",
    "liouville_class",
    "multi_indices",
    "partial",
    "pullback_projection",
    "quantomorphism_momentum",
    "translate",
    "wedge",
]
