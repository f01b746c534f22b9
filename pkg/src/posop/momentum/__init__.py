"""Finite-difference realization of the massless operators on momentum grids."""
from .eigen import (
    PositionProfile, SphericalGrid, eigenfunction_residual, position_space_transform,
    radial_eigenfunction_check, radial_solution, regularized_eigenfunction, rk4,
)
from .grid import GaussianSpec, GridSpec, Wavepacket, ball_mass_fraction, cube_mass_fraction, make_gaussian
from .operators import OperatorId, apply_operator, composed_q, partial
from .studies import (
    ResidualReport, ccr_residual_study, commutator_residual_study, fit_order, hermiticity_defect,
    realization_residual_study, refinement_grids,
)
from .uncertainty import (
    AnisotropyLadder, UncertaintyReport, anisotropy_ladder, anisotropy_split, expectation_tensor,
    uncertainty_report,
)

__all__ = [
    "AnisotropyLadder", "GaussianSpec", "GridSpec", "OperatorId", "PositionProfile", "ResidualReport",
    "SphericalGrid", "UncertaintyReport", "Wavepacket", "anisotropy_ladder", "anisotropy_split",
    "apply_operator", "ball_mass_fraction", "ccr_residual_study", "commutator_residual_study",
    "composed_q", "cube_mass_fraction", "eigenfunction_residual", "expectation_tensor", "fit_order",
    "hermiticity_defect", "make_gaussian", "partial", "position_space_transform",
    "radial_eigenfunction_check", "radial_solution", "realization_residual_study",
    "refinement_grids", "regularized_eigenfunction", "rk4", "uncertainty_report",
]
