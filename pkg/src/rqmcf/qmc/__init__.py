"""Low-discrepancy point sets, their randomizations, and quality checks."""

from .discrepancy import star_discrepancy_exact, star_discrepancy_lower_bound
from .nets import check_lambda_net, check_net_balance, measured_t
from .pointset import DiscrepancyReport, NetParams, PointMeta, PointSet, ScrambleSpec
from .scramble import apply_scramble, cp_rotate, owen_scramble
from .sequences import (
    HALTON_MAX_DIM,
    SOBOL_MAX_DIM,
    halton_points,
    mc_points,
    radical_inverse,
    sobol_points,
)

__all__ = [
    "DiscrepancyReport",
    "HALTON_MAX_DIM",
    "NetParams",
    "PointMeta",
    "PointSet",
    "SOBOL_MAX_DIM",
    "ScrambleSpec",
    "apply_scramble",
    "check_lambda_net",
    "check_net_balance",
    "cp_rotate",
    "halton_points",
    "mc_points",
    "measured_t",
    "owen_scramble",
    "radical_inverse",
    "sobol_points",
    "star_discrepancy_exact",
    "star_discrepancy_lower_bound",
]
