from .configuration import BlowupRecord, Configuration, Curve
from .model import (
    Branch,
    Policy,
    SingularPoint,
    SurfaceModel,
    branch_index,
    branches,
    contract_to_surface,
    k_dot,
    k_squared,
    k_squared_identity_holds,
    mumford_pullback,
    q_intersection,
    q_self,
    surface_report,
)
from .pairs import (
    Boundary,
    classify_pair,
    coefficient_of,
    exceptional_coefficients,
    is_flush,
    is_level,
    log_pullback,
    log_resolution,
)
from .program import BlowupProgram, BuiltProgram, build, parse_program

__all__ = (
    "BlowupProgram",
    "BlowupRecord",
    "Boundary",
    "Branch",
    "BuiltProgram",
    "Configuration",
    "Curve",
    "Policy",
    "SingularPoint",
    "SurfaceModel",
    "branch_index",
    "branches",
    "build",
    "classify_pair",
    "coefficient_of",
    "contract_to_surface",
    "exceptional_coefficients",
    "is_flush",
    "is_level",
    "k_dot",
    "k_squared",
    "k_squared_identity_holds",
    "log_pullback",
    "log_resolution",
    "mumford_pullback",
    "q_intersection",
    "q_self",
    "parse_program",
    "surface_report",
)
