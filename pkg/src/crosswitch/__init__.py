"""Analysis of planar piecewise-smooth vector fields switched across the
cross {x1*x2 = 0}: switching-set decomposition, sliding dynamics, return
maps, local classification at the origin, model families and trajectory
integration.
"""
from __future__ import annotations

from .classify import (
    CLASS_C1,
    CLASS_C2,
    CLASS_C31,
    CLASS_C32,
    CLASS_DPE,
    CLASS_HIGHER,
    CLASS_PH,
    CLASS_RF,
    CODIM1_CLASSES,
    SIGN_KEYS,
    STABLE_CLASSES,
    Classification,
    UnfoldingVerification,
    VerifyCheck,
    all_sign_tuples,
    classify,
    normal_form,
    unfolding,
    validate_signs,
    verify_unfolding,
)
from .errors import (
    CrosswitchError,
    DegenerateInput,
    EtaUndefined,
    EvaluationOutsideDomain,
    InvalidSigns,
    LeftDomain,
    NonFiniteCoefficients,
    NotTransient,
    NotTransverse,
    ParseError,
    PredictionMismatch,
    StepLimit,
    TooManyTangencies,
)
from .fields import (
    FieldSpec,
    PiecewiseSystem,
    Poly1,
    Poly2,
    Region,
    branch_point,
    constant_field,
    make_system,
    region_of,
    system_from_obj,
    system_to_obj,
)
from .flow import (
    Event,
    EventKind,
    Mode,
    PseudoCycle,
    Trajectory,
    detect_pseudo_cycle,
    integrate,
    phase_portrait,
)
from .returnmap import (
    FixedPoint,
    HalfMapCoeffs,
    ReturnMapModel,
    alpha_value,
    eta_coefficient,
    fixed_points,
    gamma_value,
    half_map_coeffs,
    is_transient,
    numeric_return_map,
    return_map_model,
)
from .switching import (
    Arc,
    ArcKind,
    PseudoEquilibrium,
    SigmaDecomposition,
    SlidingField,
    TangencyPoint,
    Visibility,
    band_tolerance,
    branch_point_class,
    find_tangencies,
    fold_visibility,
    pseudo_equilibria,
    sigma_decomposition,
    sliding_field,
)

__version__ = "0.1.0"

__all__ = [
    "Arc",
    "ArcKind",
    "CLASS_C1",
    "CLASS_C2",
    "CLASS_C31",
    "CLASS_C32",
    "CLASS_DPE",
    "CLASS_HIGHER",
    "CLASS_PH",
    "CLASS_RF",
    "CODIM1_CLASSES",
    "Classification",
    "CrosswitchError",
    "DegenerateInput",
    "EtaUndefined",
    "EvaluationOutsideDomain",
    "Event",
    "EventKind",
    "FieldSpec",
    "FixedPoint",
    "HalfMapCoeffs",
    "InvalidSigns",
    "LeftDomain",
    "Mode",
    "NonFiniteCoefficients",
    "NotTransient",
    "NotTransverse",
    "ParseError",
    "PiecewiseSystem",
    "Poly1",
    "Poly2",
    "PredictionMismatch",
    "PseudoCycle",
    "PseudoEquilibrium",
    "Region",
    "ReturnMapModel",
    "SIGN_KEYS",
    "STABLE_CLASSES",
    "SigmaDecomposition",
    "SlidingField",
    "StepLimit",
    "TangencyPoint",
    "TooManyTangencies",
    "Trajectory",
    "UnfoldingVerification",
    "VerifyCheck",
    "Visibility",
    "all_sign_tuples",
    "alpha_value",
    "band_tolerance",
    "branch_point",
    "branch_point_class",
    "classify",
    "constant_field",
    "detect_pseudo_cycle",
    "eta_coefficient",
    "find_tangencies",
    "fixed_points",
    "fold_visibility",
    "gamma_value",
    "half_map_coeffs",
    "integrate",
    "is_transient",
    "make_system",
    "normal_form",
    "numeric_return_map",
    "phase_portrait",
    "pseudo_equilibria",
    "region_of",
    "return_map_model",
    "sigma_decomposition",
    "sliding_field",
    "system_from_obj",
    "system_to_obj",
    "unfolding",
    "validate_signs",
    "verify_unfolding",
    "__version__",
]
