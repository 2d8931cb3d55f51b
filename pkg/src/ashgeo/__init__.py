"""Ashtekar variables on coordinate charts.

Symbolic 3-metrics with exact differentiation, the induced vector product,
Levi-Civita and deformed covariant derivatives, Weingarten maps of a 3+1
split, local connection forms with their SU(2) lifts, and FRW closed-form
oracles.  The `ashgeo` CLI drives batch evaluation, the identity suites,
and holonomy integration from one json config.
"""

from .ashtekar import (
    BarberoImmirzi,
    CurvatureOp,
    LieFormField,
    LocalLieForm,
    PhysicsComponents,
    ashtekar_deriv,
    ashtekar_form_field,
    curvature_A,
    local_form,
    physics_components,
    reconstruct_W,
    torsion_A,
)
from .config import RunConfig, load_config, load_config_file, parse_beta
from .errors import (
    AshgeoError,
    ComputationError,
    ConfigError,
    DegenerateMetricError,
    EvalDomainError,
    ExprParseError,
    NonOrthonormalFrameError,
    OutOfDomainError,
)
from .expr import Expr, parse
from .frw import FrwModel, frw_oracles, make_frw, preset
from .geometry import (
    Chart,
    DensitizedTriad,
    Frame,
    SliceMetric,
    SpacetimeSplit,
    densitize,
    induce_slice_metric,
    metric_from_frame,
    orthonormal_frame,
    orthonormal_frame_field,
    reconstruct_frame,
)
from .hypersurface import (
    EndoField,
    second_fundamental_form,
    weingarten,
    weingarten_endo,
)
from .levi_civita import VecField, cov_deriv, cov_deriv_field, lie_bracket, riemann
from .sampling import SplitMix64
from .spin import (
    PathSpec,
    adjoint_map,
    covering_map,
    holonomy,
    lambda_star,
    lift_connection,
)
from .suites import SuiteResult, run_suite, run_suites, suite_names
from .vecprod import inner, ivp, ivp_field, ivp_hodge

__version__ = "0.1.0"

__all__ = [
    "AshgeoError",
    "BarberoImmirzi",
    "Chart",
    "ComputationError",
    "ConfigError",
    "CurvatureOp",
    "DegenerateMetricError",
    "DensitizedTriad",
    "EndoField",
    "EvalDomainError",
    "Expr",
    "ExprParseError",
    "Frame",
    "FrwModel",
    "LieFormField",
    "LocalLieForm",
    "NonOrthonormalFrameError",
    "OutOfDomainError",
    "PathSpec",
    "PhysicsComponents",
    "RunConfig",
    "SliceMetric",
    "SpacetimeSplit",
    "SplitMix64",
    "SuiteResult",
    "VecField",
    "adjoint_map",
    "ashtekar_deriv",
    "ashtekar_form_field",
    "cov_deriv",
    "cov_deriv_field",
    "covering_map",
    "curvature_A",
    "densitize",
    "frw_oracles",
    "holonomy",
    "induce_slice_metric",
    "inner",
    "ivp",
    "ivp_field",
    "ivp_hodge",
    "lambda_star",
    "lie_bracket",
    "lift_connection",
    "load_config",
    "load_config_file",
    "local_form",
    "make_frw",
    "metric_from_frame",
    "orthonormal_frame",
    "orthonormal_frame_field",
    "parse",
    "parse_beta",
    "physics_components",
    "preset",
    "reconstruct_W",
    "reconstruct_frame",
    "riemann",
    "run_suite",
    "run_suites",
    "second_fundamental_form",
    "suite_names",
    "torsion_A",
    "weingarten",
    "weingarten_endo",
]
