"""Numerical laboratory for graphical translating solitons over
isoparametric foliations of the round sphere.

The profile of such a soliton solves a second-order ODE in the foliation
level r; this package integrates it, bounds it, classifies the resulting
shapes into the seven listed types, and cross-checks everything against
the ambient PDE and the defining identities of the foliations.
"""

from .catalog import (
    ADMISSIBLE_K,
    EQUAL_MULTIPLICITY_K,
    SolitonParams,
    alpha,
    beta,
    make_params,
    params_from_dict,
    params_from_json,
    params_to_dict,
    params_to_json,
)
from .classifier import (
    DEFAULT_CROSSING_TOL,
    ROMANS,
    UNLISTED,
    DomainReport,
    Evidence,
    ShapeType,
    SweepEntry,
    SweepResult,
    classification_report,
    classify,
    domain_report,
    grid_seeds,
    shape_to_dict,
    sweep,
    sweep_to_dict,
    type_correspondence,
)
from .integrator import (
    BLOWUP_MINUS,
    BLOWUP_PLUS,
    BUDGET_EXHAUSTED,
    CROSSING_ETA,
    CROSSING_ZERO,
    REGULAR_ENDPOINT,
    Crossing,
    HalfTrace,
    IntegratorConfig,
    SelfConvergenceReport,
    StepStats,
    TerminationEvent,
    Trace,
    endpoint_seed,
    endpoint_vprime_extrapolated,
    endpoint_vprime_limit,
    euler_walk,
    event_to_dict,
    integrate_from,
    maximal_trace,
    psi_at,
    psi_interpolant,
    rk4_walk,
    self_convergence,
    trace_deviation,
    trace_to_csv,
    trace_to_json,
)
from .phase import (
    GuideCurves,
    PhasePoint,
    blowup_bound,
    bound_h1,
    bound_h2,
    bound_h2hat,
    bound_h3,
    eta,
    guide_curves,
    mirror_params,
    psi_rhs,
    sign_region,
    vprime_rhs,
    zeta,
)
from .verify import (
    AMBIENT_EUCLIDEAN,
    AMBIENT_SPHERE,
    ISO_K1,
    ISO_K2,
    GraphSample,
    IdentityReport,
    IsoparametricFn,
    ResidualReport,
    general_ode_residual,
    graph_from_trace,
    grim_reaper,
    iso_poly,
    iso_poly_grad,
    iso_poly_lap,
    iso_value,
    isoparametric_identities,
    level_of_theta,
    level_set_param,
    ode_residual_at,
    soliton_residual,
    sphere_points_in_band,
    theta_of_level,
)

__version__ = "0.1.0"

__all__ = [
    "ADMISSIBLE_K",
    "AMBIENT_EUCLIDEAN",
    "AMBIENT_SPHERE",
    "BLOWUP_MINUS",
    "BLOWUP_PLUS",
    "BUDGET_EXHAUSTED",
    "CROSSING_ETA",
    "CROSSING_ZERO",
    "DEFAULT_CROSSING_TOL",
    "DomainReport",
    "EQUAL_MULTIPLICITY_K",
    "Evidence",
    "Crossing",
    "GraphSample",
    "GuideCurves",
    "HalfTrace",
    "ISO_K1",
    "ISO_K2",
    "IdentityReport",
    "IntegratorConfig",
    "IsoparametricFn",
    "PhasePoint",
    "REGULAR_ENDPOINT",
    "ROMANS",
    "ResidualReport",
    "SelfConvergenceReport",
    "ShapeType",
    "SolitonParams",
    "StepStats",
    "SweepEntry",
    "SweepResult",
    "TerminationEvent",
    "Trace",
    "UNLISTED",
    "alpha",
    "beta",
    "blowup_bound",
    "bound_h1",
    "bound_h2",
    "bound_h2hat",
    "bound_h3",
    "classification_report",
    "classify",
    "domain_report",
    "endpoint_seed",
    "endpoint_vprime_extrapolated",
    "endpoint_vprime_limit",
    "eta",
    "euler_walk",
    "event_to_dict",
    "general_ode_residual",
    "graph_from_trace",
    "grid_seeds",
    "grim_reaper",
    "guide_curves",
    "integrate_from",
    "iso_poly",
    "iso_poly_grad",
    "iso_poly_lap",
    "iso_value",
    "isoparametric_identities",
    "level_of_theta",
    "level_set_param",
    "make_params",
    "maximal_trace",
    "mirror_params",
    "ode_residual_at",
    "params_from_dict",
    "params_from_json",
    "params_to_dict",
    "params_to_json",
    "psi_at",
    "psi_interpolant",
    "psi_rhs",
    "rk4_walk",
    "self_convergence",
    "shape_to_dict",
    "sign_region",
    "soliton_residual",
    "sphere_points_in_band",
    "sweep",
    "sweep_to_dict",
    "trace_deviation",
    "trace_to_csv",
    "trace_to_json",
    "type_correspondence",
    "vprime_rhs",
    "zeta",
]
