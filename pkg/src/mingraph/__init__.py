"""Numerical laboratory for the minimal graph equation on model manifolds."""

from .manifold import (
    CurvatureProfile,
    JacobiSolution,
    ProfileError,
    grad_theta_bound,
    laplacian_r,
    solve_jacobi,
    verify_laplacian_bound,
)
from .young import (
    BridgeDensity,
    FamilyError,
    PhiFunction,
    PowerDensity,
    Primitive,
    YoungPair,
    build_G1_F1,
    build_density,
    build_phi,
    dump_table,
    g1_identity_log_gap,
    lambert_w,
    young_from_density,
)
from .pde import (
    BoundaryData,
    DiscreteField,
    PdeError,
    PolarGrid,
    RadialProfile,
    assemble,
    comparison_check,
    radial_oracle,
    residual,
    solve_dirichlet,
)

from .asymptotic import (
    AsymptoticError,
    ExhaustionReport,
    RadiusRecord,
    ScenarioVerdict,
    attainment_metric,
    caccioppoli_check,
    classify,
    decay_check,
    dimension_gate,
    moser_ratio,
    phi_integral,
    rhs_budget,
    run_exhaustion,
    select_nu,
)

__version__ = "0.1.0"

__all__ = [
    "CurvatureProfile",
    "JacobiSolution",
    "ProfileError",
    "grad_theta_bound",
    "laplacian_r",
    "solve_jacobi",
    "verify_laplacian_bound",
    "BridgeDensity",
    "FamilyError",
    "PhiFunction",
    "PowerDensity",
    "Primitive",
    "YoungPair",
    "build_G1_F1",
    "build_density",
    "build_phi",
    "dump_table",
    "g1_identity_log_gap",
    "lambert_w",
    "young_from_density",
    "BoundaryData",
    "DiscreteField",
    "PdeError",
    "PolarGrid",
    "RadialProfile",
    "assemble",
    "comparison_check",
    "radial_oracle",
    "residual",
    "solve_dirichlet",
    "AsymptoticError",
    "ExhaustionReport",
    "RadiusRecord",
    "ScenarioVerdict",
    "attainment_metric",
    "caccioppoli_check",
    "classify",
    "decay_check",
    "dimension_gate",
    "moser_ratio",
    "phi_integral",
    "rhs_budget",
    "run_exhaustion",
    "select_nu",
    "__version__",
]
