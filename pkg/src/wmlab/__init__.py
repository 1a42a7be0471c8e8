"""wmlab: numerical audits of heat-kernel and spectral bounds on
weighted rotationally symmetric model manifolds.

The package discretizes the weighted radial Laplacian on pole caps,
intervals, and circles, computes spectra and heat kernels, evaluates the
closed-form comparison bounds, and checks each inequality numerically on
catalog models and randomized densities.

Layers, bottom up:

    geometry     manifolds, curvature diagonals, admissible parameters
    comparison   closed-form comparison profiles and volume bounds
    operators    staggered-grid operators, boundary conditions, spectra
    heat         spectral kernels and implicit time stepping
    catalog      named reference models with sharp default parameters
    audits       one auditor per inequality, emitting BoundReport rows
    scenario     config-file driven runs and CSV/JSON result bundles
    fuzz         randomized densities inside a prescribed variation band
    cli          wmlab command line front end
"""

from .errors import AuditError, ConfigError, ParameterError, SolverError
from .geometry import (
    ConstProfile,
    CurvatureParams,
    Domain,
    EuclideanWarp,
    ExprProfile,
    FourierProfile,
    HyperbolicWarp,
    ModelManifold,
    PerturbedWarp,
    PolyProfile,
    RadialProfile,
    ScaledWarp,
    SphereWarp,
    SplineProfile,
    UnitWarp,
    curvature_constant_c,
    density_band,
    k_epsilon,
    k_epsilon_ball,
    radial_curvatures,
    sobolev_exponent_nu,
    sphere_area,
    validate_eps_range,
)
from .comparison import (
    ComparisonProfile,
    bg_integral,
    comparison_s,
    comparison_s_prime,
    cross_center_ratio_bound,
    doubling_bound,
    laplacian_comparison_pair,
    positive_cap,
    same_center_ratio_bound,
    volume_ratio_bound,
)
from .operators import (
    ModeOperator,
    RadialGrid,
    Spectrum,
    build_grid,
    build_operator,
    full_spectrum,
    mode_multiplicity,
    mode_spectrum,
)
from .heat import (
    HeatSolution,
    SpectralKernel,
    davies_double_integral,
    heat_kernel_spectral,
    solve_heat,
)
from .catalog import CATALOG_TAGS, catalog_manifold, catalog_params, catalog_scenario
from .audits import AuditContext, BoundReport

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "ParameterError",
    "ConfigError",
    "SolverError",
    "AuditError",
    # geometry
    "RadialProfile",
    "ConstProfile",
    "PolyProfile",
    "FourierProfile",
    "ExprProfile",
    "SplineProfile",
    "EuclideanWarp",
    "SphereWarp",
    "HyperbolicWarp",
    "UnitWarp",
    "ScaledWarp",
    "PerturbedWarp",
    "Domain",
    "ModelManifold",
    "CurvatureParams",
    "sphere_area",
    "validate_eps_range",
    "curvature_constant_c",
    "sobolev_exponent_nu",
    "radial_curvatures",
    "k_epsilon",
    "k_epsilon_ball",
    "density_band",
    # comparison
    "comparison_s",
    "comparison_s_prime",
    "ComparisonProfile",
    "bg_integral",
    "positive_cap",
    "volume_ratio_bound",
    "same_center_ratio_bound",
    "doubling_bound",
    "cross_center_ratio_bound",
    "laplacian_comparison_pair",
    # operators
    "RadialGrid",
    "ModeOperator",
    "Spectrum",
    "build_grid",
    "build_operator",
    "mode_spectrum",
    "full_spectrum",
    "mode_multiplicity",
    # heat
    "SpectralKernel",
    "heat_kernel_spectral",
    "HeatSolution",
    "solve_heat",
    "davies_double_integral",
    # catalog
    "CATALOG_TAGS",
    "catalog_manifold",
    "catalog_params",
    "catalog_scenario",
    # audits
    "AuditContext",
    "BoundReport",
]
