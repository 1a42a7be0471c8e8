"""Bound audits: each inequality becomes a BoundReport with explicit
lhs/rhs samples or an empirical constant plus stability evidence."""

from .context import AuditContext
from .eigenvalue import audit_eigenvalue_lower, eigenvalue_growth_constant
from .gaussian import (
    SamplePlan,
    audit_davies,
    audit_gaussian_lower,
    audit_gaussian_upper,
    audit_kernel_single_center,
    default_sample_plan,
    pick_volume_strategy,
)
from .geometry_bounds import (
    audit_cross_center,
    audit_doubling,
    audit_laplacian_comparison,
    audit_volume_comparison,
)
from .liyau import (
    LiYauParams,
    audit_j_interval,
    audit_li_yau,
    j_lower_bound,
    li_yau_potential,
    radial_gradient,
    solve_j_function,
)
from .mass import audit_stochastic_completeness
from .parabolic import (
    CylinderSpec,
    audit_harnack,
    audit_mean_value,
    harnack_constant,
    kernel_solutions,
    mean_value_constant,
)
from .poincare_sobolev import (
    audit_poincare,
    audit_sobolev,
    poincare_empirical_constant,
    sobolev_empirical_constant,
)
from .report import (
    BoundReport,
    EXPLICIT_TOL,
    STABILITY_FACTOR,
    empirical_report,
    explicit_report,
    pair_samples,
    vacuous_report,
)

__all__ = [
    "AuditContext",
    "BoundReport",
    "EXPLICIT_TOL",
    "STABILITY_FACTOR",
    "SamplePlan",
    "CylinderSpec",
    "LiYauParams",
    "audit_laplacian_comparison",
    "audit_volume_comparison",
    "audit_doubling",
    "audit_cross_center",
    "audit_poincare",
    "audit_sobolev",
    "audit_mean_value",
    "audit_harnack",
    "audit_gaussian_upper",
    "audit_gaussian_lower",
    "audit_kernel_single_center",
    "audit_davies",
    "audit_eigenvalue_lower",
    "audit_j_interval",
    "audit_li_yau",
    "audit_stochastic_completeness",
    "eigenvalue_growth_constant",
    "poincare_empirical_constant",
    "sobolev_empirical_constant",
    "harnack_constant",
    "mean_value_constant",
    "kernel_solutions",
    "default_sample_plan",
    "pick_volume_strategy",
    "solve_j_function",
    "j_lower_bound",
    "li_yau_potential",
    "radial_gradient",
    "explicit_report",
    "empirical_report",
    "vacuous_report",
    "pair_samples",
]
