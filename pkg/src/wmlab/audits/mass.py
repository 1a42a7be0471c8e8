"""Conservation audit: total kernel mass against the sandwich

    Dirichlet-truncated mass  <=  true mass  <=  1.

The truncated masses are computed with absorbing conditions at growing
cut radii; each must stay below 1 and they must not decrease in R.
"""

from __future__ import annotations

import numpy as np

from ..heat import dirichlet_mass_profile
from .context import AuditContext
from .report import BoundReport, explicit_report, pair_samples

__all__ = ["audit_stochastic_completeness"]


def audit_stochastic_completeness(ctx: AuditContext, R_list=None,
                                  t: float = 1.0, M: int | None = None) -> BoundReport:
    man = ctx.manifold
    if R_list is None:
        if man.domain.kind == "pole_cap":
            top = man.domain.r_max
        else:
            top = 0.5 * man.domain.length
        R_list = [f * top for f in (0.3, 0.5, 0.7, 0.9)]
    if M is None:
        M = max(ctx.M, 1024)
    radii, masses = dirichlet_mass_profile(man, R_list, t, M=M, center=ctx.audit_center)

    # monotone rows compare -(mass increment) against an absolute noise
    # floor so rounding-level wiggles do not fail the audit
    lhs = list(masses) + list(np.diff(masses) * -1.0)
    rhs = [1.0] * len(masses) + [1e-10] * (len(masses) - 1)
    labels = [f"R={R:.4g}" for R in radii] + [
        f"monotone:{radii[i]:.4g}->{radii[i+1]:.4g}" for i in range(len(radii) - 1)
    ]
    rep = explicit_report(
        "kernel-mass-sandwich", ctx.scenario, pair_samples(lhs, rhs, labels),
        notes={"t": t, "final_mass": float(masses[-1])},
    )
    rep.empirical_constant = float(masses[-1])
    return rep
