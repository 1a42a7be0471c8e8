"""Eigenvalue growth audit: lambda_k against (k+1)^{2c/(c+1)} / d^2.

Eigenvalues are counted with angular multiplicity.  The flat form
applies when the curvature scale vanishes; otherwise the bound carries
an exp(sqrt(K_eps) d) factor whose (b/a) power is unspecified in closed
form and is set to 1 (recorded in the notes).
"""

from __future__ import annotations

import math

import numpy as np

from ..comparison import sat_exp
from ..errors import SolverError
from .context import AuditContext
from .report import BoundReport, empirical_report

__all__ = ["audit_eigenvalue_lower", "eigenvalue_growth_constant"]


def _counted_spectrum(ctx: AuditContext, k_max: int) -> np.ndarray:
    """First k_max + 1 counted eigenvalues, raising l_max until the
    completeness threshold clears the request."""
    k_per = min(k_max + 2, ctx.M)
    if ctx.manifold.domain.kind != "pole_cap":
        return ctx.spectrum(l_max=0, k_per_mode=k_per).counted_values(k_max + 1)
    l_max = 6
    while True:
        spec = ctx.spectrum(l_max=l_max, k_per_mode=k_per)
        try:
            return spec.counted_values(k_max + 1)
        except SolverError:
            if l_max >= 64:
                raise
            l_max *= 2


def eigenvalue_growth_constant(lam: np.ndarray, c: float, d: float,
                               curvature_rate: float = 0.0):
    """(C_emp, growth slope) for lambda_k >= C (k+1)^{2c/(c+1)} / (d^2 e^{rate}).

    lam holds counted eigenvalues from index 0; the constant scans
    k = 1 .. len(lam)-1 and the slope fits log lambda_k against
    log(k+1) over the top decade of k+1.
    """
    expo = 2.0 * c / (c + 1.0)
    k = np.arange(1, lam.size)
    vals = lam[1:] * d * d * sat_exp(curvature_rate) / (k + 1.0) ** expo
    c_emp = float(np.min(vals))

    kp1 = k + 1.0
    sel = kp1 >= 0.1 * kp1[-1]
    pos = lam[1:] > 0
    fit = sel & pos
    slope = float(np.polyfit(np.log(kp1[fit]), np.log(lam[1:][fit]), 1)[0])
    return c_emp, slope


def audit_eigenvalue_lower(ctx: AuditContext, k_max: int = 60) -> BoundReport:
    p = ctx.params
    d = ctx.diameter
    expo = 2.0 * p.c / (p.c + 1.0)
    K_M = ctx.k_eps_ball(d)
    rate = math.sqrt(K_M) * d
    notes = {"diameter": d, "k_max": k_max, "exponent": expo}
    if K_M > 0:
        notes["curvature_rate"] = rate
        notes["ba_power"] = "set to 1 (no closed form)"

    lam0 = _counted_spectrum(ctx, k_max)
    c0, slope = eigenvalue_growth_constant(lam0, p.c, d, rate)

    fine = ctx.refined()
    lam1 = _counted_spectrum(fine, k_max)
    c1, _ = eigenvalue_growth_constant(lam1, p.c, d, rate)

    slope_ok = slope >= expo - 0.05
    return empirical_report(
        "eigenvalue-growth", ctx.scenario,
        [{"k_max": k_max, "constant": c0}],
        constant=c0,
        refined_constant=c1,
        extra_ok=slope_ok,
        shape_exponents={"growth_slope": slope, "target_exponent": expo},
        notes=notes,
    )
