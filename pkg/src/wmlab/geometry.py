"""Rotationally symmetric weighted model manifolds.

A model is a warped product over a radial coordinate,

    g = dr^2 + f(r)^2 g_{S^{n-1}},     dmu = e^{-phi(r)} dvol_g,

described by a warp profile f, a radial density profile phi, and an
integer dimension n >= 2.  Three domain kinds are supported: a pole cap
[0, R] with f(0) = 0 and f'(0) = 1 (one or two poles), an interval
[r_min, r_max] with f > 0 throughout, and a circle of period L.  The
interval and circle kinds are one-dimensional test beds: their
cross-section measure is normalised to 1 so that the radial measure is
exactly f^{n-1} e^{-phi} dr.

This module evaluates every pointwise geometric quantity the audit layer
consumes: the radial and tangential diagonals of the modified Ricci
tensor with dimension parameter N, the admissibility window for the
shape parameter eps, the constant c and its Sobolev exponent, the
conformal curvature scale K_eps, density bands, and weighted Lp norms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ParameterError

__all__ = [
    "sphere_area",
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
    "validate_eps_range",
    "curvature_constant_c",
    "sobolev_exponent_nu",
    "radial_curvatures",
    "k_epsilon",
    "k_epsilon_ball",
    "density_band",
    "weighted_lp_norm",
    "grad_phi_lp",
]

_POLE_TOL = 1e-8


def sphere_area(n: int) -> float:
    """Area of the unit sphere S^{n-1} in R^n."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


# ---------------------------------------------------------------------------
# radial profiles


class RadialProfile:
    """Scalar profile of the radial coordinate with two derivatives."""

    name = "custom"

    def __call__(self, r):
        raise NotImplementedError

    def deriv(self, r):
        raise NotImplementedError

    def deriv2(self, r):
        raise NotImplementedError

    # Warp-specific ratios.  The generic forms are evaluated directly; the
    # catalog warps override them with globally smooth closed forms so that
    # pole values need no limit handling.
    def shape_ratio(self, r):
        """f''/f."""
        return self.deriv2(r) / self(r)

    def tangent_defect(self, r):
        """(1 - f'^2)/f^2."""
        fp = self.deriv(r)
        f = self(r)
        return (1.0 - fp * fp) / (f * f)


class ConstProfile(RadialProfile):
    name = "const"

    def __init__(self, value: float = 0.0):
        self.value = float(value)

    def __call__(self, r):
        return np.full_like(np.asarray(r, dtype=float), self.value)

    def deriv(self, r):
        return np.zeros_like(np.asarray(r, dtype=float))

    deriv2 = deriv


class PolyProfile(RadialProfile):
    """Polynomial profile; coefficients in increasing-degree order."""

    name = "poly"

    def __init__(self, coeffs):
        self.coeffs = np.asarray(coeffs, dtype=float)
        self._d1 = np.polynomial.polynomial.polyder(self.coeffs)
        self._d2 = np.polynomial.polynomial.polyder(self.coeffs, 2)

    def __call__(self, r):
        return np.polynomial.polynomial.polyval(np.asarray(r, dtype=float), self.coeffs)

    def deriv(self, r):
        return np.polynomial.polynomial.polyval(np.asarray(r, dtype=float), self._d1)

    def deriv2(self, r):
        return np.polynomial.polynomial.polyval(np.asarray(r, dtype=float), self._d2)


class FourierProfile(RadialProfile):
    """Sum of sine terms  sum_j  a_j sin(w_j r + theta_j)."""

    name = "fourier"

    def __init__(self, terms):
        # terms: iterable of (amplitude, angular frequency, phase)
        self.terms = [(float(a), float(w), float(t)) for a, w, t in terms]

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for a, w, t in self.terms:
            out = out + a * np.sin(w * r + t)
        return out

    def deriv(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for a, w, t in self.terms:
            out = out + a * w * np.cos(w * r + t)
        return out

    def deriv2(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for a, w, t in self.terms:
            out = out - a * w * w * np.sin(w * r + t)
        return out


class SumProfile(RadialProfile):
    """Pointwise sum of profiles; derivatives add termwise."""

    name = "sum"

    def __init__(self, *parts):
        self.parts = list(parts)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for part in self.parts:
            out = out + part(r)
        return out

    def deriv(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for part in self.parts:
            out = out + part.deriv(r)
        return out

    def deriv2(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for part in self.parts:
            out = out + part.deriv2(r)
        return out


class ExprProfile(RadialProfile):
    """Closed-form profile given as an expression in the variable r.

    The expression is differentiated symbolically, so the two derivative
    channels are exact rather than finite differences.
    """

    name = "expr"

    def __init__(self, expr: str):
        import sympy as sp

        r = sp.Symbol("r")
        e = sp.sympify(expr)
        self.expr = expr
        self._f = sp.lambdify(r, e, "numpy")
        self._f1 = sp.lambdify(r, sp.diff(e, r), "numpy")
        self._f2 = sp.lambdify(r, sp.diff(e, r, 2), "numpy")

    def _eval(self, fn, r):
        r = np.asarray(r, dtype=float)
        out = fn(r)
        return np.broadcast_to(np.asarray(out, dtype=float), r.shape).copy()

    def __call__(self, r):
        return self._eval(self._f, r)

    def deriv(self, r):
        return self._eval(self._f1, r)

    def deriv2(self, r):
        return self._eval(self._f2, r)


class SplineProfile(RadialProfile):
    """Profile interpolated from samples by a cubic spline."""

    name = "spline"

    def __init__(self, r_samples, values, periodic: bool = False):
        from scipy.interpolate import CubicSpline

        bc = "periodic" if periodic else "not-a-knot"
        self._s = CubicSpline(np.asarray(r_samples, float), np.asarray(values, float), bc_type=bc)
        self._s1 = self._s.derivative(1)
        self._s2 = self._s.derivative(2)

    def __call__(self, r):
        return self._s(np.asarray(r, dtype=float))

    def deriv(self, r):
        return self._s1(np.asarray(r, dtype=float))

    def deriv2(self, r):
        return self._s2(np.asarray(r, dtype=float))


# ---------------------------------------------------------------------------
# warps


class EuclideanWarp(RadialProfile):
    name = "euclidean"

    def __call__(self, r):
        return np.asarray(r, dtype=float).copy()

    def deriv(self, r):
        return np.ones_like(np.asarray(r, dtype=float))

    def deriv2(self, r):
        return np.zeros_like(np.asarray(r, dtype=float))

    def shape_ratio(self, r):
        return np.zeros_like(np.asarray(r, dtype=float))

    def tangent_defect(self, r):
        return np.zeros_like(np.asarray(r, dtype=float))


class SphereWarp(RadialProfile):
    name = "sphere"

    def __call__(self, r):
        return np.sin(np.asarray(r, dtype=float))

    def deriv(self, r):
        return np.cos(np.asarray(r, dtype=float))

    def deriv2(self, r):
        return -np.sin(np.asarray(r, dtype=float))

    def shape_ratio(self, r):
        return np.full_like(np.asarray(r, dtype=float), -1.0)

    def tangent_defect(self, r):
        return np.ones_like(np.asarray(r, dtype=float))


class HyperbolicWarp(RadialProfile):
    name = "hyperbolic"

    def __call__(self, r):
        return np.sinh(np.asarray(r, dtype=float))

    def deriv(self, r):
        return np.cosh(np.asarray(r, dtype=float))

    def deriv2(self, r):
        return np.sinh(np.asarray(r, dtype=float))

    def shape_ratio(self, r):
        return np.ones_like(np.asarray(r, dtype=float))

    def tangent_defect(self, r):
        return np.full_like(np.asarray(r, dtype=float), -1.0)


class UnitWarp(RadialProfile):
    name = "unit"

    def __call__(self, r):
        return np.ones_like(np.asarray(r, dtype=float))

    def deriv(self, r):
        return np.zeros_like(np.asarray(r, dtype=float))

    deriv2 = deriv

    def shape_ratio(self, r):
        return np.zeros_like(np.asarray(r, dtype=float))

    def tangent_defect(self, r):
        return np.ones_like(np.asarray(r, dtype=float))


class ScaledWarp(RadialProfile):
    """Dilated warp  s * f(r/s).

    Dilating a model by s multiplies every eigenvalue by 1/s^2 exactly;
    the curvature ratios scale by the same factor through the closed
    forms below, so dilation tests see no extra discretisation noise.
    """

    name = "scaled"

    def __init__(self, base: RadialProfile, s: float):
        if s <= 0:
            raise ParameterError("dilation factor must be positive")
        self.base = base
        self.s = float(s)

    def __call__(self, r):
        return self.s * self.base(np.asarray(r, dtype=float) / self.s)

    def deriv(self, r):
        return self.base.deriv(np.asarray(r, dtype=float) / self.s)

    def deriv2(self, r):
        return self.base.deriv2(np.asarray(r, dtype=float) / self.s) / self.s

    def shape_ratio(self, r):
        return self.base.shape_ratio(np.asarray(r, dtype=float) / self.s) / self.s**2

    def tangent_defect(self, r):
        return self.base.tangent_defect(np.asarray(r, dtype=float) / self.s) / self.s**2


class PerturbedWarp(RadialProfile):
    """Multiplicative perturbation  f = f0(r) (1 + eta(r)).

    eta = sum_j b_j sin^2(j pi r / L) vanishes to second order at r = 0
    and r = L, so pole slopes are preserved.  Requires sum |b_j| < 1 to
    keep f positive.
    """

    name = "perturbed"

    def __init__(self, base: RadialProfile, coeffs, span: float):
        coeffs = [float(b) for b in coeffs]
        if sum(abs(b) for b in coeffs) >= 1.0:
            raise ParameterError("warp perturbation too large: f may vanish")
        self.base = base
        self.coeffs = coeffs
        self.span = float(span)

    def _eta(self, r):
        r = np.asarray(r, dtype=float)
        e = np.zeros_like(r)
        for j, b in enumerate(self.coeffs, start=1):
            e = e + b * np.sin(j * math.pi * r / self.span) ** 2
        return e

    def _eta1(self, r):
        r = np.asarray(r, dtype=float)
        e = np.zeros_like(r)
        for j, b in enumerate(self.coeffs, start=1):
            w = j * math.pi / self.span
            e = e + b * w * np.sin(2.0 * w * r)
        return e

    def _eta2(self, r):
        r = np.asarray(r, dtype=float)
        e = np.zeros_like(r)
        for j, b in enumerate(self.coeffs, start=1):
            w = j * math.pi / self.span
            e = e + 2.0 * b * w * w * np.cos(2.0 * w * r)
        return e

    def __call__(self, r):
        return self.base(r) * (1.0 + self._eta(r))

    def deriv(self, r):
        return self.base.deriv(r) * (1.0 + self._eta(r)) + self.base(r) * self._eta1(r)

    def deriv2(self, r):
        return (
            self.base.deriv2(r) * (1.0 + self._eta(r))
            + 2.0 * self.base.deriv(r) * self._eta1(r)
            + self.base(r) * self._eta2(r)
        )

    def shape_ratio(self, r):
        # f''/f = f0''/f0 + (2 f0' eta'/f0 + eta'')/(1+eta).  The middle
        # ratio is regular at a pole because eta' vanishes linearly there.
        r = np.asarray(r, dtype=float)
        one = 1.0 + self._eta(r)
        f0 = self.base(r)
        fp0 = self.base.deriv(r)
        e1, e2 = self._eta1(r), self._eta2(r)
        safe = np.where(f0 == 0.0, 1.0, f0)
        mid = np.where(f0 == 0.0, 2.0 * e2, 2.0 * fp0 * e1 / safe)
        return self.base.shape_ratio(r) + (mid + e2) / one

    def tangent_defect(self, r):
        r = np.asarray(r, dtype=float)
        one = 1.0 + self._eta(r)
        eta = self._eta(r)
        f0 = self.base(r)
        fp0 = self.base.deriv(r)
        e1, e2 = self._eta1(r), self._eta2(r)
        safe2 = np.where(f0 == 0.0, 1.0, f0 * f0)
        # (2 eta + eta^2)/f0^2 -> eta''(pole) at a pole (eta ~ r^2/2 eta'')
        q = np.where(f0 == 0.0, e2, (2.0 * eta + eta * eta) / safe2)
        safe = np.where(f0 == 0.0, 1.0, f0)
        mid = np.where(f0 == 0.0, 2.0 * e2, 2.0 * fp0 * e1 / safe)
        return (
            self.base.tangent_defect(r) / (one * one)
            - fp0 * fp0 * q / (one * one)
            - mid / one
            - (e1 / one) ** 2
        )


# ---------------------------------------------------------------------------
# domain and manifold


@dataclass(frozen=True)
class Domain:
    """Radial domain descriptor.

    kind is one of "pole_cap", "interval", "circle".  For a circle the
    coordinate lives on [0, period) and profiles must be periodic.
    """

    kind: str
    r_min: float
    r_max: float

    def __post_init__(self):
        if self.kind not in ("pole_cap", "interval", "circle"):
            raise ParameterError(f"unknown domain kind {self.kind!r}")
        if not self.r_max > self.r_min:
            raise ParameterError("domain needs r_max > r_min")
        if self.kind == "pole_cap" and abs(self.r_min) > 0:
            raise ParameterError("pole cap domain starts at r = 0")
        if self.kind == "circle" and abs(self.r_min) > 0:
            raise ParameterError("circle coordinate starts at 0")

    @property
    def length(self) -> float:
        return self.r_max - self.r_min


@dataclass(frozen=True)
class ModelManifold:
    """Warped-product model with a radial measure density.

    Attributes
    ----------
    n : int
        Dimension parameter, n >= 2.  For interval and circle domains it
        only enters the fiber factor f^{n-1} and the mode bookkeeping.
    domain : Domain
    warp : RadialProfile
        f(r); for a pole cap f(0) = 0, f'(0) = 1 is enforced.
    density : RadialProfile
        phi(r); the measure carries e^{-phi}.
    homogeneous : bool
        True only for the constant-curvature, constant-density catalog
        entries where ball volume does not depend on the center.
    truncated : bool
        True when the domain is a finite window into a noncompact model,
        so density bands refer to the window only.
    """

    n: int
    domain: Domain
    warp: RadialProfile
    density: RadialProfile
    name: str = "custom"
    homogeneous: bool = False
    truncated: bool = False

    def __post_init__(self):
        if self.n < 2:
            raise ParameterError("dimension n must be >= 2")
        if self.domain.kind == "pole_cap":
            f0 = float(self.warp(np.array(0.0)))
            fp0 = float(self.warp.deriv(np.array(0.0)))
            if abs(f0) > _POLE_TOL or abs(fp0 - 1.0) > _POLE_TOL:
                raise ParameterError("pole cap warp needs f(0)=0 and f'(0)=1")
        elif self.domain.kind == "interval":
            rr = np.linspace(self.domain.r_min, self.domain.r_max, 257)
            if np.min(self.warp(rr)) <= 0.0:
                raise ParameterError("interval warp must stay positive")
        else:  # circle
            L = self.domain.length
            for prof in (self.warp, self.density):
                lo = float(prof(np.array(0.0)))
                hi = float(prof(np.array(L)))
                if abs(hi - lo) > 1e-9 * (1.0 + abs(lo)):
                    raise ParameterError("circle profiles must be periodic")

    # -- profile shorthands ------------------------------------------------
    def f(self, r):
        return self.warp(r)

    def df(self, r):
        return self.warp.deriv(r)

    def d2f(self, r):
        return self.warp.deriv2(r)

    def phi(self, r):
        return self.density(r)

    def dphi(self, r):
        return self.density.deriv(r)

    def d2phi(self, r):
        return self.density.deriv2(r)

    # -- measure -----------------------------------------------------------
    @property
    def sphere_factor(self) -> float:
        """Cross-section measure: unit-sphere area for pole caps, else 1."""
        if self.domain.kind == "pole_cap":
            return sphere_area(self.n)
        return 1.0

    def weight(self, r):
        """Radial measure density  omega f^{n-1} e^{-phi}."""
        return self.sphere_factor * self.f(r) ** (self.n - 1) * np.exp(-self.phi(r))

    @property
    def center(self) -> float:
        """Reference center: the pole, the interval midpoint, or 0."""
        if self.domain.kind == "pole_cap":
            return 0.0
        if self.domain.kind == "interval":
            return 0.5 * (self.domain.r_min + self.domain.r_max)
        return 0.0

    def distance(self, x, y):
        """Distance along the radial coordinate (wrapped on a circle)."""
        d = np.abs(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))
        if self.domain.kind == "circle":
            L = self.domain.length
            d = np.minimum(d, L - d)
        return d

    @property
    def has_far_pole(self) -> bool:
        if self.domain.kind != "pole_cap":
            return False
        return abs(float(self.f(np.array(self.domain.r_max)))) < _POLE_TOL

    def ball_volume(self, radius: float, center: float | None = None) -> float:
        """mu-volume of the metric ball, by adaptive quadrature.

        Pole-cap balls must be centred at a pole (either one); interval
        and circle balls may be centred anywhere.
        """
        from scipy.integrate import quad

        if radius < 0:
            raise ParameterError("ball radius must be nonnegative")
        if center is None:
            center = self.center
        kind = self.domain.kind
        w = lambda r: self.weight(np.asarray(r, dtype=float))
        if kind == "pole_cap":
            far = self.domain.r_max
            if abs(center) <= _POLE_TOL:
                lo, hi = 0.0, min(radius, far)
            elif self.has_far_pole and abs(center - far) <= _POLE_TOL:
                lo, hi = max(0.0, far - radius), far
            else:
                raise ParameterError("pole cap ball volume needs a pole center")
        elif kind == "interval":
            lo = max(self.domain.r_min, center - radius)
            hi = min(self.domain.r_max, center + radius)
        else:  # circle
            L = self.domain.length
            if 2.0 * radius >= L:
                lo, hi = 0.0, L
            else:
                lo = (center - radius) % L
                hi = (center + radius) % L
                if lo < hi:
                    val, _ = quad(w, lo, hi, limit=200)
                else:
                    v1, _ = quad(w, lo, L, limit=200)
                    v2, _ = quad(w, 0.0, hi, limit=200)
                    val = v1 + v2
                return float(val)
        val, _ = quad(w, lo, hi, limit=200)
        return float(val)


# ---------------------------------------------------------------------------
# admissibility of (N, eps) and the constant c


def _as_N(N) -> float:
    if N in ("inf", "+inf", "infinity"):
        return math.inf
    return float(N)


def validate_eps_range(N, n: int, eps: float):
    """Check |eps| against the admissible window for (N, n).

    Returns (ok, bound) where bound is the open upper limit for |eps|
    (inf when every eps is allowed).  Raises ParameterError when N falls
    in the forbidden band (1, n) for N != n.
    """
    N = _as_N(N)
    if math.isinf(N):
        return abs(eps) < 1.0, 1.0
    if N == n:
        return True, math.inf
    if 1.0 < N < n:
        raise ParameterError(
            f"dimension parameter N={N} lies in the excluded band (1, {n})"
        )
    if N == 1.0:
        return eps == 0.0, 0.0
    bound = math.sqrt((N - 1.0) / (N - n))
    return abs(eps) < bound, bound


def curvature_constant_c(N, n: int, eps: float) -> float:
    """c = (1/(n-1)) (1 - eps^2 (N-n)/(N-1)), with the N = inf limit."""
    N = _as_N(N)
    ok, bound = validate_eps_range(N, n, eps)
    if not ok:
        raise ParameterError(
            f"eps={eps} outside the admissible window |eps| < {bound} for N={N}, n={n}"
        )
    if math.isinf(N):
        ratio = 1.0
    elif N == n:
        ratio = 0.0
    elif N == 1.0:
        ratio = 0.0  # eps is forced to 0 anyway
    else:
        ratio = (N - n) / (N - 1.0)
    return (1.0 - eps * eps * ratio) / (n - 1.0)


def sobolev_exponent_nu(c: float) -> float:
    """nu = 3 when c = 1, else 1 + 1/c (requires 0 < c <= 1)."""
    if not (0.0 < c <= 1.0 + 1e-12):
        raise ParameterError(f"constant c={c} outside (0, 1]")
    if abs(c - 1.0) <= 1e-12:
        return 3.0
    return 1.0 + 1.0 / c


# ---------------------------------------------------------------------------
# curvature diagonals


def radial_curvatures(manifold: ModelManifold, N, r):
    """Diagonal values of the modified Ricci tensor at radius r.

    Returns (radial, tangential) where

        radial     = -(n-1) f''/f + phi'' - phi'^2/(N-n)
        tangential = -f''/f + (n-2)(1 - f'^2)/f^2 + phi' f'/f

    The quadratic density term is dropped at N = inf, and N = n is only
    admissible when phi' vanishes identically.
    """
    N = _as_N(N)
    n = manifold.n
    r = np.asarray(r, dtype=float)
    shape = manifold.warp.shape_ratio(r)
    defect = manifold.warp.tangent_defect(r)
    dphi = manifold.dphi(r)
    d2phi = manifold.d2phi(r)

    if math.isinf(N):
        quad_term = 0.0
    elif N == n:
        if np.max(np.abs(dphi)) > 1e-10:
            raise ParameterError("N = n requires a constant density")
        quad_term = 0.0
    else:
        quad_term = dphi * dphi / (N - n)

    ric_radial = -(n - 1) * shape + d2phi - quad_term

    # phi' f'/f: at a pole phi' -> 0 for smooth radial densities; evaluate
    # through f only where f is nonzero, series value otherwise.
    f = manifold.f(r)
    df = manifold.df(r)
    with np.errstate(divide="ignore", invalid="ignore"):
        mixed = np.where(np.abs(f) > 1e-12, dphi * df / np.where(np.abs(f) > 1e-12, f, 1.0), d2phi)
    ric_tangential = -shape + (n - 2) * defect + mixed
    return ric_radial, ric_tangential


def _conformal_prefactor(manifold: ModelManifold, eps: float, r):
    """exp(-4 (eps - 1) phi / (n - 1))."""
    return np.exp(-4.0 * (eps - 1.0) * manifold.phi(r) / (manifold.n - 1))


def k_epsilon(manifold: ModelManifold, params, r):
    """Pointwise conformal curvature scale.

    K_eps(r) = max(0, e^{-4(eps-1)phi/(n-1)} * (-min(radial, tangential))).
    """
    rr, tt = radial_curvatures(manifold, params.N, r)
    worst = -np.minimum(rr, tt)
    val = _conformal_prefactor(manifold, params.eps, r) * worst
    return np.maximum(0.0, val)


def k_epsilon_ball(
    manifold: ModelManifold, params, R: float, grid=None, center: float | None = None
) -> float:
    """Max of k_epsilon over points within distance R of the center."""
    if grid is not None:
        nodes = grid.nodes
    else:
        nodes = _dense_nodes(manifold)
    if center is None:
        center = manifold.center
    mask = manifold.distance(nodes, center) <= R
    if not np.any(mask):
        return 0.0
    return float(np.max(k_epsilon(manifold, params, nodes[mask])))


def _dense_nodes(manifold: ModelManifold, m: int = 2048):
    lo, hi = manifold.domain.r_min, manifold.domain.r_max
    h = (hi - lo) / m
    return lo + (np.arange(m) + 0.5) * h


def density_band(manifold: ModelManifold, eps: float, grid=None):
    """Bounds (a, b) of e^{2(1-eps) phi/(n-1)} over the domain sample."""
    if eps == 1.0:
        return 1.0, 1.0
    nodes = grid.nodes if grid is not None else _dense_nodes(manifold)
    vals = np.exp(2.0 * (1.0 - eps) * manifold.phi(nodes) / (manifold.n - 1))
    return float(np.min(vals)), float(np.max(vals))


# ---------------------------------------------------------------------------
# parameter bundle


@dataclass(frozen=True)
class CurvatureParams:
    """Validated shape parameters plus the derived constants.

    N may be math.inf.  K is the curvature scale entering the comparison
    profiles; (a, b) is the density band of e^{2(1-eps)phi/(n-1)} over
    the (possibly truncated) domain.
    """

    N: float
    eps: float
    K: float
    c: float
    nu: float
    a: float
    b: float
    band_truncated: bool = False

    @classmethod
    def derive(cls, manifold: ModelManifold, N, eps: float, K: float, grid=None):
        N = _as_N(N)
        c = curvature_constant_c(N, manifold.n, eps)
        nu = sobolev_exponent_nu(c)
        a, b = density_band(manifold, eps, grid=grid)
        truncated = manifold.truncated and not isinstance(manifold.density, ConstProfile)
        return cls(N=N, eps=eps, K=float(K), c=c, nu=nu, a=a, b=b, band_truncated=truncated)

    def with_K(self, K: float) -> "CurvatureParams":
        return replace(self, K=float(K))


def derive_curvature_floor(manifold: ModelManifold, N, eps: float, grid=None) -> float:
    """Largest K with  Ric^N_phi >= K e^{4(eps-1)phi/(n-1)}  on the sample.

    The sample minimum overshoots the true infimum by up to |v''| h^2/8
    between cell centers, so that much is subtracted (estimated from the
    scan's own second differences); a later scan on any grid then sits
    at or above the returned floor.  Shrunk by one part in 1e12 on top.
    """
    nodes = grid.nodes if grid is not None else _dense_nodes(manifold)
    rr, tt = radial_curvatures(manifold, N, nodes)
    vals = np.minimum(rr, tt) / np.exp(4.0 * (eps - 1.0) * manifold.phi(nodes) / (manifold.n - 1))
    floor = float(np.min(vals))
    if vals.size >= 3:
        floor -= float(np.max(np.abs(np.diff(vals, 2)))) / 8.0
    return floor - abs(floor) * 1e-12 - 1e-12


# ---------------------------------------------------------------------------
# weighted norms


def weighted_lp_norm(manifold: ModelManifold, values, p: float, grid) -> float:
    """(sum |v_i|^p mu_i)^(1/p) with the grid's measure weights."""
    if p <= 0:
        raise ParameterError("p must be positive")
    v = np.abs(np.asarray(values, dtype=float))
    return float(np.sum(v**p * grid.mu) ** (1.0 / p))


def grad_phi_lp(manifold: ModelManifold, p: float, squared: bool = False, grid=None) -> float:
    """Weighted Lp norm of |phi'| (or of |phi'|^2 with squared=True)."""
    if grid is None:
        raise ParameterError("grad_phi_lp needs a grid for its quadrature")
    g = np.abs(manifold.dphi(grid.nodes))
    if squared:
        g = g * g
    return weighted_lp_norm(manifold, g, p, grid)
