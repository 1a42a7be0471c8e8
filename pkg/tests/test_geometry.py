"""Profiles, warps, curvature diagonals and derived shape constants.

Reference values are hand-derived closed forms (stated in each
docstring) or frozen from an independent finite-difference scan.
"""

import math

import numpy as np
import pytest

from wmlab.catalog import catalog_manifold, catalog_params
from wmlab.errors import ParameterError
from wmlab.geometry import (
    ConstProfile,
    CurvatureParams,
    Domain,
    EuclideanWarp,
    FourierProfile,
    ModelManifold,
    PerturbedWarp,
    PolyProfile,
    ScaledWarp,
    SphereWarp,
    SumProfile,
    UnitWarp,
    curvature_constant_c,
    density_band,
    derive_curvature_floor,
    grad_phi_lp,
    k_epsilon,
    radial_curvatures,
    sobolev_exponent_nu,
    sphere_area,
    validate_eps_range,
    weighted_lp_norm,
)
from wmlab.operators import build_grid


def central_diff(fn, r, h=1e-5):
    return (fn(r + h) - fn(r - h)) / (2.0 * h)


def test_sphere_area_values():
    """|S^1| = 2 pi, |S^2| = 4 pi, |S^3| = 2 pi^2 (standard)."""
    assert abs(sphere_area(2) - 2.0 * math.pi) < 1e-12
    assert abs(sphere_area(3) - 4.0 * math.pi) < 1e-12
    assert abs(sphere_area(4) - 2.0 * math.pi**2) < 1e-12


def test_profile_derivatives_match_central_differences():
    """deriv and deriv2 of every profile family agree with O(h^2)
    central differences on random points, 10 seeded draws each."""
    rng = np.random.default_rng(11)
    profiles = [
        PolyProfile([0.3, -0.2, 0.05, 0.01]),
        FourierProfile([(1, 0.2, 0.1), (3, -0.05, 0.4)]),
        SumProfile(PolyProfile([0.0, 0.1]), FourierProfile([(2, 0.3, 0.0)])),
        SphereWarp(),
        EuclideanWarp(),
    ]
    for prof in profiles:
        for _ in range(10):
            r = float(rng.uniform(0.3, 2.5))
            d1 = central_diff(prof, r)
            d2 = central_diff(prof.deriv, r)
            assert abs(prof.deriv(r) - d1) < 1e-7 * (1.0 + abs(d1))
            assert abs(prof.deriv2(r) - d2) < 1e-6 * (1.0 + abs(d2))


def test_perturbed_warp_fixes_endpoints_and_stays_positive():
    """The bump envelope vanishes with its derivative at both ends of
    the span, so the pole normalisation of the base warp survives."""
    span = math.pi
    warp = PerturbedWarp(SphereWarp(), [0.05, -0.03], span)
    assert abs(float(warp(np.array(0.0)))) < 1e-12
    assert abs(float(warp.deriv(np.array(0.0))) - 1.0) < 1e-10
    rr = np.linspace(1e-3, span - 1e-3, 401)
    assert np.min(warp(rr)) > 0.0
    rng = np.random.default_rng(3)
    for _ in range(10):
        r = float(rng.uniform(0.2, span - 0.2))
        assert abs(warp.deriv(r) - central_diff(warp, r)) < 1e-7


def test_scaled_warp_is_dilation():
    """ScaledWarp(f, s)(r) = s f(r/s), derivative f'(r/s)."""
    w = ScaledWarp(SphereWarp(), 2.0)
    r = np.linspace(0.1, 3.0, 7)
    assert np.allclose(w(r), 2.0 * np.sin(r / 2.0), atol=1e-14)
    assert np.allclose(w.deriv(r), np.cos(r / 2.0), atol=1e-14)


def test_pole_cap_warp_normalisation_enforced():
    """f(0) = 0 and f'(0) = 1 are required on a pole cap."""
    dom = Domain("pole_cap", 0.0, 1.0)
    with pytest.raises(ParameterError):
        ModelManifold(n=2, domain=dom, warp=UnitWarp(), density=ConstProfile())
    with pytest.raises(ParameterError):
        # f = 2r has the wrong pole slope
        ModelManifold(n=2, domain=dom, warp=PolyProfile([0.0, 2.0]),
                      density=ConstProfile())


def test_circle_requires_periodic_profiles():
    dom = Domain("circle", 0.0, 2.0 * math.pi)
    with pytest.raises(ParameterError):
        ModelManifold(n=2, domain=dom, warp=UnitWarp(), density=PolyProfile([0.0, 1.0]))


def test_eps_window_bound():
    """bound = sqrt((N-1)/(N-n)); for N=4, n=2 that is sqrt(3/2) =
    1.224744871391589 (hand-derived)."""
    ok, bound = validate_eps_range(4, 2, 0.5)
    assert ok
    assert abs(bound - 1.224744871391589) < 1e-15
    ok, _ = validate_eps_range(4, 2, 1.23)
    assert not ok
    # N = inf window is |eps| < 1
    ok, bound = validate_eps_range(math.inf, 2, 0.999)
    assert ok and bound == 1.0
    # N = n admits every eps
    ok, bound = validate_eps_range(2, 2, 5.0)
    assert ok and math.isinf(bound)
    with pytest.raises(ParameterError):
        validate_eps_range(1.5, 2, 0.0)


def test_shape_constants_closed_form():
    """c = (1 - eps^2 (N-n)/(N-1))/(n-1); n=2, N=4, eps=1/2 gives
    c = 1 - (1/4)(2/3) = 5/6 and nu = 1 + 6/5 = 2.2 (hand-derived)."""
    c = curvature_constant_c(4, 2, 0.5)
    assert abs(c - 5.0 / 6.0) < 1e-15
    assert abs(sobolev_exponent_nu(c) - 2.2) < 1e-12
    # c = 1 is the classical case and switches nu to 3
    assert sobolev_exponent_nu(curvature_constant_c(4, 2, 0.0)) == 3.0
    assert abs(curvature_constant_c(math.inf, 3, 0.5) - (1.0 - 0.25) / 2.0) < 1e-15


def test_radial_curvatures_constant_curvature_models():
    """Round sphere has both diagonals equal to n-1; hyperbolic plane
    to -(n-1); euclidean space to 0 (textbook warped-product formulas)."""
    rr = np.linspace(0.3, 2.5, 9)
    sph = catalog_manifold("sphere2")
    rad, tan = radial_curvatures(sph, 2, rr)
    assert np.allclose(rad, 1.0, atol=1e-10)
    assert np.allclose(tan, 1.0, atol=1e-10)
    hyp = catalog_manifold("hyperbolic2")
    rad, tan = radial_curvatures(hyp, 2, rr)
    assert np.allclose(rad, -1.0, atol=1e-10)
    assert np.allclose(tan, -1.0, atol=1e-10)
    euc = catalog_manifold("euclidean3")
    rad, tan = radial_curvatures(euc, 3, rr)
    assert np.allclose(rad, 0.0, atol=1e-12)
    assert np.allclose(tan, 0.0, atol=1e-12)


def test_curvature_floor_catalog_values():
    """Floors of the constant-curvature models sit just below the exact
    values 1, -1, 0 (the scan subtracts its own resolution slack)."""
    for tag, exact in [("sphere2", 1.0), ("hyperbolic2", -1.0), ("euclidean2", 0.0)]:
        man = catalog_manifold(tag)
        floor = derive_curvature_floor(man, man.n, 0.0)
        assert floor <= exact + 1e-12
        assert floor > exact - 1e-6


def test_curvature_floor_is_lower_bound_on_fine_grid():
    """The returned floor must stay below the pointwise values on a
    much finer grid than the scan used (the slack term's job)."""
    man = catalog_manifold("gaussian-density-interval")
    floor = derive_curvature_floor(man, math.inf, 0.0)
    rr = np.linspace(man.domain.r_min + 1e-9, man.domain.r_max - 1e-9, 30001)
    rad, tan = radial_curvatures(man, math.inf, rr)
    vals = np.minimum(rad, tan) / np.exp(4.0 * (0.0 - 1.0) * man.phi(rr) / (man.n - 1))
    assert floor <= float(np.min(vals)) + 1e-9 * abs(floor)


def test_density_band_gaussian_interval():
    """phi = r^2 on [-6, 6], n = 2, eps = 0: the true band of e^{2 phi}
    is [1, e^{72}], e^72 = 1.8586717452841279e31; the cell-centred scan
    sits strictly inside it but within its own resolution slack."""
    man = catalog_manifold("gaussian-density-interval")
    a, b = density_band(man, 0.0)
    assert 1.0 <= a < 1.0 + 1e-4
    assert 0.9 * 1.8586717452841279e31 < b <= 1.8586717452841279e31
    # eps = 1 collapses the band to [1, 1] identically
    assert density_band(man, 1.0) == (1.0, 1.0)


def test_curvature_params_derive():
    man = catalog_manifold("sphere2")
    p = CurvatureParams.derive(man, 2, 0.0, 1.0)
    assert p.a == p.b == 1.0
    assert p.c == 1.0 and p.nu == 3.0
    assert not p.band_truncated
    q = p.with_K(-2.0)
    assert q.K == -2.0 and q.c == p.c
    ou = catalog_manifold("gaussian-density-interval")
    pou = CurvatureParams.derive(ou, math.inf, 0.0, 0.0)
    assert pou.band_truncated


def test_k_epsilon_matches_floor_pointwise():
    """k_epsilon is the pointwise ratio the floor scan minimises."""
    man = catalog_manifold("gaussian-density-interval")
    params = catalog_params("gaussian-density-interval", man)
    rr = np.linspace(-5.0, 5.0, 11)
    vals = k_epsilon(man, params, rr)
    rad, tan = radial_curvatures(man, params.N, rr)
    expect = np.minimum(rad, tan) / np.exp(
        4.0 * (params.eps - 1.0) * man.phi(rr) / (man.n - 1)
    )
    assert np.allclose(vals, expect, rtol=1e-12)


def test_weighted_norms_against_trapezoid():
    """Grid quadrature vs an independent dense trapezoid, interval
    with phi = r^2: agreement to 1e-3 relative at M = 512."""
    man = catalog_manifold("gaussian-density-interval")
    grid = build_grid(man, 512)
    val = grad_phi_lp(man, 4.0, squared=True, grid=grid)
    rr = np.linspace(man.domain.r_min, man.domain.r_max, 200001)
    dens = np.exp(-man.phi(rr)) * man.f(rr) ** (man.n - 1) * man.sphere_factor
    ref = np.trapezoid((2.0 * np.abs(rr)) ** 8 * dens, rr) ** 0.25
    assert abs(val / ref - 1.0) < 1e-3
    ones = np.ones(grid.M)
    vol = weighted_lp_norm(man, ones, 1.0, grid)
    ref_vol = np.trapezoid(dens, rr)
    assert abs(vol / ref_vol - 1.0) < 1e-4


def test_grid_cells_center_and_tile_the_domain():
    man = catalog_manifold("interval")
    grid = build_grid(man, 64)
    L = man.domain.length
    assert grid.M == 64
    assert abs(grid.h - L / 64) < 1e-15
    assert abs(grid.nodes[0] - (man.domain.r_min + 0.5 * grid.h)) < 1e-14
    assert abs(grid.nodes[-1] - (man.domain.r_max - 0.5 * grid.h)) < 1e-14
    # measure weights add up to the total weighted volume
    assert abs(np.sum(grid.mu) - man.sphere_factor * L) < 1e-10
