"""Comparison coefficients, background volume integrals and the
explicit ratio bounds.

The quadrature oracles are hand-integrated closed forms:
integral of sin t is 1 - cos x, of sin^2 t is x/2 - sin(2x)/4, of
sinh t is cosh x - 1.
"""

import math

import numpy as np
import pytest

from wmlab.catalog import catalog_scenario
from wmlab.comparison import (
    BOUND_SAT,
    EXP_SAT,
    ComparisonProfile,
    bg_integral,
    comparison_s,
    comparison_s_prime,
    cross_center_ratio_bound,
    doubling_bound,
    laplacian_comparison_pair,
    positive_cap,
    same_center_ratio_bound,
    sat_exp,
    volume_ratio_bound,
)
from wmlab.errors import ParameterError
from wmlab.geometry import CurvatureParams


def flat_params(a=1.0, b=1.0, c=1.0, K=0.0):
    return CurvatureParams(N=2.0, eps=0.0, K=K, c=c, nu=3.0, a=a, b=b)


def test_comparison_s_three_signs():
    """sin(t) for K=1, t for K=0, sinh(t) for K=-1."""
    t = np.linspace(0.05, 2.0, 9)
    assert np.allclose(comparison_s(1.0, t), np.sin(t), atol=1e-12)
    assert np.allclose(comparison_s(0.0, t), t, atol=1e-15)
    assert np.allclose(comparison_s(-1.0, t), np.sinh(t), atol=1e-12)
    assert np.allclose(comparison_s(4.0, t), np.sin(2.0 * t) / 2.0, atol=1e-12)
    assert np.allclose(comparison_s_prime(1.0, t), np.cos(t), atol=1e-12)
    assert np.allclose(comparison_s_prime(-1.0, t), np.cosh(t), atol=1e-12)


def test_comparison_s_smooth_at_crossover():
    """The series branch near K t^2 = 0 must join the trig branch
    continuously (checked at +-1e-6 curvature, tiny t)."""
    for t in (1e-5, 1e-3, 0.05):
        up = comparison_s(1e-6, t)
        dn = comparison_s(-1e-6, t)
        assert abs(up - t) < 1e-12 + 1e-6 * t
        assert abs(dn - t) < 1e-12 + 1e-6 * t
        # opposite tiny curvatures differ by ~ |K| t^3 / 3 only
        assert abs(up - dn) < 1e-6 * t**3 / 3.0 * 1.1 + 1e-15


def test_sat_exp_caps_the_argument():
    assert sat_exp(1.0) == math.exp(1.0)
    assert sat_exp(800.0) == math.exp(700.0)
    assert sat_exp(1e9) == sat_exp(EXP_SAT)
    assert math.isfinite(sat_exp(1e9))


def test_bg_integral_closed_forms():
    """cK=1, p=1: 1 - cos x; cK=1 via c=1/2, K=2, p=2: x/2 - sin(2x)/4;
    cK=-1, p=1: cosh x - 1 (hand-integrated)."""
    for x in (0.3, 0.7, 1.4, 2.9):
        v = bg_integral(ComparisonProfile(c=1.0, K=1.0), x)
        assert abs(v - (1.0 - math.cos(x))) < 1e-8
    for x in (0.3, 0.7, 1.4):
        v = bg_integral(ComparisonProfile(c=0.5, K=2.0), x)
        assert abs(v - (x / 2.0 - math.sin(2.0 * x) / 4.0)) < 1e-8
        w = bg_integral(ComparisonProfile(c=1.0, K=-1.0), x)
        assert abs(w - (math.cosh(x) - 1.0)) < 1e-8
    # flat: integral of t^2 with c = 1/2, K = 0
    v = bg_integral(ComparisonProfile(c=0.5, K=0.0), 0.9)
    assert abs(v - 0.9**3 / 3.0) < 1e-10


def test_bg_integral_clips_at_first_zero():
    """Past pi the sine model contributes nothing more."""
    prof = ComparisonProfile(c=1.0, K=1.0)
    assert abs(prof.zero - math.pi) < 1e-15
    full = bg_integral(prof, math.pi)
    assert abs(bg_integral(prof, 10.0) - full) < 1e-10
    assert abs(full - 2.0) < 1e-8


def test_positive_cap():
    p = flat_params(K=4.0)
    assert abs(positive_cap(p) - math.pi / 2.0) < 1e-14
    assert math.isinf(positive_cap(flat_params(K=-1.0)))


def test_volume_ratio_flat_and_sphere():
    """Flat c=1 gives (R/r)^2; the round-sphere bound (1-cos R)/(1-cos r)
    equals the true cap-area ratio, so the bound is sharp there."""
    p = flat_params()
    assert abs(volume_ratio_bound(p, 0.5, 1.5) - 9.0) < 1e-7
    man, params = catalog_scenario("sphere2")
    r, R = 0.4, 1.1
    bound = volume_ratio_bound(params, r, R)
    exact = (1.0 - math.cos(R)) / (1.0 - math.cos(r))
    assert abs(bound / exact - 1.0) < 1e-7
    assert abs(bound / (man.ball_volume(R) / man.ball_volume(r)) - 1.0) < 1e-5
    with pytest.raises(ParameterError):
        volume_ratio_bound(params, 0.5, 4.0)


def test_same_center_ratio_flat_power():
    """a=b=1, c=1, K>=0: the bound collapses to (r/s)^((1+c)/c) = (r/s)^2."""
    p = flat_params()
    assert abs(same_center_ratio_bound(p, 0.5, 2.0) - 16.0) < 1e-12
    assert abs(doubling_bound(p, 0.7) - 4.0) < 1e-12
    # c = 1/2 steepens the power to (1+c)/c = 3
    p2 = flat_params(c=0.5)
    assert abs(same_center_ratio_bound(p2, 1.0, 2.0) - 8.0) < 1e-12
    # a positive floor never enters (only K1 = max(0, -K) does)
    assert same_center_ratio_bound(flat_params(K=5.0), 1.0, 2.0) == \
        same_center_ratio_bound(flat_params(K=0.0), 1.0, 2.0)
    # negative floor multiplies in exp(sqrt(K1/c) r / a)
    v = same_center_ratio_bound(flat_params(K=-1.0), 1.0, 2.0)
    assert abs(v - 4.0 * math.exp(2.0)) < 1e-10


def test_cross_center_uses_triangle_radius():
    p = flat_params()
    assert abs(cross_center_ratio_bound(p, 1.0, 1.0) - same_center_ratio_bound(p, 1.0, 2.0)) < 1e-14


def test_ratio_bounds_saturate_instead_of_overflowing():
    """K = -1e60 would overflow exp; the bound must cap at the float
    ceiling and still be finite (and so strictly below the true value)."""
    p = flat_params(K=-1e60)
    v = same_center_ratio_bound(p, 1.0, 5.0)
    assert math.isfinite(v)
    assert v >= math.exp(EXP_SAT)
    # a large enough radius hits the value ceiling exactly
    assert same_center_ratio_bound(p, 1.0, 50.0) == BOUND_SAT
    assert math.isfinite(volume_ratio_bound(p, 0.5, 1.5))


def test_laplacian_comparison_sphere_equality():
    """On the round model the weighted mean curvature cot r equals the
    comparison rhs exactly (the bound is attained)."""
    man, params = catalog_scenario("sphere2")
    rr = np.linspace(0.2, 2.8, 13)
    lhs, rhs = laplacian_comparison_pair(man, params, rr)
    assert np.allclose(lhs, 1.0 / np.tan(rr), atol=1e-10)
    assert np.allclose(lhs, rhs, atol=1e-9)


def test_laplacian_comparison_inequality_random_perturbations():
    """lhs <= rhs on fuzzed interval densities (20 seeded draws); the
    hypothesis floor is re-derived per draw so the bound must hold."""
    from wmlab.geometry import (
        Domain, FourierProfile, ModelManifold, UnitWarp, derive_curvature_floor,
    )
    rng = np.random.default_rng(7)
    dom = Domain("interval", 0.0, math.pi)
    for _ in range(20):
        amp = rng.uniform(0.05, 0.4, size=2)
        phase = rng.uniform(0.0, 2.0 * math.pi, size=2)
        dens = FourierProfile([(1, amp[0], phase[0]), (2, amp[1], phase[1])])
        man = ModelManifold(n=2, domain=dom, warp=UnitWarp(), density=dens,
                            truncated=True)
        K = derive_curvature_floor(man, 4, 0.0)
        params = CurvatureParams.derive(man, 4, 0.0, K)
        rr = np.linspace(0.3, math.pi - 0.3, 21)
        lhs, rhs = laplacian_comparison_pair(man, params, rr)
        cap = positive_cap(params)
        ok = rr < cap
        assert np.all(lhs[ok] <= rhs[ok] * (1.0 + 1e-9) + 1e-9)
