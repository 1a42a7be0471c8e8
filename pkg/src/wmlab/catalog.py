"""Reference model catalog.

Tags name the classical rotationally symmetric test beds.  Each entry
carries defaults (N, eps, K) that satisfy the curvature hypothesis with
equality-grade margins, so catalog scenarios exercise the sharp cases
of the comparison bounds.

    euclidean2, euclidean3          flat caps [0, 10], f = r
    sphere2, sphere3                round spheres [0, pi], f = sin r
    hyperbolic2                     curvature -1 cap [0, 6], f = sinh r
    circle                          flat circle [0, 2 pi)
    interval                        flat segment [0, pi]
    gaussian-density-interval       [-6, 6] with phi = r^2 (OU weight)
"""

from __future__ import annotations

import math

from .errors import ConfigError
from .geometry import (
    ConstProfile,
    CurvatureParams,
    Domain,
    EuclideanWarp,
    HyperbolicWarp,
    ModelManifold,
    PolyProfile,
    SphereWarp,
    UnitWarp,
)

__all__ = [
    "CATALOG_TAGS",
    "catalog_defaults",
    "catalog_manifold",
    "catalog_params",
    "catalog_scenario",
]


_FLAT = ConstProfile(0.0)


def _euclidean(n: int) -> ModelManifold:
    return ModelManifold(
        n=n,
        domain=Domain("pole_cap", 0.0, 10.0),
        warp=EuclideanWarp(),
        density=_FLAT,
        name=f"euclidean{n}",
        homogeneous=True,
        truncated=True,
    )


def _sphere(n: int) -> ModelManifold:
    return ModelManifold(
        n=n,
        domain=Domain("pole_cap", 0.0, math.pi),
        warp=SphereWarp(),
        density=_FLAT,
        name=f"sphere{n}",
        homogeneous=True,
    )


def _hyperbolic(n: int) -> ModelManifold:
    return ModelManifold(
        n=n,
        domain=Domain("pole_cap", 0.0, 6.0),
        warp=HyperbolicWarp(),
        density=_FLAT,
        name=f"hyperbolic{n}",
        homogeneous=True,
        truncated=True,
    )


def _circle() -> ModelManifold:
    return ModelManifold(
        n=2,
        domain=Domain("circle", 0.0, 2.0 * math.pi),
        warp=UnitWarp(),
        density=_FLAT,
        name="circle",
        homogeneous=True,
    )


def _interval(lo: float = 0.0, hi: float = math.pi) -> ModelManifold:
    return ModelManifold(
        n=2,
        domain=Domain("interval", lo, hi),
        warp=UnitWarp(),
        density=_FLAT,
        name="interval",
        homogeneous=True,
    )


def _gaussian_interval() -> ModelManifold:
    return ModelManifold(
        n=2,
        domain=Domain("interval", -6.0, 6.0),
        warp=UnitWarp(),
        density=PolyProfile([0.0, 0.0, 1.0]),
        name="gaussian-density-interval",
        truncated=True,
    )


_BUILDERS = {
    "euclidean2": lambda: _euclidean(2),
    "euclidean3": lambda: _euclidean(3),
    "sphere2": lambda: _sphere(2),
    "sphere3": lambda: _sphere(3),
    "hyperbolic2": lambda: _hyperbolic(2),
    "circle": _circle,
    "interval": _interval,
    "gaussian-density-interval": _gaussian_interval,
}

CATALOG_TAGS = tuple(sorted(_BUILDERS))

# (N, eps, K): N = n with the round curvature scale K = kappa (n-1) on the
# constant-density entries; the Gaussian weight needs the dimension-free
# setting N = inf
_DEFAULTS = {
    "euclidean2": (2, 0.0, 0.0),
    "euclidean3": (3, 0.0, 0.0),
    "sphere2": (2, 0.0, 1.0),
    "sphere3": (3, 0.0, 2.0),
    "hyperbolic2": (2, 0.0, -1.0),
    "circle": (2, 0.0, 0.0),
    "interval": (2, 0.0, 0.0),
    "gaussian-density-interval": (math.inf, 0.0, 0.0),
}


def catalog_defaults(tag: str) -> tuple:
    """Default (N, eps, K) for a catalog tag."""
    if tag not in _DEFAULTS:
        raise ConfigError(f"unknown catalog tag {tag!r}; known: {', '.join(CATALOG_TAGS)}")
    return _DEFAULTS[tag]


def catalog_manifold(tag: str, domain: tuple | None = None) -> ModelManifold:
    """Build a catalog manifold; `domain` overrides interval endpoints."""
    if tag not in _BUILDERS:
        raise ConfigError(f"unknown catalog tag {tag!r}; known: {', '.join(CATALOG_TAGS)}")
    if domain is not None:
        if tag != "interval":
            raise ConfigError("domain override is only supported for the interval tag")
        lo, hi = float(domain[0]), float(domain[1])
        return _interval(lo, hi)
    return _BUILDERS[tag]()


def catalog_params(tag: str, manifold: ModelManifold, N=None, eps=None, K=None,
                   grid=None) -> CurvatureParams:
    if tag not in _DEFAULTS:
        raise ConfigError(f"unknown catalog tag {tag!r}")
    dN, deps, dK = _DEFAULTS[tag]
    return CurvatureParams.derive(
        manifold,
        dN if N is None else N,
        deps if eps is None else float(eps),
        dK if K is None else float(K),
        grid=grid,
    )


def catalog_scenario(tag: str, N=None, eps=None, K=None, domain=None):
    """(manifold, params) for a catalog tag with optional overrides."""
    man = catalog_manifold(tag, domain=domain)
    return man, catalog_params(tag, man, N=N, eps=eps, K=K)
