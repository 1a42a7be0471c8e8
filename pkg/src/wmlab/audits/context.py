"""Shared state for a scenario under audit: grid, operators, spectra.

An AuditContext owns one manifold with validated curvature parameters
and builds discrete objects lazily, caching them per (mode, options).
refined() returns a context on the doubled grid so empirical audits can
check resolution stability without touching the caller's objects.
"""

from __future__ import annotations

import numpy as np

from ..errors import AuditError
from ..geometry import (
    CurvatureParams,
    ModelManifold,
    k_epsilon_ball,
    radial_curvatures,
)
from ..heat import SpectralKernel
from ..operators import build_grid, build_operator, full_spectrum, restrict_grid

__all__ = ["AuditContext"]


class AuditContext:
    def __init__(
        self,
        manifold: ModelManifold,
        params: CurvatureParams,
        M: int = 512,
        seed: int = 0,
        scenario: str = "adhoc",
    ):
        self.manifold = manifold
        self.params = params
        self.M = int(M)
        self.seed = int(seed)
        self.scenario = scenario
        self._grid = None
        self._ops = {}
        self._spectra = {}

    # -- lazy builders -----------------------------------------------------
    @property
    def grid(self):
        if self._grid is None:
            self._grid = build_grid(self.manifold, self.M)
        return self._grid

    def op(self, l: int = 0, bc=None):
        key = (l, bc)
        if key not in self._ops:
            self._ops[key] = build_operator(self.manifold, self.grid, l=l, bc=bc)
        return self._ops[key]

    def spectrum(self, l_max: int = 0, k_per_mode=None):
        if self.manifold.domain.kind == "circle":
            l_max = 0
        key = (l_max, k_per_mode)
        if key not in self._spectra:
            self._spectra[key] = full_spectrum(
                self.manifold, self.grid, l_max=l_max, k_per_mode=k_per_mode
            )
        return self._spectra[key]

    def kernel(self, l_max: int = 0, k_per_mode=None) -> SpectralKernel:
        return SpectralKernel(self.spectrum(l_max=l_max, k_per_mode=k_per_mode))

    def refined(self) -> "AuditContext":
        return AuditContext(
            self.manifold,
            self.params,
            M=2 * self.M,
            seed=self.seed,
            scenario=self.scenario,
        )

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    # -- hypothesis scan ---------------------------------------------------
    def hypothesis_margin(self) -> float:
        """min over grid nodes of  min(Ric diag) - K e^{4(eps-1)phi/(n-1)}.

        Nonnegative (within rounding) means the pointwise curvature
        hypothesis holds on the sampled domain.
        """
        nodes = self.grid.nodes
        rr, tt = radial_curvatures(self.manifold, self.params.N, nodes)
        pref = np.exp(
            4.0 * (self.params.eps - 1.0) * self.manifold.phi(nodes) / (self.manifold.n - 1)
        )
        gap = np.minimum(rr, tt) - self.params.K * pref
        return float(np.min(gap))

    def hypothesis_ok(self, tol: float = 1e-9) -> bool:
        scale = 1.0 + abs(self.params.K)
        return self.hypothesis_margin() >= -tol * scale

    def k_eps_ball(self, R: float, center: float | None = None) -> float:
        return k_epsilon_ball(
            self.manifold, self.params, R, grid=self.grid, center=center
        )

    # -- geometry shorthands ----------------------------------------------
    @property
    def diameter(self) -> float:
        man = self.manifold
        kind = man.domain.kind
        if kind == "circle":
            return man.domain.length / 2.0
        if kind == "interval":
            return man.domain.length
        if man.has_far_pole:
            return man.domain.r_max
        return 2.0 * man.domain.r_max

    @property
    def audit_center(self) -> float:
        """Ball center for audits; mid-coordinate on a circle so that
        coordinate windows stay contiguous."""
        if self.manifold.domain.kind == "circle":
            return 0.5 * self.manifold.domain.length
        return self.manifold.center

    def require(self, cond: bool, msg: str):
        if not cond:
            raise AuditError(f"{self.scenario}: {msg}")

    # -- ball restrictions -------------------------------------------------
    def ball_subgrid(self, R: float, center: float | None = None):
        """(sub-grid, parent indices) for the cells within distance R."""
        if center is None:
            center = self.audit_center
        idx = self.grid.ball_nodes(R, center)
        self.require(idx.size >= 4, f"ball R={R} contains fewer than 4 cells")
        if self.manifold.domain.kind == "circle":
            self.require(idx.size < self.grid.M, "ball covers the whole circle")
        return restrict_grid(self.grid, idx), idx

    def ball_operator(self, R: float, l: int = 0, outer: str = "neumann",
                      center: float | None = None):
        """Mode operator on the ball, pole conditions kept where they apply."""
        sub, idx = self.ball_subgrid(R, center)
        man = self.manifold
        left = right = outer
        if man.domain.kind == "pole_cap":
            if idx[0] == 0:
                left = "pole"
            if idx[-1] == self.grid.M - 1 and man.has_far_pole:
                right = "pole"
        return build_operator(man, sub, l=l, bc=(left, right)), sub
