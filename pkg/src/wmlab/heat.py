"""Heat semigroup machinery: spectral kernels and implicit stepping.

Kernels are evaluated between points on a common radial ray through the
center, where the angular sum collapses to the multiplicity-weighted
radial series

    H(x, y, t) = sum_l m_l sum_j e^{-lambda_{l,j} t} v_{l,j}(x) v_{l,j}(y)

with v the mu-normalised radial eigenfunctions.  On interval and circle
models this is the full kernel.  Distances between such points are the
radial offsets (wrapped on a circle).

Time stepping offers backward Euler (first order, inverse-positive:
the step matrix is an M-matrix, so positivity and the L1 contraction
are inherited exactly) and Crank-Nicolson (second order).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .errors import ParameterError, SolverError
from .operators import (
    ModeOperator,
    RadialGrid,
    Spectrum,
    build_grid,
    build_operator,
    mode_spectrum,
    restrict_grid,
)

__all__ = [
    "SpectralKernel",
    "heat_kernel_spectral",
    "HeatStepper",
    "heat_step",
    "solve_heat",
    "HeatSolution",
    "mass",
    "dirichlet_mass_profile",
    "harnack_quotient",
    "davies_double_integral",
]

_TRUNC_REL = 1e-14


@dataclass(frozen=True)
class SpectralKernel:
    """Heat kernel assembled from a merged spectrum."""

    spectrum: Spectrum

    @property
    def grid(self) -> RadialGrid:
        return self.spectrum.grid

    def _guard(self, t: float) -> None:
        if t <= 0:
            raise ParameterError("kernel time must be positive")
        for eigs in self.spectrum.mode_list:
            if eigs.complete:
                continue
            lam0 = float(self.spectrum.lam[0])
            tail = math.exp(-(float(eigs.values[-1]) - lam0) * t)
            if tail > _TRUNC_REL:
                raise SolverError(
                    f"spectral truncation too coarse at t={t}: tail weight {tail:.2e}; "
                    "increase k_per_mode"
                )

    def value(self, x_i: int, y_j: int, t: float) -> float:
        self._guard(t)
        total = 0.0
        for eigs in self.spectrum.mode_list:
            w = np.exp(-eigs.values * t)
            total += eigs.multiplicity * float(
                np.dot(eigs.vectors[x_i] * w, eigs.vectors[y_j])
            )
        return total

    def column(self, x_i: int, t: float) -> np.ndarray:
        """H(x, ., t) on the grid nodes."""
        self._guard(t)
        out = np.zeros(self.grid.M)
        for eigs in self.spectrum.mode_list:
            w = np.exp(-eigs.values * t) * eigs.vectors[x_i]
            out += eigs.multiplicity * (eigs.vectors @ w)
        return out

    def matrix(self, t: float) -> np.ndarray:
        self._guard(t)
        out = np.zeros((self.grid.M, self.grid.M))
        for eigs in self.spectrum.mode_list:
            w = np.exp(-eigs.values * t)
            out += eigs.multiplicity * ((eigs.vectors * w[None, :]) @ eigs.vectors.T)
        return out

    def column_mass(self, x_i: int, t: float) -> float:
        return float(np.dot(self.column(x_i, t), self.grid.mu))


def heat_kernel_spectral(spectrum: Spectrum, x_i: int, y_j: int, t: float) -> float:
    """Common-ray kernel value between two grid nodes."""
    return SpectralKernel(spectrum).value(x_i, y_j, t)


# ---------------------------------------------------------------------------
# implicit stepping


class HeatStepper:
    """Cached banded/periodic factorisations for one (operator, dt, scheme)."""

    def __init__(self, op: ModeOperator, dt: float, scheme: str = "crank-nicolson",
                 reaction: np.ndarray | None = None):
        if dt <= 0:
            raise ParameterError("time step must be positive")
        if scheme not in ("backward-euler", "crank-nicolson"):
            raise ParameterError(f"unknown scheme {scheme!r}")
        self.op = op
        self.dt = float(dt)
        self.scheme = scheme
        self.reaction = None if reaction is None else np.asarray(reaction, dtype=float)
        self._root = np.sqrt(op.grid.mu)
        self._build()

    def _sym_tridiag(self, shift: float):
        """diag/off of  I + shift * (A - diag(reaction))  in symmetrised form."""
        d = 1.0 + shift * self.op.sym_diag
        if self.reaction is not None:
            d = d - shift * self.reaction
        e = shift * self.op.sym_off
        corner = shift * self.op.sym_corner
        return d, e, corner

    def _build(self):
        M = self.op.M
        shift = self.dt if self.scheme == "backward-euler" else 0.5 * self.dt
        d, e, corner = self._sym_tridiag(shift)
        # positive definiteness with nonpositive off-diagonals keeps the
        # step matrix inverse-positive; the reaction shift must stay < 1
        if self.reaction is not None and shift * np.max(self.reaction) >= 1.0:
            raise SolverError("reaction too stiff for this time step; reduce dt")
        if np.any(d <= 0.0):
            raise SolverError("implicit step lost diagonal positivity; reduce dt")
        if not self.op.periodic:
            ab = np.zeros((3, M))
            ab[0, 1:] = e
            ab[1, :] = d
            ab[2, :-1] = e
            self._banded = ab
            self._lu = None
        else:
            from scipy.sparse import diags
            from scipy.sparse.linalg import splu

            A = diags([e, d, e], offsets=[-1, 0, 1], format="lil")
            A[0, M - 1] += corner
            A[M - 1, 0] += corner
            self._lu = splu(A.tocsc())
            self._banded = None
        if self.scheme == "crank-nicolson":
            dr, er, cr = self._sym_tridiag(-0.5 * self.dt)
            self._rhs = (dr, er, cr)
        else:
            self._rhs = None

    def _rhs_apply(self, q: np.ndarray) -> np.ndarray:
        d, e, corner = self._rhs
        out = d * q
        out[:-1] += e * q[1:]
        out[1:] += e * q[:-1]
        if self.op.periodic:
            out[0] += corner * q[-1]
            out[-1] += corner * q[0]
        return out

    def step(self, u: np.ndarray) -> np.ndarray:
        q = self._root * np.asarray(u, dtype=float)
        if self.scheme == "crank-nicolson":
            q = self._rhs_apply(q)
        if self._banded is not None:
            q = solve_banded((1, 1), self._banded, q)
        else:
            q = self._lu.solve(q)
        return q / self._root


def heat_step(op: ModeOperator, u: np.ndarray, dt: float, scheme: str = "crank-nicolson") -> np.ndarray:
    """One implicit step of du/dt = L u."""
    return HeatStepper(op, dt, scheme).step(u)


@dataclass
class HeatSolution:
    """Trajectory of an evolved field on the grid."""

    op: ModeOperator
    times: np.ndarray           # shape (T,)
    fields: np.ndarray          # shape (T, M)
    scheme: str

    @property
    def grid(self) -> RadialGrid:
        return self.op.grid

    def at_time(self, t: float, tol: float = 1e-9) -> np.ndarray:
        k = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[k] - t) > tol * max(1.0, abs(t)):
            raise ParameterError(f"time {t} not recorded (nearest {self.times[k]})")
        return self.fields[k]

    def window(self, t_lo: float, t_hi: float):
        mask = (self.times >= t_lo - 1e-12) & (self.times <= t_hi + 1e-12)
        return self.times[mask], self.fields[mask]


def solve_heat(
    op: ModeOperator,
    u0: np.ndarray,
    t_final: float,
    dt: float,
    scheme: str = "crank-nicolson",
    reaction: np.ndarray | None = None,
    record_every: int = 1,
) -> HeatSolution:
    """Evolve du/dt = L u (+ reaction u) to t_final with fixed steps."""
    if t_final <= 0:
        raise ParameterError("final time must be positive")
    steps = max(1, int(round(t_final / dt)))
    dt_eff = t_final / steps
    stepper = HeatStepper(op, dt_eff, scheme, reaction=reaction)
    u = np.asarray(u0, dtype=float).copy()
    times = [0.0]
    fields = [u.copy()]
    for k in range(1, steps + 1):
        u = stepper.step(u)
        if k % record_every == 0 or k == steps:
            times.append(k * dt_eff)
            fields.append(u.copy())
    return HeatSolution(op=op, times=np.array(times), fields=np.array(fields), scheme=scheme)


def mass(u: np.ndarray, grid: RadialGrid) -> float:
    """Total mu-mass of a field."""
    return float(np.dot(np.asarray(u, dtype=float), grid.mu))


def delta_field(grid: RadialGrid, node: int) -> np.ndarray:
    """mu-normalised indicator of one cell (discrete point source)."""
    u = np.zeros(grid.M)
    u[node] = 1.0 / grid.mu[node]
    return u


# ---------------------------------------------------------------------------
# Dirichlet mass and stochastic completeness


def dirichlet_mass_profile(manifold, R_list, t: float, M: int = 1024,
                           center: float | None = None):
    """Surviving heat mass in balls with absorbing boundary.

    For each R the radial operator is truncated to the cells inside the
    ball around the center, an absorbing condition is imposed at the cut
    face, and the mass of the evolved point source (started at the
    center cell) at time t is recorded.  Returns (R_array, mass_array).

    On a circle the center must sit far enough from the coordinate seam
    that the balls stay contiguous in the coordinate.
    """
    if t <= 0:
        raise ParameterError("time must be positive")
    if center is None:
        center = manifold.center
    R_list = sorted(float(R) for R in R_list)
    grid = build_grid(manifold, M)
    kind = manifold.domain.kind
    out = []
    for R in R_list:
        idx = grid.ball_nodes(R, center)
        if idx.size < 4:
            raise ParameterError(f"ball R={R} contains fewer than 4 cells")
        if kind == "circle" and idx.size == grid.M:
            raise ParameterError("circle ball covers the whole domain; reduce R")
        sub = restrict_grid(grid, idx)
        left = "pole" if (kind == "pole_cap" and idx[0] == 0) else "dirichlet"
        right = "dirichlet"
        if idx[-1] == grid.M - 1 and kind == "pole_cap" and manifold.has_far_pole:
            right = "pole"
        op = build_operator(manifold, sub, l=0, bc=(left, right))
        eigs = mode_spectrum(op)
        src = sub.nearest_node(center)
        coeff = eigs.vectors[src] * np.exp(-eigs.values * t)
        m = float(np.dot(coeff, eigs.vectors.T @ sub.mu))
        out.append(m)
    return np.array(R_list), np.array(out)


# ---------------------------------------------------------------------------
# quotients and integrated bounds


def harnack_quotient(solution: HeatSolution, early, late) -> float:
    """log of u(x, s)/u(y, t) for two recorded space-time points."""
    (x_i, s), (y_j, t) = early, late
    u_early = solution.at_time(s)[x_i]
    u_late = solution.at_time(t)[y_j]
    if u_early <= 0 or u_late <= 0:
        raise SolverError("Harnack quotient needs positive values")
    return math.log(u_early / u_late)


def davies_double_integral(kernel: SpectralKernel, band1, band2, t: float, mu_bottom: float = 0.0):
    """Integrated kernel mass between two radius bands and its bound.

    band = (lo, hi) selects cells at distance in [lo, hi] from the
    center.  Returns (lhs, rhs, info): lhs is the double mu-integral of
    H over the bands, rhs = sqrt(V1 V2) exp(-d^2/(4t) - mu_bottom t)
    with d the gap between the bands.
    """
    grid = kernel.grid
    man = grid.manifold
    d_nodes = man.distance(grid.nodes, man.center)

    def band_mask(band):
        lo, hi = band
        if not (0.0 <= lo < hi):
            raise ParameterError("band needs 0 <= lo < hi")
        return (d_nodes >= lo) & (d_nodes <= hi)

    m1, m2 = band_mask(band1), band_mask(band2)
    if not (np.any(m1) and np.any(m2)):
        raise ParameterError("empty band")
    # bands are symmetric about the center, so the gap between the radius
    # intervals is the set distance (wrapped annuli included)
    (lo1, hi1), (lo2, hi2) = sorted([tuple(band1), tuple(band2)])
    gap = max(0.0, lo2 - hi1)
    V1 = float(np.sum(grid.mu[m1]))
    V2 = float(np.sum(grid.mu[m2]))
    w1 = np.where(m1, grid.mu, 0.0)
    w2 = np.where(m2, grid.mu, 0.0)
    lhs = 0.0
    for eigs in kernel.spectrum.mode_list:
        p1 = eigs.vectors.T @ w1
        p2 = eigs.vectors.T @ w2
        lhs += eigs.multiplicity * float(np.dot(p1 * np.exp(-eigs.values * t), p2))
    rhs = math.sqrt(V1 * V2) * math.exp(-gap * gap / (4.0 * t) - mu_bottom * t)
    info = {"V1": V1, "V2": V2, "distance": gap, "mu_bottom": mu_bottom}
    return lhs, rhs, info
