"""Finite-volume discretisation of the weighted radial Laplacian.

The operator acting on a radial mode u with angular eigenvalue
gamma_l = l(l+n-2) is

    (L u)_i = (1/mu_i) [ w_{i+1/2} (u_{i+1}-u_i)/h - w_{i-1/2} (u_i-u_{i-1})/h ]
              - gamma_l u_i / f(r_i)^2

on the staggered grid r_i = r_min + (i-1/2) h, with cell measures
mu_i = omega f(r_i)^{n-1} e^{-phi(r_i)} h and face weights evaluated at
the cell interfaces.  Conservation form makes L exactly self-adjoint in
the mu inner product, so spectra come from a symmetric (tridiagonal or
periodic tridiagonal) matrix D^{1/2} L D^{-1/2}.

Boundary conditions: "neumann" and "pole" impose zero flux through the
boundary face (at a pole the face weight already vanishes with f();
"pole" additionally asserts that), "dirichlet" pins the face value to
zero through a mirrored ghost cell, and "periodic" identifies the two
end faces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh, eigh_tridiagonal

from .errors import ParameterError, SolverError
from .geometry import ModelManifold

__all__ = [
    "RadialGrid",
    "ModeOperator",
    "ModeEigs",
    "Spectrum",
    "build_grid",
    "build_operator",
    "restrict_grid",
    "default_bcs",
    "mode_multiplicity",
    "mode_spectrum",
    "full_spectrum",
    "rayleigh_quotient",
]

_BCS = ("neumann", "dirichlet", "pole", "periodic")


@dataclass(frozen=True)
class RadialGrid:
    """Staggered cell-centred grid with measure weights."""

    manifold: ModelManifold
    M: int
    h: float
    nodes: np.ndarray   # cell centers, shape (M,)
    faces: np.ndarray   # cell interfaces, shape (M+1,)
    mu: np.ndarray      # cell measures, shape (M,)
    face_w: np.ndarray  # face weights omega f^{n-1} e^{-phi}, shape (M+1,)

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.mu))

    def refine(self) -> "RadialGrid":
        return build_grid(self.manifold, 2 * self.M)

    def ball_nodes(self, radius: float, center: float | None = None) -> np.ndarray:
        """Indices of cells whose center lies within the given distance."""
        if center is None:
            center = self.manifold.center
        d = self.manifold.distance(self.nodes, center)
        return np.nonzero(d <= radius)[0]

    def nearest_node(self, r: float) -> int:
        return int(np.argmin(self.manifold.distance(self.nodes, r)))


def build_grid(manifold: ModelManifold, M: int) -> RadialGrid:
    if M < 4:
        raise ParameterError("grid needs at least 4 cells")
    lo, hi = manifold.domain.r_min, manifold.domain.r_max
    h = (hi - lo) / M
    faces = lo + h * np.arange(M + 1)
    nodes = lo + h * (np.arange(M) + 0.5)
    w = manifold.weight(nodes)
    mu = w * h
    face_w = manifold.weight(faces)
    if np.any(mu <= 0) or not np.all(np.isfinite(mu)):
        raise ParameterError("degenerate cell measure; check warp and density")
    return RadialGrid(manifold=manifold, M=M, h=h, nodes=nodes, faces=faces, mu=mu, face_w=face_w)


def restrict_grid(grid: RadialGrid, idx: np.ndarray) -> RadialGrid:
    """Contiguous sub-grid sharing the parent's cells."""
    idx = np.asarray(idx)
    if idx.size < 2 or not np.all(np.diff(idx) == 1):
        raise ParameterError("sub-grid cells must be contiguous")
    lo, hi = int(idx[0]), int(idx[-1]) + 1
    return RadialGrid(
        manifold=grid.manifold,
        M=hi - lo,
        h=grid.h,
        nodes=grid.nodes[lo:hi],
        faces=grid.faces[lo : hi + 1],
        mu=grid.mu[lo:hi],
        face_w=grid.face_w[lo : hi + 1],
    )


def default_bcs(manifold: ModelManifold):
    """Natural boundary conditions for each domain kind."""
    kind = manifold.domain.kind
    if kind == "circle":
        return "periodic"
    if kind == "interval":
        return ("neumann", "neumann")
    right = "pole" if manifold.has_far_pole else "neumann"
    return ("pole", right)


def mode_multiplicity(n: int, l: int) -> int:
    """Dimension of the angular eigenspace for mode l on S^{n-1}."""
    if l < 0:
        raise ParameterError("mode index must be nonnegative")
    if l == 0:
        return 1
    if n == 2:
        return 2
    num = (2 * l + n - 2) * math.factorial(l + n - 3)
    return num // (math.factorial(l) * math.factorial(n - 2))


@dataclass(frozen=True)
class ModeOperator:
    """Assembled mode operator.  Stores the symmetrised positive form.

    sym_diag/sym_off are the tridiagonal entries of A = D^{1/2}(-L)D^{-1/2};
    for periodic grids sym_corner couples the first and last cells.
    """

    grid: RadialGrid
    l: int
    bc: tuple | str
    sym_diag: np.ndarray
    sym_off: np.ndarray
    sym_corner: float
    gamma: float

    @property
    def M(self) -> int:
        return self.grid.M

    @property
    def periodic(self) -> bool:
        return self.bc == "periodic"

    def apply(self, u: np.ndarray) -> np.ndarray:
        """L u (the generator: nonpositive quadratic form)."""
        root = np.sqrt(self.grid.mu)
        q = root * np.asarray(u, dtype=float)
        Aq = self.sym_diag * q
        Aq[:-1] += self.sym_off * q[1:]
        Aq[1:] += self.sym_off * q[:-1]
        if self.periodic and self.sym_corner != 0.0:
            Aq[0] += self.sym_corner * q[-1]
            Aq[-1] += self.sym_corner * q[0]
        return -Aq / root

    def dense_matrix(self) -> np.ndarray:
        """Dense symmetrised positive matrix (small grids only)."""
        A = np.diag(self.sym_diag)
        idx = np.arange(self.M - 1)
        A[idx, idx + 1] = self.sym_off
        A[idx + 1, idx] = self.sym_off
        if self.periodic:
            A[0, -1] += self.sym_corner
            A[-1, 0] += self.sym_corner
        return A


def build_operator(manifold: ModelManifold, grid: RadialGrid, l: int = 0, bc=None) -> ModeOperator:
    if bc is None:
        bc = default_bcs(manifold)
    if isinstance(bc, str) and bc != "periodic":
        bc = (bc, bc)
    if bc == "periodic":
        if manifold.domain.kind != "circle":
            raise ParameterError("periodic conditions require a circle domain")
    else:
        for side in bc:
            if side not in ("neumann", "dirichlet", "pole"):
                raise ParameterError(f"unknown boundary condition {side!r}")

    h = grid.h
    mu = grid.mu
    M = grid.M
    gamma = float(l * (l + manifold.n - 2))
    w = grid.face_w.copy()

    corner = 0.0
    extra_diag = np.zeros(M)
    if bc == "periodic":
        # identify end faces; use the average in case of tiny profile mismatch
        w_end = 0.5 * (w[0] + w[-1])
        w[0] = w[-1] = w_end
    else:
        for side, face_idx, cell_idx in ((bc[0], 0, 0), (bc[1], M, M - 1)):
            if side == "pole":
                if abs(w[face_idx]) > 1e-8 * np.max(w):
                    raise ParameterError("pole condition at a face where f does not vanish")
                w[face_idx] = 0.0
            elif side == "neumann":
                w[face_idx] = 0.0
            else:  # dirichlet: ghost cell mirrored through the zero face value
                extra_diag[cell_idx] += 2.0 * w[face_idx] / (h * mu[cell_idx])
                w[face_idx] = 0.0

    inner = w[1:M] / h  # interior face conductances
    diag = np.zeros(M)
    diag[:-1] += inner / mu[:-1]
    diag[1:] += inner / mu[1:]
    off = -inner / np.sqrt(mu[:-1] * mu[1:])
    if bc == "periodic":
        we = w[0] / h
        diag[0] += we / mu[0]
        diag[-1] += we / mu[-1]
        corner = -we / math.sqrt(mu[0] * mu[-1])
    diag += extra_diag

    # reaction term from the angular eigenvalue
    f_nodes = manifold.f(grid.nodes)
    if gamma != 0.0:
        if np.any(np.abs(f_nodes) < 1e-300):
            raise ParameterError("angular mode on a degenerate warp")
        diag = diag + gamma / (f_nodes * f_nodes)

    return ModeOperator(
        grid=grid, l=l, bc=bc, sym_diag=diag, sym_off=off, sym_corner=corner, gamma=gamma
    )


@dataclass(frozen=True)
class ModeEigs:
    """Eigenpairs of one mode operator, mu-normalised, ascending."""

    l: int
    multiplicity: int
    values: np.ndarray   # shape (k,)
    vectors: np.ndarray  # shape (M, k), columns mu-orthonormal
    complete: bool       # all M discrete eigenvalues included


def mode_spectrum(op: ModeOperator, k_max: int | None = None) -> ModeEigs:
    """Smallest k_max eigenpairs of -L for one mode.

    Tridiagonal problems go through the symmetric tridiagonal solver;
    periodic ones use a dense solve up to M = 4096 and a shift-invert
    Lanczos iteration with a fixed start vector beyond that.
    """
    M = op.M
    if k_max is None or k_max >= M:
        k_max = M
    if k_max < 1:
        raise ParameterError("need at least one eigenpair")

    if not op.periodic:
        if k_max == M:
            vals, qs = eigh_tridiagonal(op.sym_diag, op.sym_off)
        else:
            vals, qs = eigh_tridiagonal(
                op.sym_diag, op.sym_off, select="i", select_range=(0, k_max - 1)
            )
    else:
        if M <= 4096:
            A = op.dense_matrix()
            if k_max == M:
                vals, qs = eigh(A)
            else:
                vals, qs = eigh(A, subset_by_index=(0, k_max - 1))
        else:
            # dense storage is the only cost driver here; the shifted
            # factorisation of the periodic tridiagonal stays O(M)
            from scipy.sparse import diags
            from scipy.sparse.linalg import eigsh

            if k_max > M // 4:
                raise SolverError("large periodic solve supports k_max << M only")
            A = diags(
                [op.sym_off, op.sym_diag, op.sym_off], offsets=[-1, 0, 1], format="lil"
            )
            A[0, M - 1] += op.sym_corner
            A[M - 1, 0] += op.sym_corner
            v0 = np.full(M, 1.0 / math.sqrt(M))
            vals, qs = eigsh(A.tocsc(), k=k_max, sigma=-1.0, which="LM", v0=v0)
            order = np.argsort(vals)
            vals, qs = vals[order], qs[:, order]

    root = np.sqrt(op.grid.mu)
    vectors = qs / root[:, None]
    # deterministic sign: largest-magnitude entry positive
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    vectors = vectors * signs[None, :]

    scale = max(1.0, float(np.max(np.abs(vals))))
    if op.bc != "periodic" and "dirichlet" not in (op.bc if isinstance(op.bc, tuple) else ()):
        if vals[0] < -1e-8 * scale:
            raise SolverError(f"nonnegative spectrum expected, got lambda_0 = {vals[0]}")
    mult = mode_multiplicity(op.grid.manifold.n, op.l)
    return ModeEigs(
        l=op.l,
        multiplicity=mult,
        values=np.asarray(vals, dtype=float),
        vectors=vectors,
        complete=(k_max == M),
    )


@dataclass(frozen=True)
class Spectrum:
    """Merged spectrum across angular modes.

    lam/l_of/j_of/mult are aligned arrays sorted by (lambda, l, j); each
    row represents one radial eigenfunction carried with its angular
    multiplicity.  threshold is the completeness level: every discrete
    eigenvalue at or below it appears in the table.
    """

    grid: RadialGrid
    modes: dict
    lam: np.ndarray
    l_of: np.ndarray
    j_of: np.ndarray
    mult: np.ndarray
    threshold: float

    def counted_values(self, count: int) -> np.ndarray:
        """First `count` eigenvalues with multiplicities expanded."""
        out = np.repeat(self.lam, self.mult)
        if count > out.size:
            raise ParameterError(f"spectrum holds only {out.size} counted values")
        out = out[:count]
        if out[-1] > self.threshold:
            raise SolverError(
                "requested eigenvalues beyond the completeness threshold; "
                "raise l_max or k_per_mode"
            )
        return out

    @property
    def mode_list(self):
        return [self.modes[l] for l in sorted(self.modes)]


def full_spectrum(
    manifold: ModelManifold,
    grid: RadialGrid,
    l_max: int = 0,
    k_per_mode: int | None = None,
    bc=None,
) -> Spectrum:
    """Merged spectrum of the full operator up to angular mode l_max.

    Interval and circle models are one-dimensional, so l_max must be 0
    there and the spectrum is complete up to the per-mode truncation.
    On pole caps the completeness threshold also folds in the reaction
    floor gamma_{l_max+1} / max f^2 of the first omitted angular mode.
    """
    if manifold.domain.kind != "pole_cap" and l_max != 0:
        raise ParameterError("only pole cap models carry separate angular modes")
    if l_max < 0:
        raise ParameterError("l_max must be nonnegative")

    modes = {}
    threshold = math.inf
    for l in range(l_max + 1):
        op = build_operator(manifold, grid, l=l, bc=bc)
        eigs = mode_spectrum(op, k_max=k_per_mode)
        modes[l] = eigs
        if not eigs.complete:
            threshold = min(threshold, float(eigs.values[-1]))

    if manifold.domain.kind == "pole_cap":
        f2 = np.max(manifold.f(grid.nodes) ** 2)
        l_next = l_max + 1
        gamma_next = l_next * (l_next + manifold.n - 2)
        threshold = min(threshold, gamma_next / f2)

    lam, l_of, j_of, mult = [], [], [], []
    for l, eigs in modes.items():
        for j, v in enumerate(eigs.values):
            lam.append(float(v))
            l_of.append(l)
            j_of.append(j)
            mult.append(eigs.multiplicity)
    order = sorted(range(len(lam)), key=lambda i: (lam[i], l_of[i], j_of[i]))
    return Spectrum(
        grid=grid,
        modes=modes,
        lam=np.array([lam[i] for i in order]),
        l_of=np.array([l_of[i] for i in order], dtype=int),
        j_of=np.array([j_of[i] for i in order], dtype=int),
        mult=np.array([mult[i] for i in order], dtype=int),
        threshold=threshold,
    )


def rayleigh_quotient(op: ModeOperator, u: np.ndarray) -> float:
    """<-L u, u>_mu / <u, u>_mu through the symmetrised form."""
    u = np.asarray(u, dtype=float)
    q = np.sqrt(op.grid.mu) * u
    Aq = -np.sqrt(op.grid.mu) * op.apply(u)
    den = float(np.dot(q, q))
    if den == 0.0:
        raise ParameterError("zero field in Rayleigh quotient")
    return float(np.dot(q, Aq)) / den
