"""Discretised mode operators and their spectra.

Reference eigenvalues are the classical closed forms: Neumann interval
(k pi / L)^2, periodic circle k^2 with multiplicity 2, Dirichlet
interval k^2 for k >= 1, harmonic-weight interval 2k (ladder spacing
of the quadratic-density generator), round sphere j(j+1).
"""

import math

import numpy as np
import pytest

from wmlab.catalog import catalog_manifold
from wmlab.errors import ParameterError, SolverError
from wmlab.operators import (
    build_grid,
    build_operator,
    default_bcs,
    full_spectrum,
    mode_multiplicity,
    mode_spectrum,
    rayleigh_quotient,
)


def spectrum_error(tag, M, k_take, exact, bc=None):
    man = catalog_manifold(tag)
    grid = build_grid(man, M)
    op = build_operator(man, grid, l=0, bc=bc)
    eigs = mode_spectrum(op, k_max=k_take + 2)
    return np.abs(eigs.values[: len(exact)] - exact)


def test_interval_neumann_eigenvalues_second_order():
    """lambda_k = k^2 on [0, pi]; error at fixed k decays like h^2.
    Order fitted across M = 64, 128, 256 must be 2 within 0.25."""
    exact = np.arange(6, dtype=float) ** 2
    errs = []
    for M in (64, 128, 256):
        e = spectrum_error("interval", M, 6, exact)
        assert e[0] < 1e-10
        errs.append(np.max(e[1:]))
    order1 = math.log2(errs[0] / errs[1])
    order2 = math.log2(errs[1] / errs[2])
    assert abs(order1 - 2.0) < 0.25
    assert abs(order2 - 2.0) < 0.25


def test_circle_spectrum_doubles():
    """Periodic eigenvalues are 0, then k^2 twice each."""
    man = catalog_manifold("circle")
    grid = build_grid(man, 512)
    op = build_operator(man, grid)
    eigs = mode_spectrum(op, k_max=9)
    exact = np.array([0.0, 1.0, 1.0, 4.0, 4.0, 9.0, 9.0, 16.0, 16.0])
    assert np.max(np.abs(eigs.values - exact)) < 5e-3
    assert eigs.values[0] < 1e-10


def test_interval_dirichlet_eigenvalues():
    """Dirichlet on [0, pi]: k^2 for k = 1, 2, 3, ... (no zero mode)."""
    exact = np.array([1.0, 4.0, 9.0, 16.0])
    e = spectrum_error("interval", 512, 4, exact, bc=("dirichlet", "dirichlet"))
    assert np.max(e) < 2e-3


def test_quadratic_density_ladder():
    """phi = r^2 on a line segment gives the evenly spaced ladder
    lambda_k = 2k; truncation at |r| = 6 perturbs k <= 10 by < 1e-3."""
    man = catalog_manifold("gaussian-density-interval")
    grid = build_grid(man, 2048)
    op = build_operator(man, grid)
    eigs = mode_spectrum(op, k_max=12)
    exact = 2.0 * np.arange(11, dtype=float)
    rel = np.abs(eigs.values[:11] - exact) / np.maximum(exact, 1.0)
    assert np.max(rel) < 1e-3


def test_operator_is_self_adjoint_for_the_weighted_measure():
    """<L u, v>_mu = <u, L v>_mu for random fields, 20 seeded draws."""
    rng = np.random.default_rng(5)
    for tag in ("sphere2", "circle", "gaussian-density-interval"):
        man = catalog_manifold(tag)
        grid = build_grid(man, 128)
        op = build_operator(man, grid)
        for _ in range(20):
            u = rng.standard_normal(grid.M)
            v = rng.standard_normal(grid.M)
            left = float(np.dot(op.apply(u), v * grid.mu))
            right = float(np.dot(u * grid.mu, op.apply(v)))
            scale = float(np.max(np.abs(op.apply(u)))) + 1.0
            assert abs(left - right) < 1e-9 * scale


def test_operator_form_is_nonpositive():
    """<L u, u>_mu <= 0: the generator dissipates energy."""
    rng = np.random.default_rng(17)
    man = catalog_manifold("sphere2")
    grid = build_grid(man, 128)
    op = build_operator(man, grid)
    for _ in range(20):
        u = rng.standard_normal(grid.M)
        assert float(np.dot(op.apply(u), u * grid.mu)) <= 1e-10


def test_mode_multiplicity_formulas():
    """n=2: 1, 2, 2, ...; n=3: 2l+1; n=4: (l+1)^2 (standard counts)."""
    assert [mode_multiplicity(2, l) for l in range(4)] == [1, 2, 2, 2]
    assert [mode_multiplicity(3, l) for l in range(5)] == [1, 3, 5, 7, 9]
    assert [mode_multiplicity(4, l) for l in range(4)] == [1, 4, 9, 16]
    with pytest.raises(ParameterError):
        mode_multiplicity(3, -1)


def test_sphere_spectrum_multiplicities():
    """Round S^2: lambda = j(j+1) with multiplicity 2j+1; the merged
    table must reproduce the first 20 counted values exactly."""
    man = catalog_manifold("sphere2")
    grid = build_grid(man, 1024)
    spec = full_spectrum(man, grid, l_max=4, k_per_mode=8)
    got = spec.counted_values(20)
    exact = []
    j = 0
    while len(exact) < 20:
        exact.extend([j * (j + 1)] * (2 * j + 1))
        j += 1
    exact = np.array(exact[:20], dtype=float)
    assert np.max(np.abs(got - exact) / np.maximum(exact, 1.0)) < 5e-3
    # exact degeneracy ordering: value 2 appears 3 times, 6 five times
    assert np.sum(np.abs(got - 2.0) < 0.05) == 3
    assert np.sum(np.abs(got - 6.0) < 0.15) == 5


def test_counted_values_threshold_guard():
    """Asking past the completeness threshold must raise, not return
    silently wrong trailing values."""
    man = catalog_manifold("sphere2")
    grid = build_grid(man, 256)
    spec = full_spectrum(man, grid, l_max=2, k_per_mode=4)
    spec.counted_values(9)
    with pytest.raises((SolverError, ParameterError)):
        spec.counted_values(2000)


def test_rayleigh_quotient_matches_eigenvalue():
    man = catalog_manifold("interval")
    grid = build_grid(man, 256)
    op = build_operator(man, grid)
    eigs = mode_spectrum(op, k_max=4)
    for j in (1, 2, 3):
        rq = rayleigh_quotient(op, eigs.vectors[:, j])
        assert abs(rq - eigs.values[j]) < 1e-8 * max(1.0, eigs.values[j])


def test_default_bcs_by_domain():
    assert default_bcs(catalog_manifold("circle")) == "periodic"
    assert default_bcs(catalog_manifold("interval")) == ("neumann", "neumann")
    assert default_bcs(catalog_manifold("sphere2")) == ("pole", "pole")
    assert default_bcs(catalog_manifold("euclidean2")) == ("pole", "neumann")
