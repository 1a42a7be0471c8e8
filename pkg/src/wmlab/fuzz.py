"""Seeded random scenarios inside the admissible density band.

A fuzz sample perturbs a catalog model in two ways:

    density   phi = phi0 + sum_{j<=6} a_j sin(w_j (r - r_min) + theta_j)
    warp      f   = f0 (r) (1 + sum_{j<=3} b_j sin^2(j pi r / L))

with ||a||_1 capped so the perturbation multiplies the density band
ratio b/a by at most 10 (a flat base then stays at or below 10) and
||b||_1 < 1 so the warp stays positive.  Frequencies w_j are j pi/L on
intervals and caps but full turns 2 pi j/L on circles, so circle draws
are periodic by construction; cap phases are pinned to pi/2 so the
density is flat at poles.  Six modes keep the C^2 norm within what the
default grid resolves.

After each draw the curvature floor K is re-derived from the pointwise
diagonal scan, so every sample enters its audits with a hypothesis that
holds by construction: a literal-bound failure in a campaign is a
finding about the bound, never a stale parameter.  Draws whose floor
saturates the exponential growth factors (possible on strongly
confining bases, where the conformal weight amplifies a small negative
second derivative by e^{4 phi}) are rejected: their audits would pass
at the float ceiling and verify nothing.

Samples are pure functions of (base tag, seed, amplitudes).  A campaign
at seed s audits seeds s, s+1, ... in order and merges reports
deterministically, so reruns are byte-identical modulo timing.  Zero
amplitudes reproduce the catalog scenario exactly.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .audits import AuditContext
from .catalog import (
    CATALOG_TAGS,
    catalog_defaults,
    catalog_manifold,
    catalog_params,
)
from .errors import ConfigError, ParameterError
from .geometry import (
    ConstProfile,
    CurvatureParams,
    FourierProfile,
    ModelManifold,
    PerturbedWarp,
    SumProfile,
    _as_N,
    derive_curvature_floor,
    validate_eps_range,
)
from .scenario import (
    ReportBundle,
    default_audit_list,
    environment_fingerprint,
    load_config,
    merge_bundles,
    run_audits,
    write_bundle,
)

__all__ = [
    "N_DENSITY_MODES",
    "N_WARP_MODES",
    "BAND_RATIO_CAP",
    "REJECTION_LIMIT",
    "FuzzSample",
    "band_amplitude_cap",
    "draw_sample",
    "fuzz_campaign",
    "fuzz",
]

N_DENSITY_MODES = 6
N_WARP_MODES = 3
BAND_RATIO_CAP = 10.0
REJECTION_LIMIT = 100


@dataclass(frozen=True)
class FuzzSample:
    """One drawn scenario: perturbed manifold plus derived parameters."""

    scenario: str
    manifold: ModelManifold
    params: CurvatureParams
    meta: dict


def band_amplitude_cap(n: int, eps: float) -> float:
    """Largest ||a||_1 keeping the density band ratio at or below 10.

    The band function is e^{2(1-eps)phi/(n-1)} and a sine sum swings at
    most 2||a||_1, so the cap solves e^{4|1-eps| ||a||_1/(n-1)} = 10.
    At eps = 1 the band is identically 1 and the cap reverts to a plain
    smoothness budget.
    """
    if abs(1.0 - eps) < 1e-12:
        return 1.0
    return (n - 1) * math.log(BAND_RATIO_CAP) / (4.0 * abs(1.0 - eps))


def _density_terms(base: ModelManifold, amps, phases):
    """(amplitude, frequency, phase) triples in the domain coordinate."""
    lo = base.domain.r_min
    span = base.domain.r_max - lo
    circle = base.domain.kind == "circle"
    terms = []
    for j, (a, theta) in enumerate(zip(amps, phases), start=1):
        w = (2.0 * math.pi * j / span) if circle else (math.pi * j / span)
        if base.domain.kind == "pole_cap":
            theta = 0.5 * math.pi
        terms.append((a, w, theta - w * lo))
    return terms


def draw_sample(
    tag: str,
    seed: int,
    density_amplitude: float = 1.0,
    warp_amplitude: float = 0.2,
    N=None,
    eps: float | None = None,
) -> FuzzSample:
    """Draw one admissible perturbation of a catalog model.

    Amplitudes are fractions: `density_amplitude` scales the band cap,
    `warp_amplitude` caps ||b||_1 and must stay below 1.  Either at 0
    switches that perturbation off; both at 0 return the catalog
    scenario itself.  Draws failing validation are rejected and redrawn
    up to REJECTION_LIMIT times before a seed-specific error.
    """
    if tag not in CATALOG_TAGS:
        raise ConfigError(f"unknown catalog tag {tag!r}; known: {', '.join(CATALOG_TAGS)}")
    if not 0.0 <= density_amplitude <= 1.0:
        raise ConfigError("density_amplitude: must lie in [0, 1]")
    if not 0.0 <= warp_amplitude < 1.0:
        raise ConfigError("warp_amplitude: must lie in [0, 1)")
    base = catalog_manifold(tag)
    scenario = f"{tag}-fuzz-{seed:04d}"

    cat_N, cat_eps, _ = catalog_defaults(tag)
    eps_val = float(cat_eps if eps is None else eps)
    if N is None:
        N_val = cat_N
        # a nonconstant density forces the dimension-free setting when the
        # catalog default sits at N = n
        if density_amplitude > 0.0 and _as_N(cat_N) == base.n:
            N_val = math.inf
    else:
        N_val = N
    if density_amplitude > 0.0 and _as_N(N_val) == base.n:
        raise ConfigError("params.N: N = n forces a constant density; "
                          "fuzzed densities need N > n or \"inf\"")
    ok, bound = validate_eps_range(N_val, base.n, eps_val)
    if not ok:
        raise ConfigError(f"params.eps: outside the admissible range (|eps| < {bound:.6g})")

    if density_amplitude == 0.0 and warp_amplitude == 0.0:
        params = catalog_params(tag, base, N=N, eps=eps)
        meta = {"tag": tag, "seed": seed, "density_l1": 0.0, "warp_l1": 0.0,
                "attempts": 0, "K": params.K, "band_ratio": params.b / params.a}
        return FuzzSample(scenario=scenario, manifold=base, params=params, meta=meta)

    rng = np.random.default_rng(seed)
    span = base.domain.r_max - base.domain.r_min
    cap = density_amplitude * band_amplitude_cap(base.n, eps_val)
    flat_base = isinstance(base.density, ConstProfile) and base.density.value == 0.0
    # the cap bounds the perturbation's multiplicative band factor; a
    # non-flat base (its own ratio can be large) is measured relative
    base_band = 1.0
    if not flat_base:
        bp = CurvatureParams.derive(base, N_val, eps_val, 0.0)
        base_band = bp.b / bp.a
    reason = "no draw attempted"
    for attempt in range(1, REJECTION_LIMIT + 1):
        raw = rng.uniform(-1.0, 1.0, N_DENSITY_MODES)
        phases = rng.uniform(0.0, 2.0 * math.pi, N_DENSITY_MODES)
        a_l1 = cap * rng.uniform(0.3, 1.0)
        warp_raw = rng.uniform(-1.0, 1.0, N_WARP_MODES)
        b_l1 = warp_amplitude * rng.uniform(0.3, 1.0)

        density = base.density
        if density_amplitude > 0.0:
            amps = raw * (a_l1 / np.sum(np.abs(raw)))
            fourier = FourierProfile(_density_terms(base, amps, phases))
            density = fourier if flat_base else SumProfile(base.density, fourier)
        warp = base.warp
        if warp_amplitude > 0.0:
            coeffs = warp_raw * (b_l1 / np.sum(np.abs(warp_raw)))
            warp = PerturbedWarp(base.warp, coeffs, span)

        try:
            man = ModelManifold(
                n=base.n,
                domain=base.domain,
                warp=warp,
                density=density,
                name=scenario,
                homogeneous=False,
                truncated=base.truncated,
            )
            K = derive_curvature_floor(man, N_val, eps_val)
            if not math.isfinite(K):
                reason = "curvature floor not finite"
                continue
            params = CurvatureParams.derive(man, N_val, eps_val, K)
        except ParameterError as exc:
            reason = str(exc)
            continue
        band_factor = (params.b / params.a) / base_band
        if band_factor > BAND_RATIO_CAP * (1.0 + 1e-9):
            reason = f"band factor {band_factor:.3g} above {BAND_RATIO_CAP}"
            continue
        # floors like -1e60 (a confining density whose second derivative
        # dips below zero far out) saturate every growth factor; the
        # audits would all pass at the float ceiling, which verifies
        # nothing, so such draws are rejected as inadmissible
        if math.sqrt(max(0.0, -K) / params.c) * span / params.a > 700.0:
            reason = (f"curvature floor {K:.3g} saturates the growth factors; "
                      "a lower density_amplitude keeps the floor tame")
            continue
        meta = {
            "tag": tag,
            "seed": seed,
            "density_l1": 0.0 if density_amplitude == 0.0 else float(a_l1),
            "warp_l1": 0.0 if warp_amplitude == 0.0 else float(b_l1),
            "attempts": attempt,
            "K": params.K,
            "band_ratio": params.b / params.a,
        }
        return FuzzSample(scenario=scenario, manifold=man, params=params, meta=meta)
    raise ConfigError(
        f"seed {seed}: no admissible sample after {REJECTION_LIMIT} rejections ({reason})"
    )


def fuzz_campaign(
    tag: str = "sphere2",
    count: int = 50,
    seed: int = 0,
    M: int = 256,
    audits=None,
    N=None,
    eps: float | None = None,
    density_amplitude: float = 1.0,
    warp_amplitude: float = 0.2,
) -> ReportBundle:
    """Audit `count` seeded samples of a catalog base and merge reports.

    Sample k uses seed `seed + k` and scenario id `{tag}-fuzz-{seed+k}`.
    `audits` is an [(id, options)] list; None runs every audit
    applicable to the base domain kind.  The merged bundle's fingerprint
    carries per-sample draw metadata.
    """
    if count < 1:
        raise ConfigError("count: must be >= 1")
    t0 = time.perf_counter()
    bundles = []
    metas = []
    for k in range(count):
        sample = draw_sample(
            tag,
            seed + k,
            density_amplitude=density_amplitude,
            warp_amplitude=warp_amplitude,
            N=N,
            eps=eps,
        )
        ctx = AuditContext(sample.manifold, sample.params, M=M, seed=seed + k,
                           scenario=sample.scenario)
        entries = audits if audits is not None else default_audit_list(sample.manifold)
        reports, timing = run_audits(ctx, entries)
        metas.append(sample.meta)
        bundles.append(ReportBundle(
            scenario=sample.scenario,
            reports=reports,
            fingerprint={},
            timing={"per_audit_s": timing},
        ))
    merged = merge_bundles(bundles, scenario=f"{tag}-fuzz")
    merged.fingerprint = environment_fingerprint({"M": M, "l_max": None, "k_per_mode": None}, seed)
    merged.fingerprint["fuzz"] = {
        "base": tag,
        "count": count,
        "density_amplitude": density_amplitude,
        "warp_amplitude": warp_amplitude,
        "samples": metas,
    }
    merged.timing = {"total_s": time.perf_counter() - t0}
    return merged


def fuzz(config, count: int, density_amplitude: float = 1.0,
         warp_amplitude: float = 0.2) -> ReportBundle:
    """Campaign entry point over a scenario config.

    The config names the catalog base, grid, seed, audit list, and
    output; K must be absent or "derive" since every sample re-derives
    its own floor.
    """
    config = load_config(config)
    if not isinstance(config.manifold, str):
        raise ConfigError("manifold: fuzzing needs a catalog tag as the base")
    p = config.params
    if p.get("K") not in (None, "derive"):
        raise ConfigError('params.K: fuzz re-derives K per sample; drop it or use "derive"')
    bundle = fuzz_campaign(
        tag=config.manifold,
        count=count,
        seed=config.seed,
        M=config.grid["M"],
        audits=config.audits,
        N=p.get("N"),
        eps=p.get("eps"),
        density_amplitude=density_amplitude,
        warp_amplitude=warp_amplitude,
    )
    if config.out_dir is not None:
        write_bundle(bundle, config.out_dir, config.out_format)
    return bundle
