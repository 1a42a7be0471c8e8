"""Scenario configuration, audit orchestration, and report bundles.

A scenario is one manifold with curvature parameters plus an ordered
audit list.  Configs are JSON:

    {
      "scenario": "sphere2-constdensity",
      "manifold": "sphere2",                 // catalog tag, or an object:
      // "manifold": {"kind": "interval", "r_min": -6, "r_max": 6, "n": 2,
      //              "warp": "unit", "density": {"poly": [0, 0, 1]}},
      "params": {"N": 2, "eps": 0.0, "K": 1.0},   // K may be "derive"
      "grid": {"M": 512, "l_max": 8, "k_per_mode": null},
      "audits": ["volume-ratio", {"id": "poincare-neumann", "options": {"R": 0.5}}],
      "seed": 0,
      "out": {"dir": "results", "format": "both"}
    }

Defaults for every optional field: scenario = manifold name; params from
the catalog entry (custom manifolds: N = "inf", eps = 0, K = "derive");
grid M = 512 with l_max and k_per_mode unset (audits pick their own mode
counts; the explicit values drive the spectrum/kernel dump commands);
audits = every audit applicable to the domain kind; seed = 0; no output
directory.

Audits run sequentially in list order over one shared context; each is a
pure function of (scenario, grid, seed), so report content is
deterministic and bundles differ only in the timing block.  A solver or
applicability error inside an audit is converted into a failed report
carrying the error text, so campaign runs always produce a complete
bundle.
"""

from __future__ import annotations

import csv
import json
import math
import platform
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy

from .audits import (
    AuditContext,
    BoundReport,
    audit_cross_center,
    audit_davies,
    audit_doubling,
    audit_eigenvalue_lower,
    audit_gaussian_lower,
    audit_gaussian_upper,
    audit_harnack,
    audit_j_interval,
    audit_kernel_single_center,
    audit_laplacian_comparison,
    audit_li_yau,
    audit_mean_value,
    audit_poincare,
    audit_sobolev,
    audit_stochastic_completeness,
    audit_volume_comparison,
)
from .catalog import CATALOG_TAGS, catalog_defaults, catalog_manifold, catalog_params
from .errors import AuditError, ConfigError, ParameterError, SolverError
from .geometry import (
    ConstProfile,
    CurvatureParams,
    Domain,
    EuclideanWarp,
    ExprProfile,
    FourierProfile,
    HyperbolicWarp,
    ModelManifold,
    PolyProfile,
    ScaledWarp,
    SphereWarp,
    UnitWarp,
    derive_curvature_floor,
    validate_eps_range,
)

__all__ = [
    "SCHEMA_VERSION",
    "CSV_COLUMNS",
    "AUDIT_REGISTRY",
    "ScenarioConfig",
    "ReportBundle",
    "default_audit_list",
    "load_config",
    "build_scenario",
    "run_audits",
    "run_scenario",
    "merge_bundles",
    "bundle_from_dict",
    "write_bundle",
    "write_csv",
    "write_json",
]

SCHEMA_VERSION = "1.0"

CSV_COLUMNS = (
    "bound_id",
    "scenario",
    "n_samples",
    "empirical_constant",
    "margin",
    "pass",
    "notes",
)

AUDIT_REGISTRY = {
    "laplacian-comparison": audit_laplacian_comparison,
    "volume-ratio": audit_volume_comparison,
    "volume-doubling": audit_doubling,
    "volume-cross-center": audit_cross_center,
    "poincare-neumann": audit_poincare,
    "sobolev-ball": audit_sobolev,
    "mean-value": audit_mean_value,
    "harnack": audit_harnack,
    "gaussian-upper": audit_gaussian_upper,
    "gaussian-lower": audit_gaussian_lower,
    "kernel-single-center": audit_kernel_single_center,
    "davies-two-set": audit_davies,
    "eigenvalue-growth": audit_eigenvalue_lower,
    "j-interval": audit_j_interval,
    "li-yau-damped": audit_li_yau,
    "kernel-mass-sandwich": audit_stochastic_completeness,
}

_REGISTRY_RANK = {aid: i for i, aid in enumerate(AUDIT_REGISTRY)}


def default_audit_list(manifold: ModelManifold) -> list:
    """Every audit applicable to the manifold's domain kind, in canonical
    order.  The radial mean-curvature comparison needs a pole; the
    cross-center volume bound needs two distinct computable centers."""
    ids = list(AUDIT_REGISTRY)
    kind = manifold.domain.kind
    if kind != "pole_cap":
        ids.remove("laplacian-comparison")
    if kind == "pole_cap" and not manifold.has_far_pole:
        ids.remove("volume-cross-center")
    return [(aid, {}) for aid in ids]


# ---------------------------------------------------------------------------
# config parsing


@dataclass
class ScenarioConfig:
    manifold: object        # catalog tag or manifold spec dict
    scenario: str
    params: dict            # N, eps, K (K may be "derive")
    grid: dict              # M, l_max, k_per_mode
    audits: list | None     # [(id, options)] or None for the default list
    seed: int
    out_dir: str | None
    out_format: str


def _expect(cond: bool, field: str, msg: str):
    if not cond:
        raise ConfigError(f"{field}: {msg}")


def _expect_keys(d: dict, allowed, field: str):
    extra = sorted(set(d) - set(allowed))
    _expect(not extra, field, f"unknown keys {extra}; allowed: {sorted(allowed)}")


def load_config(source) -> ScenarioConfig:
    """Parse and validate a scenario config.

    `source` is a dict, a JSON string, or a path to a JSON file.  Errors
    name the offending field; JSON syntax errors keep the parser's
    line/column message.
    """
    if isinstance(source, ScenarioConfig):
        return source
    if isinstance(source, (str, Path)) and (
        isinstance(source, Path) or not source.lstrip().startswith("{")
    ):
        path = Path(source)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        source = text
    if isinstance(source, str):
        try:
            source = json.loads(source)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
    _expect(isinstance(source, dict), "config", "top level must be a JSON object")
    _expect_keys(source, ("scenario", "manifold", "params", "grid", "audits", "seed", "out"), "config")

    _expect("manifold" in source, "manifold", "required field is missing")
    man_spec = source["manifold"]
    if isinstance(man_spec, str):
        _expect(man_spec in CATALOG_TAGS, "manifold",
                f"unknown catalog tag {man_spec!r}; known: {', '.join(CATALOG_TAGS)}")
    else:
        _expect(isinstance(man_spec, dict), "manifold", "must be a catalog tag or an object")

    params = source.get("params", {})
    _expect(isinstance(params, dict), "params", "must be an object")
    _expect_keys(params, ("N", "eps", "K"), "params")
    if "eps" in params:
        _expect(isinstance(params["eps"], (int, float)), "params.eps", "must be a number")
    if "N" in params:
        _expect(
            isinstance(params["N"], (int, float)) or params["N"] in ("inf", "+inf", "infinity"),
            "params.N", 'must be a number or "inf"',
        )
    if "K" in params:
        _expect(isinstance(params["K"], (int, float)) or params["K"] == "derive",
                "params.K", 'must be a number or "derive"')

    grid = dict(source.get("grid", {}))
    _expect(isinstance(grid, dict), "grid", "must be an object")
    _expect_keys(grid, ("M", "l_max", "k_per_mode"), "grid")
    M = grid.get("M", 512)
    _expect(isinstance(M, int) and M >= 8, "grid.M", "must be an integer >= 8")
    for key in ("l_max", "k_per_mode"):
        v = grid.get(key)
        _expect(v is None or (isinstance(v, int) and v >= 0), f"grid.{key}",
                "must be null or a nonnegative integer")
    grid = {"M": M, "l_max": grid.get("l_max"), "k_per_mode": grid.get("k_per_mode")}

    audits = source.get("audits")
    entries = None
    if audits is not None:
        _expect(isinstance(audits, list) and audits, "audits", "must be a nonempty list")
        entries = []
        for i, entry in enumerate(audits):
            field = f"audits[{i}]"
            if isinstance(entry, str):
                aid, options = entry, {}
            else:
                _expect(isinstance(entry, dict), field, "must be a string id or an object")
                _expect_keys(entry, ("id", "options"), field)
                _expect("id" in entry, field, 'missing "id"')
                aid = entry["id"]
                options = entry.get("options", {})
                _expect(isinstance(options, dict), f"{field}.options", "must be an object")
            _expect(aid in AUDIT_REGISTRY, field,
                    f"unknown audit {aid!r}; known: {', '.join(AUDIT_REGISTRY)}")
            entries.append((aid, dict(options)))

    seed = source.get("seed", 0)
    _expect(isinstance(seed, int), "seed", "must be an integer")

    out = source.get("out", {})
    _expect(isinstance(out, dict), "out", "must be an object")
    _expect_keys(out, ("dir", "format"), "out")
    out_format = out.get("format", "both")
    _expect(out_format in ("csv", "json", "both"), "out.format",
            'must be one of "csv", "json", "both"')

    default_name = man_spec if isinstance(man_spec, str) else man_spec.get("name", "custom")
    scenario = source.get("scenario", default_name)
    _expect(isinstance(scenario, str) and scenario, "scenario", "must be a nonempty string")

    return ScenarioConfig(
        manifold=man_spec,
        scenario=scenario,
        params=dict(params),
        grid=grid,
        audits=entries,
        seed=seed,
        out_dir=out.get("dir"),
        out_format=out_format,
    )


# ---------------------------------------------------------------------------
# manifold construction from a spec object

_WARPS = {
    "euclidean": EuclideanWarp,
    "sphere": SphereWarp,
    "hyperbolic": HyperbolicWarp,
    "unit": UnitWarp,
}


def _build_profile(spec, field: str):
    if isinstance(spec, (int, float)):
        return ConstProfile(float(spec))
    _expect(isinstance(spec, dict), field, "must be a number or an object")
    _expect(len(spec) == 1, field, 'needs exactly one of "const", "poly", "expr", "fourier"')
    kind, payload = next(iter(spec.items()))
    if kind == "const":
        _expect(isinstance(payload, (int, float)), f"{field}.const", "must be a number")
        return ConstProfile(float(payload))
    if kind == "poly":
        _expect(isinstance(payload, list) and payload, f"{field}.poly",
                "must be a coefficient list (increasing degree)")
        return PolyProfile(payload)
    if kind == "expr":
        _expect(isinstance(payload, str), f"{field}.expr", "must be an expression in r")
        return ExprProfile(payload)
    if kind == "fourier":
        _expect(isinstance(payload, list), f"{field}.fourier",
                "must be a list of [amplitude, frequency, phase] triples")
        return FourierProfile([tuple(t) for t in payload])
    raise ConfigError(f"{field}: unknown profile kind {kind!r}")


def _build_warp(spec, field: str):
    if isinstance(spec, str):
        _expect(spec in _WARPS, field, f"unknown warp {spec!r}; named warps: {sorted(_WARPS)}")
        return _WARPS[spec]()
    _expect(isinstance(spec, dict), field, "must be a warp name or an object")
    if "scaled" in spec and len(spec) == 1:
        inner = spec["scaled"]
        _expect(isinstance(inner, dict) and "base" in inner and "factor" in inner,
                f"{field}.scaled", 'needs "base" and "factor"')
        return ScaledWarp(_build_warp(inner["base"], f"{field}.scaled.base"),
                          float(inner["factor"]))
    return _build_profile(spec, field)


def _build_manifold(spec: dict) -> ModelManifold:
    _expect_keys(
        spec,
        ("kind", "r_min", "r_max", "n", "warp", "density", "name", "homogeneous", "truncated"),
        "manifold",
    )
    _expect("kind" in spec, "manifold.kind", "required field is missing")
    _expect("r_max" in spec, "manifold.r_max", "required field is missing")
    kind = spec["kind"]
    n = spec.get("n", 2)
    _expect(isinstance(n, int) and n >= 2, "manifold.n", "must be an integer >= 2")
    default_warp = "euclidean" if kind == "pole_cap" else "unit"
    try:
        domain = Domain(kind, float(spec.get("r_min", 0.0)), float(spec["r_max"]))
        return ModelManifold(
            n=n,
            domain=domain,
            warp=_build_warp(spec.get("warp", default_warp), "manifold.warp"),
            density=_build_profile(spec.get("density", 0.0), "manifold.density"),
            name=spec.get("name", "custom"),
            homogeneous=bool(spec.get("homogeneous", False)),
            truncated=bool(spec.get("truncated", False)),
        )
    except ParameterError as exc:
        raise ConfigError(f"manifold: {exc}") from exc


def build_scenario(config: ScenarioConfig):
    """(manifold, params) for a validated config."""
    if isinstance(config.manifold, str):
        man = catalog_manifold(config.manifold)
        p = config.params
        K = p.get("K")
        if K == "derive":
            K = derive_curvature_floor(man, p.get("N", _catalog_N(config.manifold)),
                                       p.get("eps", 0.0))
        try:
            return man, catalog_params(config.manifold, man, N=p.get("N"),
                                       eps=p.get("eps"), K=K)
        except ParameterError as exc:
            raise ConfigError(f"params: {exc}") from exc
    man = _build_manifold(config.manifold)
    p = config.params
    N = p.get("N", "inf")
    eps = float(p.get("eps", 0.0))
    K = p.get("K", "derive")
    try:
        if K == "derive":
            K = derive_curvature_floor(man, N, eps)
        return man, CurvatureParams.derive(man, N, eps, float(K))
    except ParameterError as exc:
        raise ConfigError(f"params: {exc}") from exc


def _catalog_N(tag: str):
    return catalog_defaults(tag)[0]


# ---------------------------------------------------------------------------
# execution


@dataclass
class ReportBundle:
    scenario: str
    reports: list
    fingerprint: dict
    timing: dict

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.reports)

    @property
    def n_failed(self) -> int:
        return sum(not r.passed for r in self.reports)

    def to_dict(self, include_timing: bool = True) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "scenario": self.scenario,
            "fingerprint": self.fingerprint,
            "summary": {
                "n_reports": len(self.reports),
                "n_failed": self.n_failed,
                "n_vacuous": sum(r.vacuous for r in self.reports),
                "all_passed": self.all_passed,
            },
            "reports": [r.to_dict() for r in self.reports],
        }
        if include_timing:
            out["timing"] = self.timing
        return out

    def json_text(self, include_timing: bool = True) -> str:
        return json.dumps(_scrub(self.to_dict(include_timing)), indent=2, sort_keys=True) + "\n"


def _scrub(obj):
    """Replace non-finite floats so the emitted JSON stays strict."""
    if isinstance(obj, dict):
        return {k: _scrub(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_scrub(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        if math.isnan(obj):
            return None
        return "inf" if obj > 0 else "-inf"
    return obj


def environment_fingerprint(grid: dict, seed: int) -> dict:
    return {
        "package": "wmlab " + _package_version(),
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "grid": dict(grid),
        "seed": seed,
    }


def _package_version() -> str:
    from . import __version__

    return __version__


def run_audits(ctx: AuditContext, entries) -> tuple:
    """Run audit entries [(id, options)] on one context.

    Returns (reports, timing).  Errors raised inside an audit become
    failed reports with the error message in the notes, so a campaign
    never loses the rest of its bundle to one degenerate case.
    """
    reports = []
    timing = {}
    for aid, options in entries:
        fn = AUDIT_REGISTRY[aid]
        t0 = time.perf_counter()
        try:
            rep = fn(ctx, **options)
        except (AuditError, SolverError, ParameterError, ConfigError) as exc:
            rep = BoundReport(
                bound_id=aid,
                scenario=ctx.scenario,
                samples=[],
                passed=False,
                margin=math.nan,
                notes={"error": f"{type(exc).__name__}: {exc}"},
            )
        timing[aid] = time.perf_counter() - t0
        reports.append(rep)
    return reports, timing


def run_scenario(config) -> ReportBundle:
    """Validate, build, audit, and (optionally) write one scenario."""
    config = load_config(config)
    man, params = build_scenario(config)
    ctx = AuditContext(
        man, params, M=config.grid["M"], seed=config.seed, scenario=config.scenario
    )
    entries = config.audits if config.audits is not None else default_audit_list(man)

    t0 = time.perf_counter()
    _, eps_window = validate_eps_range(params.N, man.n, params.eps)
    fingerprint = environment_fingerprint(config.grid, config.seed)
    fingerprint["validation"] = {
        "eps_window": eps_window,
        "density_band": [params.a, params.b],
        "band_truncated": params.band_truncated,
        "hypothesis_margin": ctx.hypothesis_margin(),
        "constants": {"c": params.c, "nu": params.nu, "K": params.K},
    }
    reports, timing = run_audits(ctx, entries)
    bundle = ReportBundle(
        scenario=config.scenario,
        reports=reports,
        fingerprint=fingerprint,
        timing={"total_s": time.perf_counter() - t0, "per_audit_s": timing},
    )
    if config.out_dir is not None:
        write_bundle(bundle, config.out_dir, config.out_format)
    return bundle


def bundle_from_dict(data) -> ReportBundle:
    """Rebuild a bundle from its JSON payload (inverse of to_dict)."""
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"bundle is not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or "reports" not in data:
        raise ConfigError("bundle: expected an object with a reports list")
    ver = data.get("schema_version")
    if ver != SCHEMA_VERSION:
        raise ConfigError(
            f"bundle: schema_version {ver!r} unsupported (expected {SCHEMA_VERSION!r})"
        )
    reports = []
    for i, rd in enumerate(data["reports"]):
        try:
            reports.append(BoundReport(
                bound_id=rd["bound_id"],
                scenario=rd["scenario"],
                samples=rd.get("samples", []),
                passed=bool(rd["pass"]),
                margin=math.nan if rd.get("margin") is None else float(rd["margin"]),
                empirical_constant=(
                    None if rd.get("empirical_constant") is None
                    else float(rd["empirical_constant"])
                ),
                shape_exponents=rd.get("shape_exponents"),
                notes=rd.get("notes", {}),
            ))
        except KeyError as exc:
            raise ConfigError(f"bundle: reports[{i}] is missing {exc}") from exc
    return ReportBundle(
        scenario=data.get("scenario", "bundle"),
        reports=reports,
        fingerprint=data.get("fingerprint", {}),
        timing=data.get("timing", {}),
    )


def merge_bundles(bundles, scenario: str = "merged") -> ReportBundle:
    """Ordered merge: rows sorted by (bound id rank, scenario id)."""
    reports = []
    for b in bundles:
        reports.extend(b.reports)
    reports.sort(key=lambda r: (_REGISTRY_RANK.get(r.bound_id, len(_REGISTRY_RANK)),
                                r.bound_id, r.scenario))
    fingerprint = bundles[0].fingerprint if bundles else {}
    timing = {"total_s": sum(b.timing.get("total_s", 0.0) for b in bundles)}
    return ReportBundle(scenario=scenario, reports=reports,
                        fingerprint=fingerprint, timing=timing)


# ---------------------------------------------------------------------------
# emission


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(reports, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for rep in reports:
            row = rep.row()
            writer.writerow([_cell(row[col]) for col in CSV_COLUMNS])
    return path


def write_json(bundle: ReportBundle, path, include_timing: bool = True) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(bundle.json_text(include_timing))
    return path


def write_bundle(bundle: ReportBundle, out_dir, fmt: str = "both") -> dict:
    out_dir = Path(out_dir)
    written = {}
    if fmt in ("csv", "both"):
        written["csv"] = write_csv(bundle.reports, out_dir / f"{bundle.scenario}.csv")
    if fmt in ("json", "both"):
        written["json"] = write_json(bundle, out_dir / f"{bundle.scenario}.json")
    return written
