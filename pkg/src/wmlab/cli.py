"""Command line front end.

Subcommands: validate, spectrum, kernel, audit, liyau, fuzz, report.
Every scenario-shaped subcommand takes either a catalog tag or
--config (a JSON file path or an inline JSON object); --seed, --grid,
--out and --format override the corresponding config fields.  Exit
codes: 0 all pass, 1 any audit failure, 2 config or parameter error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .audits import AuditContext, LiYauParams, audit_j_interval, audit_li_yau, solve_j_function, j_lower_bound
from .catalog import CATALOG_TAGS
from .errors import ConfigError, ParameterError
from .fuzz import fuzz
from .geometry import validate_eps_range
from .scenario import (
    ScenarioConfig,
    build_scenario,
    bundle_from_dict,
    load_config,
    merge_bundles,
    run_scenario,
    write_bundle,
)

import numpy as np


def _scenario_config(args) -> ScenarioConfig:
    if args.config is not None and args.tag is not None:
        raise ConfigError("give a catalog tag or --config, not both")
    if args.config is not None:
        cfg = load_config(args.config)
    elif args.tag is not None:
        if args.tag not in CATALOG_TAGS:
            raise ConfigError(
                f"unknown catalog tag {args.tag!r}; known: {', '.join(CATALOG_TAGS)}"
            )
        cfg = load_config({"manifold": args.tag})
    else:
        raise ConfigError("a catalog tag or --config PATH is required")
    if args.seed is not None:
        cfg.seed = args.seed
    if args.grid is not None:
        if args.grid < 8:
            raise ConfigError("grid.M must be an integer >= 8")
        cfg.grid["M"] = args.grid
    if args.out is not None:
        cfg.out_dir = args.out
    if args.format is not None:
        cfg.out_format = args.format
    return cfg


def _context(cfg: ScenarioConfig):
    man, params = build_scenario(cfg)
    ctx = AuditContext(
        man, params, M=cfg.grid["M"], seed=cfg.seed, scenario=cfg.scenario
    )
    return man, params, ctx


def _default_l_max(cfg: ScenarioConfig, man) -> int:
    l_max = cfg.grid.get("l_max")
    if l_max is None:
        l_max = 8 if man.domain.kind == "pole_cap" else 0
    return l_max


def _emit_csv(cfg: ScenarioConfig, stem: str, header, rows) -> None:
    """Rows to {out_dir}/{scenario}-{stem}.csv, or stdout without --out."""
    if cfg.out_dir is not None:
        path = Path(cfg.out_dir) / f"{cfg.scenario}-{stem}.csv"
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(rows)
        print(f"wrote {path}")
    else:
        w = csv.writer(sys.stdout)
        w.writerow(header)
        w.writerows(rows)


def _print_report_lines(reports, only_failures: bool = False) -> None:
    for r in reports:
        if only_failures and r.passed:
            continue
        status = "PASS" if r.passed else "FAIL"
        vac = " (vacuous)" if r.vacuous else ""
        print(f"{status} {r.bound_id:24s} {r.scenario:32s} margin={r.margin:.4g}{vac}")


def _summary_line(bundle) -> None:
    n_vac = sum(r.vacuous for r in bundle.reports)
    print(
        f"{bundle.scenario}: {len(bundle.reports)} reports, "
        f"{bundle.n_failed} failed, {n_vac} vacuous"
    )


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(args) -> int:
    cfg = _scenario_config(args)
    man, params, ctx = _context(cfg)
    _, window = validate_eps_range(params.N, man.n, params.eps)
    margin = ctx.hypothesis_margin()
    holds = ctx.hypothesis_ok()
    print(f"scenario: {cfg.scenario}")
    print(
        f"domain: {man.domain.kind}, r in [{man.domain.r_min:g}, {man.domain.r_max:g}], n = {man.n}"
    )
    print(f"params: N={params.N:g} eps={params.eps:g} K={params.K:.6g}")
    print(f"eps window: |eps| < {window:g}")
    print(
        f"density band: [{params.a:.6g}, {params.b:.6g}] "
        f"(ratio {params.b / params.a:.6g})"
    )
    print(f"constants: c={params.c:.6g} nu={params.nu:.6g}")
    print(f"hypothesis margin: {margin:.6g} ({'holds' if holds else 'violated'})")
    if not holds:
        print("curvature hypothesis violated on the sampled grid; "
              'use K "derive" or lower K', file=sys.stderr)
        return 2
    return 0


def cmd_spectrum(args) -> int:
    cfg = _scenario_config(args)
    man, _, ctx = _context(cfg)
    spec = ctx.spectrum(
        l_max=_default_l_max(cfg, man), k_per_mode=cfg.grid.get("k_per_mode")
    )
    rows = [
        (rank, repr(float(lam)), int(l), int(j), int(m))
        for rank, (lam, l, j, m) in enumerate(
            zip(spec.lam, spec.l_of, spec.j_of, spec.mult)
        )
    ]
    if args.count is not None:
        rows = rows[: args.count]
    _emit_csv(cfg, "spectrum", ("rank", "lambda", "mode_l", "radial_j", "multiplicity"), rows)
    return 0


def cmd_kernel(args) -> int:
    cfg = _scenario_config(args)
    try:
        times = sorted(float(s) for s in args.times.split(","))
    except ValueError as exc:
        raise ConfigError(f"--times must be comma-separated numbers: {exc}") from exc
    if not times or times[0] <= 0:
        raise ConfigError("--times must be positive")
    man, _, ctx = _context(cfg)
    kern = ctx.kernel(
        l_max=_default_l_max(cfg, man), k_per_mode=cfg.grid.get("k_per_mode")
    )
    src = ctx.grid.nearest_node(ctx.audit_center)
    rows = []
    for t in times:
        col = kern.column(src, t)
        for x, v in zip(ctx.grid.nodes, col):
            rows.append((repr(float(x)), repr(float(t)), repr(float(v))))
    _emit_csv(cfg, "kernel", ("node", "time", "value"), rows)
    return 0


def cmd_audit(args) -> int:
    cfg = _scenario_config(args)
    bundle = run_scenario(cfg)
    _print_report_lines(bundle.reports)
    _summary_line(bundle)
    return 0 if bundle.all_passed else 1


def cmd_liyau(args) -> int:
    cfg = _scenario_config(args)
    _, _, ctx = _context(cfg)
    li = LiYauParams.derive(ctx)
    _, j_fields = solve_j_function(ctx, li, T=args.t_max)
    rows = []
    for t in sorted(j_fields):
        J = j_fields[t]
        rows.append((
            repr(float(t)),
            repr(float(np.min(J))),
            repr(float(np.max(J))),
            repr(float(j_lower_bound(li, t)) if t > 0 else 2.0 ** (-1.0 / (li.tau - 1.0))),
        ))
    _emit_csv(cfg, "liyau", ("time", "j_min", "j_max", "j_floor"), rows)
    reports = [
        audit_j_interval(ctx, li, T=args.t_max),
        audit_li_yau(ctx, li),
    ]
    _print_report_lines(reports)
    return 0 if all(r.passed for r in reports) else 1


def cmd_fuzz(args) -> int:
    cfg = _scenario_config(args)
    if args.count < 1:
        raise ConfigError("--count must be at least 1")
    bundle = fuzz(
        cfg,
        args.count,
        density_amplitude=args.density_amplitude,
        warp_amplitude=args.warp_amplitude,
    )
    _print_report_lines(bundle.reports, only_failures=True)
    _summary_line(bundle)
    return 0 if bundle.all_passed else 1


def cmd_report(args) -> int:
    bundles = []
    for p in args.bundles:
        try:
            text = Path(p).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read bundle {p}: {exc}") from exc
        bundles.append(bundle_from_dict(text))
    merged = merge_bundles(bundles, scenario=args.name)
    if args.out is not None:
        written = write_bundle(merged, args.out, args.format or "both")
        for path in written.values():
            print(f"wrote {path}")
    else:
        sys.stdout.write(merged.json_text())
    return 0 if merged.all_passed else 1


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wmlab",
        description="Numerical audits of weighted-manifold heat kernel and volume bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "tag", nargs="?", default=None,
        help="catalog tag (%s)" % ", ".join(CATALOG_TAGS),
    )
    common.add_argument("--config", default=None, metavar="PATH",
                        help="scenario config: JSON file path or inline JSON object")
    common.add_argument("--seed", type=int, default=None, help="override config seed")
    common.add_argument("--grid", type=int, default=None, metavar="M",
                        help="override grid resolution")
    common.add_argument("--out", default=None, metavar="DIR",
                        help="write outputs under this directory")
    common.add_argument("--format", choices=("csv", "json", "both"), default=None,
                        help="bundle output format (default both)")

    sp = sub.add_parser("validate", parents=[common],
                        help="check params only: eps window, band, curvature scan")
    sp.set_defaults(fn=cmd_validate)

    sp = sub.add_parser("spectrum", parents=[common],
                        help="merged eigenvalue table as CSV")
    sp.add_argument("--count", type=int, default=None, help="limit rows")
    sp.set_defaults(fn=cmd_spectrum)

    sp = sub.add_parser("kernel", parents=[common],
                        help="heat kernel columns from the audit center as CSV")
    sp.add_argument("--times", default="0.05,0.2,1.0",
                    help="comma-separated times (default 0.05,0.2,1.0)")
    sp.set_defaults(fn=cmd_kernel)

    sp = sub.add_parser("audit", parents=[common],
                        help="run the audit list and print one line per bound")
    sp.set_defaults(fn=cmd_audit)

    sp = sub.add_parser("liyau", parents=[common],
                        help="solve the correction function and audit its bounds")
    sp.add_argument("--t-max", type=float, default=1.0, dest="t_max",
                    help="solve horizon (default 1.0)")
    sp.set_defaults(fn=cmd_liyau)

    sp = sub.add_parser("fuzz", parents=[common],
                        help="seeded random perturbations of a catalog base")
    sp.add_argument("--count", type=int, default=50, help="number of samples (default 50)")
    sp.add_argument("--density-amplitude", type=float, default=1.0,
                    help="fraction of the density amplitude cap (default 1.0)")
    sp.add_argument("--warp-amplitude", type=float, default=0.2,
                    help="warp perturbation l1 budget, below 1 (default 0.2)")
    sp.set_defaults(fn=cmd_fuzz)

    sp = sub.add_parser("report", help="merge bundle JSON files")
    sp.add_argument("bundles", nargs="+", metavar="BUNDLE.json")
    sp.add_argument("--name", default="merged", help="merged scenario name")
    sp.add_argument("--out", default=None, metavar="DIR")
    sp.add_argument("--format", choices=("csv", "json", "both"), default=None)
    sp.set_defaults(fn=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ParameterError as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
