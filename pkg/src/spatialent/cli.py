"""Command-line frontend.

Subcommands: verdict, sweep, window, tc, extract, selftest.  Artifacts are
CSV (one row per grid point, 17 significant digits, deterministic byte
layout) plus JSON summaries, all under the output directory, which is
resolved from --out, the SPATIALENT_OUT environment variable, or the
[run] out_dir key, in that order.

Exit codes: 0 success, 1 validation error, 2 numerical error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import __version__
from .analysis import (
    SweepSpec,
    critical_temperature_curve,
    momentum_window_scan,
    run_sweep,
)
from .config import RunConfig
from .errors import NumericalError, ValidationError
from .extraction import ProbeCoupling, ppt_probe_oracle, probe_state
from .modes import (
    DetectorProfile,
    ProfileKind,
    Region,
    assemble_cm,
    prepare_mode_pair,
    symmetric_regions,
)
from .selftest import run_selftest
from .symplectic import CovarianceMatrix4, purity, purity_threshold, separability_test

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3

OUT_DIR_ENV = "SPATIALENT_OUT"

_ENTRY_NAMES = ("a_uu", "a_pp", "b_uu", "b_pp", "c_uu", "c_pp")


def _fmt(value) -> str:
    """Round-trip-safe cell rendering for CSV."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.17g}"
    return str(value)


def _write_csv(path: Path, config: RunConfig, columns, rows):
    lines = [
        f"# spatialent {__version__}",
        f"# config_hash: {config.config_hash()}",
        "# units: dimensionless (hbar, k_B, m, L from the [field] section)",
        ",".join(columns),
    ]
    for row in rows:
        lines.append(",".join(_fmt(row[c]) for c in columns))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_json(path: Path, config: RunConfig, payload: dict):
    document = {
        "tool": f"spatialent {__version__}",
        "config_hash": config.config_hash(),
    }
    document.update(payload)
    path.write_text(
        json.dumps(document, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _out_dir(args, config: RunConfig) -> Path:
    if args.out is not None:
        out = args.out
    elif os.environ.get(OUT_DIR_ENV):
        out = os.environ[OUT_DIR_ENV]
    else:
        out = config.get("run", "out_dir")
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _load_config(args) -> RunConfig:
    config = RunConfig.load(args.config, args.set or ())
    if args.seed is not None:
        config.set("run", "seed", args.seed)
    if args.threads is not None:
        if args.threads < 1:
            raise ValidationError("--threads must be >= 1")
        config.set("run", "threads", args.threads)
    return config


def _verdict_profile(config: RunConfig) -> DetectorProfile:
    kind = ProfileKind(config.get("verdict", "profile"))
    width = config.get("verdict", "gaussian_width")
    return DetectorProfile(
        kind=kind,
        width=width if width > 0 else None,
        inverse_k_weighting=config.get("verdict", "inverse_k_weighting"),
    )


def cmd_verdict(args) -> int:
    config = _load_config(args)
    cfg = config.field_config()
    width = config.get("verdict", "width")
    separation = config.get("verdict", "separation")
    prepared = config.get("verdict", "prepared")
    profile = _verdict_profile(config)
    trunc = config.truncation(prepared=prepared)
    if profile.kind is ProfileKind.TOP_HAT and not prepared:
        # an untruncated top hat means summing to the hard cap and letting
        # the tail checks decide
        trunc = config.truncation(prepared=False)
        trunc = type(trunc)(
            l_min=trunc.l_min,
            l_max=trunc.hard_cap,
            convergence_tol=trunc.convergence_tol,
            hard_cap=trunc.hard_cap,
            prepared=False,
        )
    region_r, region_q = symmetric_regions(width, separation, cfg)
    mv_r, mv_q, before, after = prepare_mode_pair(
        region_r, region_q, profile, trunc, cfg
    )
    report = assemble_cm(mv_r, mv_q, cfg, trunc)
    report.require_verdict_grade()
    sv = separability_test(report.cm)
    print(f"regions: R=[{region_r.x1:g}, {region_r.x2:g}] "
          f"Q=[{region_q.x1:g}, {region_q.x2:g}]  profile={profile.kind}")
    print(f"temperature: {cfg.temperature:g}  "
          f"chemical_potential: {cfg.chemical_potential:g}")
    for name in _ENTRY_NAMES:
        print(f"  {name} = {getattr(report.cm, name):.17g}")
    print(f"cross_residual: before={before:.3e} after={after:.3e}")
    print(f"series_converged: {report.series_converged}")
    print(f"nu_minus      = {sv.nu_minus:.17g}")
    print(f"nu_minus_pt   = {sv.nu_minus_pt:.17g}")
    print(f"eq13_value    = {sv.eq13_value:.17g}")
    print(f"log_negativity = {sv.log_negativity:.17g}")
    if sv.verdict.value != "Physicality-violated":
        print(f"purity        = {purity(report.cm):.17g}")
        print(f"purity_threshold = {purity_threshold(report.cm):.17g}")
    print(f"verdict: {sv.verdict}")
    return EXIT_OK


_SWEEP_COLUMNS = (
    "separation", "temperature",
    "a_uu", "a_pp", "b_uu", "b_pp", "c_uu", "c_pp",
    "nu_minus", "nu_minus_pt", "eq13_value", "log_negativity",
    "purity", "purity_threshold", "verdict", "purity_consistent",
    "residual_before", "residual_after", "series_converged", "max_tail",
    "error",
)


def _sweep_spec(config: RunConfig) -> SweepSpec:
    return SweepSpec(
        profile=DetectorProfile(kind=ProfileKind(config.get("sweep", "profile"))),
        width=config.get("sweep", "width"),
        separations=config.get("sweep", "separations"),
        temperatures=config.get("sweep", "temperatures"),
        trunc=config.truncation(),
    )


def _sweep_rows(result):
    rows = []
    for p in result.points:
        entries = p.entries or (math.nan,) * 6
        row = {
            "separation": p.separation,
            "temperature": p.temperature,
            "nu_minus": p.nu_minus,
            "nu_minus_pt": p.nu_minus_pt,
            "eq13_value": p.eq13_value,
            "log_negativity": p.log_negativity,
            "purity": p.purity,
            "purity_threshold": p.purity_threshold,
            "verdict": p.verdict,
            "purity_consistent": p.purity_consistent,
            "residual_before": p.residual_before,
            "residual_after": p.residual_after,
            "series_converged": p.series_converged,
            "max_tail": p.max_tail,
            "error": p.error.replace(",", ";"),
        }
        row.update(dict(zip(_ENTRY_NAMES, entries)))
        rows.append(row)
    return rows


def cmd_sweep(args) -> int:
    config = _load_config(args)
    cfg = config.field_config()
    result = run_sweep(_sweep_spec(config), cfg,
                       threads=config.get("run", "threads"))
    out = _out_dir(args, config)
    rows = _sweep_rows(result)
    _write_csv(out / "sweep.csv", config, _SWEEP_COLUMNS, rows)
    _write_json(out / "sweep.json", config, {
        "width": result.spec.width,
        "separations": list(result.spec.separations),
        "temperatures": list(result.spec.temperatures),
        "points": rows,
    })
    print(f"wrote {out / 'sweep.csv'} ({len(rows)} points)")
    return EXIT_OK


def cmd_window(args) -> int:
    config = _load_config(args)
    cfg = config.field_config()
    temperature = config.get("window", "temperature")
    cap = config.get("window", "cap")
    rows = []
    for width in config.get("window", "widths"):
        scan = momentum_window_scan(width, cfg, temperature, cap)
        rows.append({
            "width": width,
            "temperature": temperature,
            "found": scan.found,
            "dk_min": scan.dk_min if scan.found else "",
            "dk_max": scan.dk_max if scan.found else "",
            "open_window": scan.open_window,
            "dk_min_times_width": scan.product,
        })
    out = _out_dir(args, config)
    columns = ("width", "temperature", "found", "dk_min", "dk_max",
               "open_window", "dk_min_times_width")
    _write_csv(out / "window.csv", config, columns, rows)
    _write_json(out / "window.json", config, {"points": rows})
    print(f"wrote {out / 'window.csv'} ({len(rows)} widths)")
    return EXIT_OK


def cmd_tc(args) -> int:
    config = _load_config(args)
    cfg = config.field_config()
    curve = critical_temperature_curve(
        config.get("tc", "widths"),
        cfg,
        route=config.get("tc", "route"),
        cap=config.get("tc", "cap"),
        rel_width=config.get("tc", "rel_width"),
        t_cap=config.get("tc", "t_cap"),
        trunc=config.truncation(),
    )
    rows = [
        {"width": r.width, "route": r.route, "t_c": r.t_c, "status": r.status}
        for r in curve.results
    ]
    out = _out_dir(args, config)
    _write_csv(out / "tc.csv", config,
               ("width", "route", "t_c", "status"), rows)
    _write_json(out / "tc_summary.json", config, {
        "route": curve.route,
        "exponent": curve.exponent,
        "amplitude": curve.amplitude,
        "fit_residual": curve.fit_residual,
        "points": rows,
    })
    print(f"wrote {out / 'tc.csv'}; fitted exponent {curve.exponent:.4f}")
    return EXIT_OK


def cmd_extract(args) -> int:
    config = _load_config(args)
    cfg = config.field_config()
    coupling = ProbeCoupling(
        gamma_eff=config.get("extract", "gamma_eff"),
        probe_frequency=config.get("extract", "probe_frequency"),
        probe_mass=config.get("extract", "probe_mass"),
        hbar=cfg.hbar,
    )
    result = run_sweep(_sweep_spec(config), cfg,
                       threads=config.get("run", "threads"))
    rows = []
    for p in result.points:
        row = {
            "separation": p.separation,
            "temperature": p.temperature,
            "log_negativity": p.log_negativity,
            "c_uu": p.entries[4] if p.entries else math.nan,
            "y": math.nan,
            "delta": math.nan,
            "threshold": math.nan,
            "margin": math.nan,
            "extracted": "",
            "oracle_min_eigenvalue": math.nan,
            "field_verdict": p.verdict,
            "error": p.error.replace(",", ";"),
        }
        if p.entries and not p.error:
            try:
                state = probe_state(CovarianceMatrix4(*p.entries), coupling)
                row.update({
                    "y": state.y,
                    "delta": state.delta,
                    "threshold": state.threshold,
                    "margin": state.condition_margin,
                    "extracted": state.entangled,
                    "oracle_min_eigenvalue": ppt_probe_oracle(state),
                })
            except (ValidationError, NumericalError) as exc:
                row["error"] = str(exc).replace(",", ";")
        rows.append(row)
    out = _out_dir(args, config)
    columns = ("separation", "temperature", "log_negativity", "c_uu", "y",
               "delta", "threshold", "margin", "extracted",
               "oracle_min_eigenvalue", "field_verdict", "error")
    _write_csv(out / "extract.csv", config, columns, rows)
    _write_json(out / "extract.json", config, {"points": rows})
    print(f"wrote {out / 'extract.csv'} ({len(rows)} points)")
    return EXIT_OK


def cmd_selftest(args) -> int:
    config = _load_config(args)
    results = run_selftest(config)
    failed = [r for r in results if not r.passed]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"[{status}] {r.name}: {r.detail}")
    if failed:
        print(f"selftest failed: {failed[0].name}")
        return EXIT_NUMERICAL
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spatialent",
        description="Spatial entanglement of a thermal 1D Bose gas",
    )
    parser.add_argument("--version", action="version",
                        version=f"spatialent {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "verdict": (cmd_verdict, "separability verdict for one geometry"),
        "sweep": (cmd_sweep, "negativity over a separation/temperature grid"),
        "window": (cmd_window, "entangling momentum windows per region size"),
        "tc": (cmd_tc, "critical temperature vs region size with power-law fit"),
        "extract": (cmd_extract, "probe-pair extraction over the sweep grid"),
        "selftest": (cmd_selftest, "run the built-in oracle suite"),
    }
    for name, (func, help_text) in commands.items():
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", default=None, help="INI config file")
        cmd.add_argument("--out", default=None, help="output directory")
        cmd.add_argument("--seed", type=int, default=None,
                         help="random seed for Monte-Carlo oracles")
        cmd.add_argument("--threads", type=int, default=None,
                         help="sweep-point fan-out width")
        cmd.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE",
                         help="override one config key (repeatable)")
        cmd.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
