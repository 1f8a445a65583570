"""Command-line entry points.

Subcommands: ``run``, ``adaptive``, ``converge-time``, ``converge-space``,
``stability-scan``.  Each takes ``--config <path>`` and ``--out <dir>``,
plus an optional ``--seed`` override and ``--force`` to allow writing into
a directory that already holds a manifest.  Exit codes: 0 success, 1 the
run blew up, 2 configuration or usage error.  Progress goes to standard
error; machine-readable outputs only to files in the output directory.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import traceback
from datetime import datetime, timezone

from . import __version__
from .adaptive import adaptive_run
from .config import ConfigError, ExperimentConfig, parse_config
from .harness import (
    adaptive_comparison,  # noqa: F401  (library-level; CLI runs the pieces)
    random_initial,
    spatial_convergence,
    stability_scan,
    temporal_convergence,
)
from .io import (
    RunManifest,
    manifest_path,
    write_energy_csv,
    write_manifest,
    write_snapshot,
)
from .scheme import BlowUpError, run_uniform


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _write_convergence_csv(report, path, abscissa_name: str) -> None:
    keys = ("hminus1", "l2", "h1")
    header = (
        f"{abscissa_name},err_hminus1,err_l2,err_h1,"
        "slope_hminus1,slope_l2,slope_h1"
    )
    slopes = [report.slopes[k] if report.slopes[k] is not None else math.nan for k in keys]
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(header + "\n")
        for i, x in enumerate(report.abscissae):
            errs = [report.errors[k][i] for k in keys]
            fh.write(",".join(_fmt(v) for v in [x, *errs, *slopes]) + "\n")


def _cmd_run(cfg: ExperimentConfig, out_dir: str) -> str:
    if cfg.T is None:
        raise ConfigError("the run experiment needs run.T")
    _, phi0 = random_initial(cfg.seed, cfg.M)
    write_snapshot(phi0, os.path.join(out_dir, "initial.sldc"))
    _say(f"uniform run: M={cfg.M} tau={cfg.tau:g} T={cfg.T:g} potential={cfg.potential}")
    result = run_uniform(phi0, cfg.scheme_params(), T=cfg.T)
    write_energy_csv(result.records, os.path.join(out_dir, "energy.csv"))
    if result.state is not None:
        write_snapshot(result.state.curr, os.path.join(out_dir, "final.sldc"))
    _say(f"outcome: {result.outcome} ({len(result.records)} records)")
    return result.outcome


def _cmd_adaptive(cfg: ExperimentConfig, out_dir: str) -> str:
    if cfg.T is None:
        raise ConfigError("the adaptive experiment needs run.T")
    if cfg.adaptive is None:
        raise ConfigError("the adaptive experiment needs an [adaptive] section")
    _, phi0 = random_initial(cfg.seed, cfg.M)
    write_snapshot(phi0, os.path.join(out_dir, "initial.sldc"))
    _say(f"adaptive run: M={cfg.M} T={cfg.T:g} tol={cfg.adaptive.tol:g}")
    result = adaptive_run(phi0, cfg.scheme_params(), cfg.adaptive, cfg.T)
    write_energy_csv(result.records, os.path.join(out_dir, "energy.csv"))
    if result.state is not None:
        write_snapshot(result.state.curr, os.path.join(out_dir, "final.sldc"))
    accepted = sum(1 for r in result.records if r.accepted != 0) - 1
    rejected = sum(1 for r in result.records if r.accepted == 0)
    _say(f"outcome: {result.outcome} ({accepted} accepted, {rejected} rejected steps)")
    return result.outcome


def _cmd_converge_time(cfg: ExperimentConfig, out_dir: str) -> str:
    if cfg.temporal is None:
        raise ConfigError("converge-time needs a [temporal] section")
    report = temporal_convergence(cfg, progress=_say)
    _write_convergence_csv(report, os.path.join(out_dir, "convergence.csv"), "tau")
    slope = report.slopes["l2"]
    _say(f"fitted L2 slope: {slope if slope is not None else 'insufficient data'}")
    return "completed"


def _cmd_converge_space(cfg: ExperimentConfig, out_dir: str) -> str:
    if cfg.spatial is None:
        raise ConfigError("converge-space needs a [spatial] section")
    report = spatial_convergence(cfg, progress=_say)
    _write_convergence_csv(report, os.path.join(out_dir, "convergence.csv"), "M")
    return "completed"


def _cmd_stability_scan(cfg: ExperimentConfig, out_dir: str) -> str:
    if cfg.stability is None:
        raise ConfigError("stability-scan needs a [stability] section")
    study = cfg.stability
    fixed = cfg.B if study.axis == "A" else cfg.A
    rows = []
    for tau in study.tau_list:
        result = stability_scan(
            study.axis, study.candidates,
            eps=cfg.epsilon, gamma=cfg.gamma, tau=tau, fixed=fixed,
            seed=cfg.seed, M=cfg.M, potential=cfg.scheme_params().potential,
            n_steps=study.steps, progress=_say,
        )
        if result.minimal is None:
            _say(f"tau={tau:g}: unstable at all tested values")
        rows.append((tau, result))
    with open(os.path.join(out_dir, "stability.csv"), "w", encoding="ascii", newline="\n") as fh:
        fh.write("tau,min_stable,n_tested\n")
        for tau, result in rows:
            minimal = result.minimal if result.minimal is not None else math.nan
            tested = sum(1 for o in result.outcomes if o != "skipped")
            fh.write(f"{_fmt(tau)},{_fmt(minimal)},{tested}\n")
    return "completed"


_COMMANDS = {
    "run": _cmd_run,
    "adaptive": _cmd_adaptive,
    "converge-time": _cmd_converge_time,
    "converge-space": _cmd_converge_space,
    "stability-scan": _cmd_stability_scan,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sldcn",
        description="Energy-stable spectral solver for the 2-D Cahn-Hilliard gradient flow",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("run", "uniform-step run from seeded noise"),
        ("adaptive", "adaptive-step run from seeded noise"),
        ("converge-time", "temporal refinement study against a small-step reference"),
        ("converge-space", "spatial refinement study against a finer-space reference"),
        ("stability-scan", "scan a stabilization constant for the smallest stable value"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="experiment configuration file")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override the configured seed")
        p.add_argument("--force", action="store_true",
                       help="allow writing into a directory that already has a manifest")
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0

    try:
        cfg = parse_config(args.config)
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("--seed must be nonnegative")
            cfg = cfg.with_seed(args.seed)
    except ConfigError as exc:
        _say(f"error: {exc}")
        return 2

    out_dir = os.fspath(args.out)
    if os.path.exists(manifest_path(out_dir)) and not args.force:
        _say(f"error: {out_dir} already holds a run manifest (use --force to overwrite)")
        return 2
    os.makedirs(out_dir, exist_ok=True)

    started = _now()
    try:
        outcome = _COMMANDS[args.command](cfg, out_dir)
    except ConfigError as exc:
        _say(f"error: {exc}")
        return 2
    except BlowUpError as exc:
        _say(f"blow-up: {exc}")
        outcome = "blow-up"
    except Exception:
        traceback.print_exc(file=sys.stderr)
        outcome = "error"
    manifest = RunManifest(
        config=cfg.to_dict(), version=__version__, seed=cfg.seed,
        potential=cfg.potential, started=started, finished=_now(), outcome=outcome,
    )
    write_manifest(manifest, out_dir)
    if outcome == "completed":
        return 0
    if outcome == "blow-up":
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
