"""Command-line entry point.

Exit codes: 0 success, 1 configuration error, 2 numerical blow-up (partial
outputs are still written), 3 I/O error.
"""
from __future__ import annotations

import argparse
import os
import sys
import warnings
from pathlib import Path

from .config import ConfigError, RunConfig, parse_config
from .io import save_checkpoint, write_potential_report, write_study, write_timeseries
from .model import HypothesisError
from .monitor import EstimateMonitor
from .potential import check_potential
from .stepper import integrate
from .studies import StudyConfig, run_contdep_study, run_eps_study, run_n_study

__all__ = ["cli_main", "EXIT_OK", "EXIT_CONFIG", "EXIT_BLOWUP", "EXIT_IO"]

EXIT_OK, EXIT_CONFIG, EXIT_BLOWUP, EXIT_IO = 0, 1, 2, 3
POTENTIAL_TOL = 1e-9

_STUDIES = {"study-n": ("n", run_n_study), "study-eps": ("eps", run_eps_study), "study-contdep": ("contdep", run_contdep_study)}


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="caginalp-galerkin", description="Spectral Galerkin runs and verification studies.")
    ap.add_argument("command", choices=["simulate", *_STUDIES, "check-potential"])
    ap.add_argument("--config", required=True, metavar="PATH", help="key = value configuration file")
    ap.add_argument("--out", metavar="PREFIX", help="output prefix (default: the config's 'output' key)")
    ap.add_argument("--quiet", action="store_true", help="suppress progress messages")
    return ap


def _write(path: Path, text: str) -> None:
    # write-then-rename keeps a reader from ever seeing a half-written file
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _simulate(cfg: RunConfig, prefix: str, say) -> int:
    basis = cfg.basis()
    params = cfg.params()
    traj = integrate(params, basis, cfg.initial_state(basis), cfg.stepper(), EstimateMonitor(params, basis))
    _write(Path(prefix + ".timeseries.csv"), write_timeseries(traj.records))
    _write(Path(prefix + ".final.ckpt"), save_checkpoint(basis, traj.final, params.eps))
    if not traj.ok:
        print(f"blow-up: {traj.failure}", file=sys.stderr)
        return EXIT_BLOWUP
    say(f"simulate: {len(traj.records)} records, t = {traj.final.t:g}")
    return EXIT_OK


def _study(kind: str, runner, cfg: RunConfig, prefix: str, say) -> int:
    rows = runner(StudyConfig.from_run(cfg))
    _write(Path(prefix + ".study.csv"), write_study(kind, rows))
    failed = [r for r in rows if r.status.startswith("failed")]
    if failed:
        print(f"blow-up in {len(failed)} study row(s): {failed[0].status}", file=sys.stderr)
        return EXIT_BLOWUP
    say(f"{kind} study: {len(rows)} rows")
    return EXIT_OK


def _check_potential(cfg: RunConfig, prefix: str, say) -> int:
    params = cfg.params()
    report = check_potential(params.potential, params.yosida)
    _write(Path(prefix + ".potential.csv"), write_potential_report(report))
    held = sum(r.worst_violation < POTENTIAL_TOL for r in report)
    say(f"check-potential: {held}/{len(report)} properties hold to {POTENTIAL_TOL:g}")
    return EXIT_OK


def cli_main(args: list[str] | None = None) -> int:
    """Run one subcommand and return its exit code."""
    try:
        ns = _parser().parse_args(args)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG

    def say(msg: str) -> None:
        if not ns.quiet:
            print(msg)

    try:
        text = Path(ns.config).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        cfg = parse_config(text)
        prefix = ns.out or cfg.output
        with warnings.catch_warnings():
            if ns.quiet:
                warnings.simplefilter("ignore", RuntimeWarning)
            if ns.command == "simulate":
                return _simulate(cfg, prefix, say)
            if ns.command == "check-potential":
                return _check_potential(cfg, prefix, say)
            kind, runner = _STUDIES[ns.command]
            return _study(kind, runner, cfg, prefix, say)
    except (ConfigError, HypothesisError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ArithmeticError as exc:
        print(f"blow-up: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main() -> None:
    sys.exit(cli_main())
