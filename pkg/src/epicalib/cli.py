"""Command-line entry point: calibrate, diagnose, sensitivity, export.

Exit codes are stable API: 0 success, 1 runtime failure, 2 invalid
configuration or unreadable input, 3 convergence-gate failure (diagnose
only). Everything is batch-oriented; plotting is left to external tools fed
by the ``export`` CSVs.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import chainstore
from .config import joint_prior_from_dicts, load_config
from .diagnostics import (
    DiagnosticThresholds,
    detect_nonidentifiability,
    prior_posterior_summary,
)
from .errors import (
    CalibrationError,
    ConfigurationError,
    DegenerateChainError,
    InitializationError,
    InsufficientChainsError,
    ParseError,
)
from .workflow import run_calibration, run_sensitivity

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2
EXIT_NOT_CONVERGED = 3


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="epicalib",
        description="Bayesian calibration for disease models with "
                    "non-identifiability diagnostics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("calibrate", help="run MCMC calibration from a config file")
    p.add_argument("config", type=Path)

    p = sub.add_parser("diagnose", help="convergence gate over a stored run directory")
    p.add_argument("chains_dir", type=Path)
    p.add_argument("--rhat-threshold", type=float, default=None,
                   help="override the stored R-hat pass threshold")

    p = sub.add_parser("sensitivity", help="prior sensitivity sweep from a config file")
    p.add_argument("config", type=Path)

    p = sub.add_parser("export", help="write plot-ready CSVs from a stored run")
    p.add_argument("chains_dir", type=Path)
    p.add_argument("--kind", choices=("trace", "density", "prior-posterior"), required=True)
    p.add_argument("--out", type=Path, default=None,
                   help="output directory (default: <chains_dir>/plotdata)")
    p.add_argument("--bins", type=int, default=50)

    args = parser.parse_args(argv)
    try:
        if args.command == "calibrate":
            return _cmd_calibrate(args)
        if args.command == "diagnose":
            return _cmd_diagnose(args)
        if args.command == "sensitivity":
            return _cmd_sensitivity(args)
        return _cmd_export(args)
    except (ConfigurationError, ParseError, InsufficientChainsError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CalibrationError, InitializationError, DegenerateChainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def _cmd_calibrate(args) -> int:
    config = load_config(args.config)
    result = run_calibration(config)
    for c in result.chains.chains:
        print(f"chain {c.chain_id} (seed {c.seed}): acceptance rate "
              f"{c.acceptance_rate:.3f}, {len(c)} recorded states")
    if result.report is not None:
        _print_report_table(result.report)
    if result.output_dir is not None:
        print(f"artifacts written to {result.output_dir}")
    return EXIT_OK


def _cmd_diagnose(args) -> int:
    chains, meta = chainstore.read_run(args.chains_dir)
    if len(chains) < 2:
        print("error: diagnose needs at least 2 chains", file=sys.stderr)
        return EXIT_CONFIG
    stored = meta.get("thresholds", {})
    thresholds = DiagnosticThresholds(
        rhat=(args.rhat_threshold if args.rhat_threshold is not None
              else stored.get("rhat", 1.1)),
        correlation=stored.get("correlation", 0.9),
        flat_ratio=stored.get("flat_ratio", 0.9),
    )
    prior = None
    if meta.get("priors"):
        prior = joint_prior_from_dicts(meta["priors"], "run_meta priors")
    report = detect_nonidentifiability(chains, prior, thresholds)
    with open(args.chains_dir / "report.json", "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
    _print_report_table(report)
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def _print_report_table(report) -> None:
    print(f"{'parameter':<24} {'R-hat':>8} {'upper':>8} {'post sd':>10} {'verdict'}")
    for p in report.parameters:
        print(f"{p.name:<24} {p.rhat:>8.3f} {p.rhat_upper:>8.3f} "
              f"{p.posterior_sd:>10.4g} {p.verdict}")
    for a, b, c in report.correlated_pairs:
        print(f"ridge: corr({a}, {b}) = {c:+.3f}")
    print(f"overall: {report.verdict}")


def _cmd_sensitivity(args) -> int:
    config = load_config(args.config)
    rows = run_sensitivity(config)
    print(f"{'prior_set':<16} {'parameter':<20} {'post mean':>12} {'post sd':>12} "
          f"{'R-hat':>8} {'GOF med':>10} status")
    for r in rows:
        print(f"{r['prior_set']:<16} {r['parameter']:<20} {r['posterior_mean']:>12.5g} "
              f"{r['posterior_sd']:>12.5g} {r['rhat']:>8.3f} {r['gof_median']:>10.4g} "
              f"{r['status']}")
    if config.output_dir is not None:
        print(f"summary written to {config.output_dir / 'sweep_summary.csv'}")
    return EXIT_OK


def _cmd_export(args) -> int:
    chains, meta = chainstore.read_run(args.chains_dir)
    out = args.out if args.out is not None else args.chains_dir / "plotdata"
    out.mkdir(parents=True, exist_ok=True)
    names = chains.names
    if args.kind == "trace":
        for i, name in enumerate(names):
            with open(out / f"trace_{name}.csv", "w", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh)
                w.writerow(["iteration"] + [f"chain_{c.chain_id}" for c in chains.chains])
                for k in range(len(chains.chains[0])):
                    w.writerow([int(chains.chains[0].iterations[k])]
                               + [repr(float(c.params[k, i])) for c in chains.chains])
    elif args.kind == "density":
        for i, name in enumerate(names):
            pooled = chains.pooled()[:, i]
            lo, hi = float(pooled.min()), float(pooled.max())
            if hi <= lo:
                hi = lo + 1.0
            edges = np.linspace(lo, hi, args.bins + 1)
            centers = 0.5 * (edges[:-1] + edges[1:])
            cols = [np.histogram(c.params[:, i], bins=edges, density=True)[0]
                    for c in chains.chains]
            with open(out / f"density_{name}.csv", "w", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh)
                w.writerow(["bin_center"] + [f"chain_{c.chain_id}" for c in chains.chains])
                for k in range(args.bins):
                    w.writerow([repr(float(centers[k]))] + [repr(float(col[k])) for col in cols])
    else:  # prior-posterior
        if not meta.get("priors"):
            raise ConfigurationError(
                "prior-posterior export needs prior specs in run_meta.json"
            )
        prior = joint_prior_from_dicts(meta["priors"], "run_meta priors")
        pooled = chains.pooled()
        for i, name in enumerate(names):
            summary = prior_posterior_summary(prior.spec_for(name), pooled[:, i],
                                              bins=args.bins)
            with open(out / f"prior_posterior_{name}.csv", "w", newline="",
                      encoding="utf-8") as fh:
                w = csv.writer(fh)
                w.writerow(["grid", "prior_density", "posterior_density"])
                for g, pd_, qd in zip(summary.grid, summary.prior_density,
                                      summary.posterior_density):
                    w.writerow([repr(float(g)), repr(float(pd_)), repr(float(qd))])
    print(f"{args.kind} export written to {out}")
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
