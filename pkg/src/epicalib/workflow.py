"""Calibration workflow: build the model, run chains, diagnose, persist.

The loop mirrors calibration practice: run a first pass with vague priors,
inspect the non-identifiability report, revise priors in the config (a human
step, on purpose), and rerun. ``run_sensitivity`` automates the companion
exercise of sweeping one parameter's prior from weak to strong and tabulating
how the posterior follows it.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import chainstore
from .config import RunConfiguration, build_proposal, joint_prior_to_dicts
from .diagnostics import NonIdentifiabilityReport, detect_nonidentifiability, gelman_rubin
from .errors import CalibrationError, ConfigurationError, InitializationError
from .hpv import MULTIPLIER_NAMES, CohortConfig, load_baseline_table, make_hpv_model
from .priors import JointPrior
from .sampler import ChainSet, make_posterior, run_chains
from .sis import PARAM_NAMES as SIS_PARAM_NAMES
from .sis import SisSimConfig, make_sis_model

logger = logging.getLogger("epicalib.workflow")

_INIT_ATTEMPTS = 100


def _build_sis(settings: dict, base_dir: Path):
    cfg = SisSimConfig(
        s0=settings.get("s0", 0.99),
        i0=settings.get("i0", 0.01),
        dt=settings.get("dt", 0.01),
        horizon=settings.get("horizon", 500.0),
        equilibrium_tol=settings.get("equilibrium_tol", 1e-10),
    )
    return make_sis_model(cfg), SIS_PARAM_NAMES


def _build_hpv(settings: dict, base_dir: Path):
    baseline = None
    if "baseline_table" in settings:
        baseline = load_baseline_table(base_dir / settings["baseline_table"])
    kwargs = {}
    if "mortality_table" in settings:
        rows = np.loadtxt(base_dir / settings["mortality_table"], delimiter=",", skiprows=1)
        kwargs["mortality"] = rows[:, 1]
    cfg = CohortConfig(
        cohort_size=settings.get("cohort_size", 20_000),
        start_age=settings.get("start_age", 15),
        end_age=settings.get("end_age", 85),
        seed=settings.get("model_seed", 0),
        **kwargs,
    )
    return make_hpv_model(cfg, baseline), MULTIPLIER_NAMES


_MODEL_BUILDERS = {"sis": _build_sis, "hpv": _build_hpv}
_MODEL_PARAMS = {"sis": lambda settings: SIS_PARAM_NAMES,
                 "hpv": lambda settings: MULTIPLIER_NAMES}


def register_model(kind: str, builder, parameter_names) -> None:
    """Add a custom model: builder(settings, base_dir) -> (evaluate, names)."""
    _MODEL_BUILDERS[kind] = builder
    _MODEL_PARAMS[kind] = (
        parameter_names if callable(parameter_names) else (lambda settings: parameter_names)
    )


def model_parameter_names(kind: str, settings: dict):
    try:
        return _MODEL_PARAMS[kind](settings)
    except KeyError:
        raise ConfigurationError(f"unknown model kind {kind!r}") from None


def build_model(kind: str, settings: dict, base_dir: Path):
    try:
        builder = _MODEL_BUILDERS[kind]
    except KeyError:
        raise ConfigurationError(f"unknown model kind {kind!r}") from None
    return builder(settings, base_dir)


def draw_initial_states(prior: JointPrior, posterior, seeds) -> list[np.ndarray]:
    """One over-dispersed start per chain, drawn from the prior (or its init
    bounds) and re-drawn until the log posterior is finite."""
    inits = []
    for seed in seeds:
        rng = np.random.default_rng([seed, 0x1A17])
        for _ in range(_INIT_ATTEMPTS):
            theta = prior.sample(rng)
            lp, _ = posterior(theta)
            if math.isfinite(lp):
                inits.append(theta)
                break
        else:
            raise InitializationError(
                f"could not find a feasible starting point for chain seed {seed} "
                f"after {_INIT_ATTEMPTS} prior draws"
            )
    return inits


@dataclass(frozen=True)
class CalibrationResult:
    chains: ChainSet
    report: NonIdentifiabilityReport
    output_dir: Path | None

    def gof_trace(self) -> np.ndarray:
        """(chain_id, iteration, gof) rows across all chains."""
        rows = []
        for c in self.chains.chains:
            rows.append(np.column_stack([
                np.full(len(c), c.chain_id), c.iterations, c.gof,
            ]))
        return np.concatenate(rows)


def run_calibration(config: RunConfiguration) -> CalibrationResult:
    """Run the configured chains, diagnose them, and persist the artifacts."""
    model, names = build_model(config.model_kind, config.model_settings, config.base_dir)
    posterior = make_posterior(model, config.prior, config.targets)
    proposal = build_proposal(config)
    inits = draw_initial_states(config.prior, posterior, config.options.seeds)
    chains = run_chains(posterior, proposal, config.options, inits, names=tuple(names))
    if len(chains) >= 2:
        report = detect_nonidentifiability(chains, config.prior, config.thresholds)
    else:
        report = None
    out = None
    if config.output_dir is not None:
        out = chainstore.write_run(config.output_dir, chains, _run_meta(config, chains, report))
        _write_gof_trace(out / "gof_trace.csv", chains)
        if report is not None:
            import json

            with open(out / "report.json", "w", encoding="utf-8") as fh:
                json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
    return CalibrationResult(chains=chains, report=report, output_dir=out)


def _run_meta(config: RunConfiguration, chains: ChainSet,
              report: NonIdentifiabilityReport | None) -> dict:
    return {
        "run_id": config.run_id,
        "model": config.model_kind,
        "param_names": list(chains.names),
        "sampler": {
            "iterations": config.options.iterations,
            "burn_in": config.options.burn_in,
            "thinning": config.options.thinning,
            "seeds": list(config.options.seeds),
        },
        "priors": joint_prior_to_dicts(config.prior),
        "thresholds": {
            "rhat": config.thresholds.rhat,
            "correlation": config.thresholds.correlation,
            "flat_ratio": config.thresholds.flat_ratio,
        },
        "converged": None if report is None else report.converged,
    }


def _write_gof_trace(path: Path, chains: ChainSet) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["chain_id", "iteration", "gof"])
        for c in chains.chains:
            for it, g in zip(c.iterations, c.gof):
                w.writerow([c.chain_id, int(it), repr(float(g))])


def run_sensitivity(config: RunConfiguration) -> list[dict]:
    """One calibration per prior set; returns (and persists) the summary rows.

    A failed sub-run is recorded as a row with its error message and the
    sweep continues, so one divergent prior cannot sink the whole analysis.
    """
    if config.sensitivity is None:
        raise ConfigurationError("configuration has no [sensitivity] section")
    sweep = config.sensitivity
    rows: list[dict] = []
    for set_id, prior in sweep.prior_sets:
        sub_out = config.output_dir / set_id if config.output_dir is not None else None
        sub = config.with_prior(prior, run_id=f"{config.run_id}_{set_id}", output_dir=sub_out)
        try:
            result = run_calibration(sub)
        except CalibrationError as exc:
            logger.warning("sensitivity sub-run %s failed: %s", set_id, exc)
            for p in sweep.parameters:
                rows.append({"prior_set": set_id, "parameter": p, "status": f"failed: {exc}",
                             "posterior_mean": math.nan, "posterior_sd": math.nan,
                             "rhat": math.nan, "gof_median": math.nan})
            continue
        pooled_gof = result.chains.pooled_gof()
        gof_median = float(np.median(pooled_gof))
        for p in sweep.parameters:
            samples = np.concatenate([c.parameter(p) for c in result.chains.chains])
            rhat = gelman_rubin(result.chains, p).point_estimate if len(result.chains) > 1 else math.nan
            rows.append({
                "prior_set": set_id,
                "parameter": p,
                "status": "ok",
                "posterior_mean": float(samples.mean()),
                "posterior_sd": float(samples.std(ddof=1)),
                "rhat": rhat,
                "gof_median": gof_median,
            })
    if config.output_dir is not None:
        config.output_dir.mkdir(parents=True, exist_ok=True)
        path = config.output_dir / "sweep_summary.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, fieldnames=["prior_set", "parameter", "status",
                                               "posterior_mean", "posterior_sd",
                                               "rhat", "gof_median"])
            w.writeheader()
            w.writerows(rows)
    return rows
