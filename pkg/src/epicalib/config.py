"""Run configuration: a single TOML file, fully validated before any work.

Sections: [run] label, [model] (kind plus model-specific settings),
[targets] (builtin name or CSV path), [[priors.parameters]] one block per
calibrated parameter, [proposal], [sampler], optional [diagnostics]
thresholds, [output], and an optional [sensitivity] sweep. Paths are
resolved relative to the config file; the EPICALIB_OUTPUT_ROOT environment
variable re-roots relative output directories and nothing else.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

import numpy as np

from .errors import ConfigurationError
from .diagnostics import DiagnosticThresholds
from .priors import Gamma, ImproperUniform, JointPrior, Normal, PriorSpec, Uniform
from .sampler import ProposalSpec, SamplerOptions
from .targets import TargetSet, hpv_target_set, load_target_set
from .sis import sis_case_study_targets

OUTPUT_ROOT_ENV = "EPICALIB_OUTPUT_ROOT"

_PRIOR_KINDS = {
    "improper_uniform": ("lower", "upper", "init_lower", "init_upper"),
    "uniform": ("a", "b"),
    "normal": ("mu", "sigma"),
    "gamma": ("shape", "rate"),
}

_MODEL_KEYS = {
    "sis": {"kind", "dt", "horizon", "equilibrium_tol", "s0", "i0"},
    "hpv": {"kind", "cohort_size", "start_age", "end_age", "model_seed",
            "baseline_table", "mortality_table"},
}

_BUILTIN_TARGETS = {
    "sis_case_study": sis_case_study_targets,
    "hpv": hpv_target_set,
}


def _require_keys(section: dict, allowed, where: str):
    unknown = set(section) - set(allowed)
    if unknown:
        raise ConfigurationError(f"unknown key(s) {sorted(unknown)} in [{where}]")


def parse_prior_spec(block: dict, where: str) -> tuple[str, PriorSpec]:
    """One prior block {name, kind, params...} -> (parameter name, spec)."""
    if "name" not in block or "kind" not in block:
        raise ConfigurationError(f"{where}: every prior block needs 'name' and 'kind'")
    name = block["name"]
    kind = block["kind"]
    if kind not in _PRIOR_KINDS:
        raise ConfigurationError(
            f"{where} ({name}): unknown prior kind {kind!r}; choose from {sorted(_PRIOR_KINDS)}"
        )
    _require_keys({k: v for k, v in block.items() if k not in ("name", "kind")},
                  _PRIOR_KINDS[kind], f"{where} ({name})")
    params = {k: block[k] for k in _PRIOR_KINDS[kind] if k in block}
    try:
        if kind == "improper_uniform":
            spec = ImproperUniform(lower=params.get("lower", 0.0), upper=params.get("upper"),
                                   init_lower=params.get("init_lower"),
                                   init_upper=params.get("init_upper"))
        elif kind == "uniform":
            spec = Uniform(a=params["a"], b=params["b"])
        elif kind == "normal":
            spec = Normal(mu=params["mu"], sigma=params["sigma"])
        else:
            spec = Gamma(shape=params["shape"], rate=params["rate"])
    except KeyError as exc:
        raise ConfigurationError(f"{where} ({name}): missing field {exc}") from None
    except ValueError as exc:
        raise ConfigurationError(f"{where} ({name}): {exc}") from None
    return name, spec


def prior_spec_to_dict(name: str, spec: PriorSpec) -> dict:
    if isinstance(spec, ImproperUniform):
        d = {"name": name, "kind": "improper_uniform", "lower": spec.lower}
        for k in ("upper", "init_lower", "init_upper"):
            if getattr(spec, k) is not None:
                d[k] = getattr(spec, k)
        return d
    if isinstance(spec, Uniform):
        return {"name": name, "kind": "uniform", "a": spec.a, "b": spec.b}
    if isinstance(spec, Normal):
        return {"name": name, "kind": "normal", "mu": spec.mu, "sigma": spec.sigma}
    if isinstance(spec, Gamma):
        return {"name": name, "kind": "gamma", "shape": spec.shape, "rate": spec.rate}
    raise TypeError(f"unknown prior spec type {type(spec)}")


def joint_prior_to_dicts(prior: JointPrior) -> list[dict]:
    return [prior_spec_to_dict(n, s) for n, s in zip(prior.names, prior.specs)]


def joint_prior_from_dicts(blocks, where: str = "priors") -> JointPrior:
    pairs = [parse_prior_spec(b, where) for b in blocks]
    return JointPrior(names=tuple(n for n, _ in pairs), specs=tuple(s for _, s in pairs))


@dataclass(frozen=True)
class SweepSpec:
    """Prior-sensitivity sweep: alternative prior sets overriding the base run."""

    prior_sets: tuple[tuple[str, JointPrior], ...]  # (set id, full prior)
    parameters: tuple[str, ...]                     # which parameters to summarize

    def __post_init__(self):
        if len(self.prior_sets) < 2:
            raise ConfigurationError("a sensitivity sweep needs at least 2 prior sets")
        ids = [i for i, _ in self.prior_sets]
        if len(set(ids)) != len(ids):
            raise ConfigurationError(f"duplicate sensitivity prior set ids: {ids}")


@dataclass(frozen=True)
class RunConfiguration:
    """Everything a calibration run needs, fully resolved and validated."""

    run_id: str
    model_kind: str
    model_settings: dict
    targets: TargetSet
    prior: JointPrior
    proposal_scales: dict | None
    proposal_fraction: float
    block_size: int | None
    options: SamplerOptions
    thresholds: DiagnosticThresholds
    output_dir: Path | None
    base_dir: Path
    sensitivity: SweepSpec | None = None

    def with_prior(self, prior: JointPrior, run_id: str | None = None,
                   output_dir: Path | None = None) -> "RunConfiguration":
        return RunConfiguration(
            run_id=run_id or self.run_id, model_kind=self.model_kind,
            model_settings=self.model_settings, targets=self.targets, prior=prior,
            proposal_scales=self.proposal_scales, proposal_fraction=self.proposal_fraction,
            block_size=self.block_size, options=self.options, thresholds=self.thresholds,
            output_dir=output_dir if output_dir is not None else self.output_dir,
            base_dir=self.base_dir, sensitivity=None,
        )


def proposal_scale_for(name: str, spec: PriorSpec, explicit: dict | None,
                       fraction: float) -> float:
    """Explicit per-parameter scale, else fraction of the prior sd (proper
    priors) or of the bound/init width (improper uniforms)."""
    if explicit and name in explicit:
        return float(explicit[name])
    sd = spec.sd
    if math.isfinite(sd):
        return fraction * sd
    width = None
    if isinstance(spec, ImproperUniform):
        if spec.upper is not None:
            width = spec.upper - spec.lower
        elif spec.init_lower is not None and spec.init_upper is not None:
            width = spec.init_upper - spec.init_lower
    if width is None:
        raise ConfigurationError(
            f"parameter {name!r}: cannot derive a proposal scale from an unbounded "
            "improper prior; set proposal.scales explicitly"
        )
    return fraction * width


def build_proposal(config: RunConfiguration) -> ProposalSpec:
    scales = np.array([
        proposal_scale_for(n, s, config.proposal_scales, config.proposal_fraction)
        for n, s in zip(config.prior.names, config.prior.specs)
    ])
    block = config.block_size if config.block_size is not None else len(scales)
    return ProposalSpec(scales=scales, block_size=block)


def load_config(path) -> RunConfiguration:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(f"{path}: invalid TOML: {exc}") from None
    return parse_config(raw, base_dir=path.parent, source=str(path))


def parse_config(raw: dict, base_dir: Path, source: str = "<config>") -> RunConfiguration:
    _require_keys(raw, {"run", "model", "targets", "priors", "proposal", "sampler",
                        "diagnostics", "output", "sensitivity"}, "top level")

    run = raw.get("run", {})
    _require_keys(run, {"id"}, "run")
    run_id = run.get("id", "run")

    model = raw.get("model")
    if not model or "kind" not in model:
        raise ConfigurationError("missing [model] section with a 'kind'")
    kind = model["kind"]
    if kind in _MODEL_KEYS:
        _require_keys(model, _MODEL_KEYS[kind], "model")
    # other kinds must be in the workflow registry; their settings are theirs
    settings = {k: v for k, v in model.items() if k != "kind"}

    targets_sec = raw.get("targets")
    if not targets_sec:
        raise ConfigurationError("missing [targets] section")
    _require_keys(targets_sec, {"builtin", "path"}, "targets")
    if ("builtin" in targets_sec) == ("path" in targets_sec):
        raise ConfigurationError("[targets] needs exactly one of 'builtin' or 'path'")
    if "builtin" in targets_sec:
        b = targets_sec["builtin"]
        if b not in _BUILTIN_TARGETS:
            raise ConfigurationError(
                f"targets.builtin must be one of {sorted(_BUILTIN_TARGETS)}, got {b!r}"
            )
        targets = _BUILTIN_TARGETS[b]()
    else:
        targets = load_target_set(base_dir / targets_sec["path"])

    priors_sec = raw.get("priors")
    if not priors_sec or "parameters" not in priors_sec:
        raise ConfigurationError("missing [[priors.parameters]] blocks")
    _require_keys(priors_sec, {"parameters"}, "priors")
    prior = joint_prior_from_dicts(priors_sec["parameters"], "priors.parameters")

    proposal = raw.get("proposal", {})
    _require_keys(proposal, {"scales", "block_size", "scale_fraction"}, "proposal")
    scales = proposal.get("scales")
    if scales is not None:
        unknown = set(scales) - set(prior.names)
        if unknown:
            raise ConfigurationError(f"proposal.scales for unknown parameter(s) {sorted(unknown)}")
    fraction = float(proposal.get("scale_fraction", 0.05))
    if fraction <= 0:
        raise ConfigurationError("proposal.scale_fraction must be > 0")
    block_size = proposal.get("block_size")
    if block_size is not None and not (1 <= int(block_size) <= len(prior)):
        raise ConfigurationError(
            f"proposal.block_size must be in [1, {len(prior)}], got {block_size}"
        )

    sampler_sec = raw.get("sampler")
    if not sampler_sec:
        raise ConfigurationError("missing [sampler] section")
    _require_keys(sampler_sec, {"iterations", "burn_in", "thinning", "seeds"}, "sampler")
    if "iterations" not in sampler_sec or "seeds" not in sampler_sec:
        raise ConfigurationError("[sampler] needs 'iterations' and 'seeds'")
    try:
        options = SamplerOptions(
            iterations=int(sampler_sec["iterations"]),
            burn_in=(int(sampler_sec["burn_in"]) if "burn_in" in sampler_sec else None),
            thinning=int(sampler_sec.get("thinning", 10)),
            seeds=tuple(int(s) for s in sampler_sec["seeds"]),
        )
    except ValueError as exc:
        raise ConfigurationError(f"[sampler]: {exc}") from None

    diag = raw.get("diagnostics", {})
    _require_keys(diag, {"rhat_threshold", "correlation_threshold", "flat_ratio_threshold"},
                  "diagnostics")
    thresholds = DiagnosticThresholds(
        rhat=float(diag.get("rhat_threshold", 1.1)),
        correlation=float(diag.get("correlation_threshold", 0.9)),
        flat_ratio=float(diag.get("flat_ratio_threshold", 0.9)),
    )

    output = raw.get("output", {})
    _require_keys(output, {"directory"}, "output")
    output_dir = None
    if "directory" in output:
        out = Path(output["directory"])
        root = os.environ.get(OUTPUT_ROOT_ENV)
        if not out.is_absolute():
            out = (Path(root) / out) if root else (base_dir / out)
        output_dir = out

    sensitivity = None
    if "sensitivity" in raw:
        sensitivity = _parse_sensitivity(raw["sensitivity"], prior)

    _validate_model_settings(kind, settings, prior, targets, base_dir)
    return RunConfiguration(
        run_id=run_id, model_kind=kind, model_settings=settings, targets=targets,
        prior=prior, proposal_scales=scales, proposal_fraction=fraction,
        block_size=(int(block_size) if block_size is not None else None),
        options=options, thresholds=thresholds, output_dir=output_dir,
        base_dir=base_dir, sensitivity=sensitivity,
    )


def _parse_sensitivity(sec: dict, base_prior: JointPrior) -> SweepSpec:
    _require_keys(sec, {"parameters", "prior_sets"}, "sensitivity")
    if "prior_sets" not in sec:
        raise ConfigurationError("[sensitivity] needs [[sensitivity.prior_sets]] blocks")
    params = tuple(sec.get("parameters", base_prior.names))
    unknown = set(params) - set(base_prior.names)
    if unknown:
        raise ConfigurationError(f"sensitivity.parameters unknown: {sorted(unknown)}")
    sets = []
    for k, block in enumerate(sec["prior_sets"]):
        _require_keys(block, {"id", "parameters"}, f"sensitivity.prior_sets[{k}]")
        if "id" not in block or "parameters" not in block:
            raise ConfigurationError(
                f"sensitivity.prior_sets[{k}] needs 'id' and [[...parameters]] overrides"
            )
        overrides = dict(
            parse_prior_spec(b, f"sensitivity.prior_sets[{k}].parameters")
            for b in block["parameters"]
        )
        unknown = set(overrides) - set(base_prior.names)
        if unknown:
            raise ConfigurationError(
                f"sensitivity.prior_sets[{k}] overrides unknown parameter(s) {sorted(unknown)}"
            )
        specs = tuple(
            overrides.get(n, s) for n, s in zip(base_prior.names, base_prior.specs)
        )
        sets.append((str(block["id"]), JointPrior(names=base_prior.names, specs=specs)))
    return SweepSpec(prior_sets=tuple(sets), parameters=params)


def _validate_model_settings(kind: str, settings: dict, prior: JointPrior,
                             targets: TargetSet, base_dir: Path) -> None:
    # late import: workflow's registry owns the parameter lists
    from .workflow import model_parameter_names

    expected = model_parameter_names(kind, settings)
    if tuple(prior.names) != tuple(expected):
        raise ConfigurationError(
            f"priors must cover the model's parameters in order {list(expected)}, "
            f"got {list(prior.names)}"
        )
    for key in ("baseline_table", "mortality_table"):
        if key in settings and not (base_dir / settings[key]).exists():
            raise ConfigurationError(f"model.{key}: file not found: {base_dir / settings[key]}")
