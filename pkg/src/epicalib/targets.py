"""Calibration targets and the normalized-Gaussian goodness-of-fit measure.

Each target is a Gaussian summary of an observed quantity: a mean, a standard
deviation and a name. Model outputs are scored with a mode-normalized log
likelihood whose -2x transform reduces to a sum of squared z-scores, so under
independence the total is chi-square distributed with one degree of freedom
per target.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np
from scipy import special

from .errors import AlignmentError, EvaluationError, ParseError


@dataclass(frozen=True)
class Target:
    """One Gaussian calibration target: observed mean and sd, in its own units."""

    name: str
    mean: float
    sd: float
    units: str = ""

    def __post_init__(self):
        if not (self.sd > 0):
            raise ValueError(f"target {self.name!r}: sd must be > 0, got {self.sd}")


@dataclass(frozen=True)
class TargetSet:
    """Ordered collection of targets; model outputs align index-for-index."""

    targets: tuple[Target, ...]
    means: np.ndarray = field(init=False, repr=False, compare=False)
    sds: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.targets) < 1:
            raise ValueError("a TargetSet needs at least one target")
        names = [t.name for t in self.targets]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise ValueError(f"duplicate target names: {dupes}")
        object.__setattr__(self, "means", np.array([t.mean for t in self.targets]))
        object.__setattr__(self, "sds", np.array([t.sd for t in self.targets]))

    def __len__(self):
        return len(self.targets)

    @property
    def names(self) -> list[str]:
        return [t.name for t in self.targets]


def _as_outputs(outputs, targets: TargetSet) -> np.ndarray:
    x = np.asarray(outputs, dtype=float)
    if x.ndim != 1 or x.shape[0] != len(targets):
        raise AlignmentError(
            f"model outputs have shape {x.shape}, expected ({len(targets)},)"
        )
    if not np.all(np.isfinite(x)):
        bad = int(np.flatnonzero(~np.isfinite(x))[0])
        raise EvaluationError(
            f"non-finite model output at index {bad} ({targets.targets[bad].name!r})"
        )
    return x


def gof_total(outputs, targets: TargetSet) -> float:
    """Total goodness of fit: sum over targets of ((x_k - mean_k) / sd_k)^2.

    This equals -2 * sum_k ln[f_k(x_k) / f_k(mean_k)] for Gaussian target
    densities f_k, i.e. minus twice the mode-normalized log likelihood.
    Lower is better; a perfect fit scores 0.
    """
    x = _as_outputs(outputs, targets)
    z = (x - targets.means) / targets.sds
    return float(np.dot(z, z))


def log_likelihood(outputs, targets: TargetSet) -> float:
    """Mode-normalized Gaussian log likelihood; always <= 0, 0 at a perfect fit."""
    return -0.5 * gof_total(outputs, targets)


def chi_square_p_value(gof: float, dof: int) -> float:
    """Upper-tail probability P(chi2_dof > gof) via the regularized incomplete gamma."""
    if gof < 0:
        raise ValueError(f"gof must be >= 0, got {gof}")
    if dof < 1 or int(dof) != dof:
        raise ValueError(f"dof must be a positive integer, got {dof}")
    return float(special.gammaincc(dof / 2.0, gof / 2.0))


_COLUMNS = ("name", "mean", "sd", "units")


def load_target_set(path) -> TargetSet:
    """Load targets from a CSV with header ``name,mean,sd,units``."""
    with open(path, newline="", encoding="utf-8") as fh:
        return _parse_target_rows(csv.reader(fh), str(path))


def _parse_target_rows(rows, source: str) -> TargetSet:
    it = iter(rows)
    try:
        header = [h.strip() for h in next(it)]
    except StopIteration:
        raise ParseError(f"{source}: empty target file") from None
    if header != list(_COLUMNS):
        raise ParseError(f"{source}: expected header {','.join(_COLUMNS)}, got {','.join(header)}")
    targets = []
    for lineno, row in enumerate(it, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(_COLUMNS):
            raise ParseError(f"{source}: expected {len(_COLUMNS)} columns, got {len(row)}", line=lineno)
        name, mean_s, sd_s, units = (c.strip() for c in row)
        try:
            mean, sd = float(mean_s), float(sd_s)
        except ValueError:
            raise ParseError(f"{source}: row {name!r} has non-numeric mean/sd", line=lineno) from None
        if not math.isfinite(mean) or not math.isfinite(sd) or sd <= 0:
            raise ParseError(f"{source}: row {name!r} needs finite mean and sd > 0", line=lineno)
        targets.append(Target(name=name, mean=mean, sd=sd, units=units))
    if not targets:
        raise ParseError(f"{source}: no target rows")
    return TargetSet(targets=tuple(targets))


def hpv_target_set() -> TargetSet:
    """The 31 shipped HPV calibration targets (durations, prevalence, type
    distributions among lesions/cancer, and invasive cancer incidence)."""
    ref = resources.files("epicalib.data") / "hpv_targets.csv"
    with ref.open(newline="", encoding="utf-8") as fh:
        return _parse_target_rows(csv.reader(fh), "hpv_targets.csv")
