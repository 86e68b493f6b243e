"""Per-parameter prior distributions and their independence product.

Four families cover the shipped case studies: improper (flat, unnormalized)
uniforms over a half line or interval, proper uniforms, normals, and gammas
in shape/rate form. Evaluation is pure; sampling takes a caller-owned
``numpy.random.Generator`` so chains never share a stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AlignmentError, ConfigurationError

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class ImproperUniform:
    """Flat unnormalized prior on [lower, upper); log-density 0 inside, -inf outside.

    Sampling (for chain initialization) needs explicit finite init bounds,
    since the distribution itself is not normalizable.
    """

    lower: float = 0.0
    upper: float | None = None
    init_lower: float | None = None
    init_upper: float | None = None

    def __post_init__(self):
        if self.upper is not None and not (self.lower < self.upper):
            raise ValueError(f"improper uniform needs lower < upper, got [{self.lower}, {self.upper}]")

    def log_density(self, x: float) -> float:
        if x < self.lower:
            return -math.inf
        if self.upper is not None and x > self.upper:
            return -math.inf
        return 0.0

    def sample(self, rng: np.random.Generator) -> float:
        lo = self.init_lower if self.init_lower is not None else self.lower
        hi = self.init_upper if self.init_upper is not None else self.upper
        if lo is None or hi is None or not (math.isfinite(lo) and math.isfinite(hi)):
            raise ConfigurationError(
                "improper uniform prior needs finite init_lower/init_upper to be sampled"
            )
        return float(rng.uniform(lo, hi))

    @property
    def mean(self) -> float:
        return math.nan

    @property
    def sd(self) -> float:
        return math.inf


@dataclass(frozen=True)
class Uniform:
    """Proper uniform on [a, b)."""

    a: float
    b: float

    def __post_init__(self):
        if not (self.a < self.b):
            raise ValueError(f"uniform needs a < b, got [{self.a}, {self.b}]")

    def log_density(self, x: float) -> float:
        if self.a <= x <= self.b:
            return -math.log(self.b - self.a)
        return -math.inf

    def sample(self, rng: np.random.Generator) -> float:
        return float(rng.uniform(self.a, self.b))

    @property
    def mean(self) -> float:
        return 0.5 * (self.a + self.b)

    @property
    def sd(self) -> float:
        return (self.b - self.a) / math.sqrt(12.0)


@dataclass(frozen=True)
class Normal:
    mu: float
    sigma: float

    def __post_init__(self):
        if not (self.sigma > 0):
            raise ValueError(f"normal needs sigma > 0, got {self.sigma}")

    def log_density(self, x: float) -> float:
        z = (x - self.mu) / self.sigma
        return -_LOG_SQRT_2PI - math.log(self.sigma) - 0.5 * z * z

    def sample(self, rng: np.random.Generator) -> float:
        return float(rng.normal(self.mu, self.sigma))

    @property
    def mean(self) -> float:
        return self.mu

    @property
    def sd(self) -> float:
        return self.sigma


@dataclass(frozen=True)
class Gamma:
    """Gamma in shape/rate form: density ~ x^(shape-1) exp(-rate x) on x >= 0."""

    shape: float
    rate: float

    def __post_init__(self):
        if not (self.shape > 0 and self.rate > 0):
            raise ValueError(f"gamma needs shape > 0 and rate > 0, got ({self.shape}, {self.rate})")

    def log_density(self, x: float) -> float:
        if x < 0:
            return -math.inf
        if x == 0:
            # boundary: density 0 for shape > 1, rate for shape == 1, +inf for shape < 1
            if self.shape > 1:
                return -math.inf
            if self.shape == 1:
                return math.log(self.rate)
            return math.inf
        return (
            self.shape * math.log(self.rate)
            - math.lgamma(self.shape)
            + (self.shape - 1.0) * math.log(x)
            - self.rate * x
        )

    def sample(self, rng: np.random.Generator) -> float:
        return float(rng.gamma(self.shape, 1.0 / self.rate))

    @property
    def mean(self) -> float:
        return self.shape / self.rate

    @property
    def sd(self) -> float:
        return math.sqrt(self.shape) / self.rate


PriorSpec = ImproperUniform | Uniform | Normal | Gamma


def log_prior_density(spec: PriorSpec, x: float) -> float:
    """Log density of one prior factor at x; -inf outside support."""
    return spec.log_density(x)


def sample_prior(spec: PriorSpec, rng: np.random.Generator) -> float:
    """One draw from the prior (or, for improper uniforms, its init bounds)."""
    return spec.sample(rng)


@dataclass(frozen=True)
class JointPrior:
    """Independence product of one prior per calibration parameter, in order."""

    names: tuple[str, ...]
    specs: tuple[PriorSpec, ...]

    def __post_init__(self):
        if len(self.names) != len(self.specs):
            raise ValueError("names and specs must have the same length")
        if len(set(self.names)) != len(self.names):
            raise ValueError("parameter names must be unique")

    def __len__(self):
        return len(self.specs)

    def log_density(self, theta) -> float:
        """Sum of per-parameter log densities; -inf if any factor is -inf."""
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (len(self.specs),):
            raise AlignmentError(
                f"theta has shape {theta.shape}, prior has {len(self.specs)} factors"
            )
        total = 0.0
        for spec, x in zip(self.specs, theta):
            lp = spec.log_density(float(x))
            if lp == -math.inf:
                return -math.inf
            total += lp
        return total

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        """One joint draw; used to over-disperse chain starting points."""
        return np.array([spec.sample(rng) for spec in self.specs])

    def spec_for(self, name: str) -> PriorSpec:
        try:
            return self.specs[self.names.index(name)]
        except ValueError:
            raise KeyError(f"no prior for parameter {name!r}") from None


def joint_log_prior(prior: JointPrior, theta) -> float:
    return prior.log_density(theta)
