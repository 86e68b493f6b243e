"""Two-compartment susceptible-infected-susceptible model.

The dynamics are dS = -beta*S*I + gamma*I and dI = beta*S*I - gamma*I with
beta = c*p (contact rate times per-contact transmission probability) and
gamma = 1/d (reciprocal infectious period). Fractions are simulated, so
S + I = 1 throughout; the endemic equilibrium infected fraction is
1 - gamma/beta whenever beta > gamma, else 0.

Calibrating (c, p, d) against equilibrium prevalence alone is deliberately
non-identifiable: every parameter set on the ridge gamma = beta*(1 - I*)
produces the same terminal state. The diagnostics module is pointed at this
model to demonstrate detecting and resolving that ridge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .targets import Target, TargetSet

# parameter order used everywhere the SIS model meets the sampler
PARAM_NAMES = ("c", "p", "d")


@dataclass(frozen=True)
class SisParameters:
    """Contact rate c > 0, transmission probability p in [0, 1], infectious period d > 0."""

    c: float
    p: float
    d: float

    def __post_init__(self):
        if not (self.c > 0 and self.d > 0 and 0 <= self.p <= 1):
            raise ValueError(f"invalid SIS parameters c={self.c}, p={self.p}, d={self.d}")

    @property
    def beta(self) -> float:
        return self.c * self.p

    @property
    def gamma(self) -> float:
        return 1.0 / self.d


@dataclass(frozen=True)
class SisSimConfig:
    s0: float = 0.99
    i0: float = 0.01
    dt: float = 0.01
    horizon: float = 500.0
    equilibrium_tol: float = 1e-10

    def __post_init__(self):
        if abs(self.s0 + self.i0 - 1.0) > 1e-12:
            raise ValueError(f"s0 + i0 must equal 1, got {self.s0 + self.i0}")
        if not (self.dt > 0 and self.horizon > 0):
            raise ValueError("dt and horizon must be positive")


DEFAULT_CONFIG = SisSimConfig()


def _integrate(params: SisParameters, config: SisSimConfig, record: bool):
    """Fixed-step RK4 on the (S, I) pair, stopping early once the per-step
    change in I falls below the equilibrium tolerance."""
    beta, gamma = params.beta, params.gamma
    dt = config.dt
    n_steps = int(round(config.horizon / dt))
    s, i = config.s0, config.i0
    trajectory = [(0.0, s, i)] if record else None
    for step in range(1, n_steps + 1):
        ks1 = -beta * s * i + gamma * i
        ki1 = -ks1
        s2, i2 = s + 0.5 * dt * ks1, i + 0.5 * dt * ki1
        ks2 = -beta * s2 * i2 + gamma * i2
        ki2 = -ks2
        s3, i3 = s + 0.5 * dt * ks2, i + 0.5 * dt * ki2
        ks3 = -beta * s3 * i3 + gamma * i3
        ki3 = -ks3
        s4, i4 = s + dt * ks3, i + dt * ki3
        ks4 = -beta * s4 * i4 + gamma * i4
        ki4 = -ks4
        ds = dt * (ks1 + 2.0 * ks2 + 2.0 * ks3 + ks4) / 6.0
        di = dt * (ki1 + 2.0 * ki2 + 2.0 * ki3 + ki4) / 6.0
        s += ds
        i += di
        if not (math.isfinite(s) and math.isfinite(i)):
            raise NumericalError(f"SIS integration left the finite range at step {step}")
        if record:
            trajectory.append((step * dt, s, i))
        if abs(di) < config.equilibrium_tol:
            break
    return s, i, trajectory


def simulate_sis(params: SisParameters, config: SisSimConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Integrate to the horizon (or per-step equilibrium) and return (I, S)."""
    s, i, _ = _integrate(params, config, record=False)
    return np.array([i, s])


def simulate_sis_trajectory(params: SisParameters, config: SisSimConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Full recorded path as an array of (t, S, I) rows; used by conservation
    and step-halving checks and for plot exports."""
    _, _, trajectory = _integrate(params, config, record=True)
    return np.array(trajectory)


def sis_equilibrium_analytic(beta: float, gamma: float) -> float:
    """Closed-form endemic equilibrium infected fraction max(0, 1 - gamma/beta)."""
    if not (beta > 0 and gamma > 0):
        raise ValueError(f"beta and gamma must be positive, got ({beta}, {gamma})")
    return max(0.0, 1.0 - gamma / beta)


def sis_case_study_targets() -> TargetSet:
    """Two equilibrium-prevalence targets: 15,000 of 25,000 observed infected,
    with observational error folded into sd 0.01 on each compartment."""
    return TargetSet(
        targets=(
            Target(name="prob_infected", mean=0.6, sd=0.01, units="proportion"),
            Target(name="prob_susceptible", mean=0.4, sd=0.01, units="proportion"),
        )
    )


def make_sis_model(config: SisSimConfig = DEFAULT_CONFIG):
    """Model callable for the sampler: theta = (c, p, d) -> outputs (I, S)."""

    def evaluate(theta) -> np.ndarray:
        c, p, d = (float(v) for v in theta)
        return simulate_sis(SisParameters(c=c, p=p, d=d), config)

    return evaluate
