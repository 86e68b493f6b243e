"""Random-walk Metropolis-Hastings with optional block updates.

One iteration proposes a symmetric Gaussian step on a uniformly chosen subset
of coordinates (the block), accepts with probability
min{1, exp(log_post(candidate) - log_post(current) + log_q_ratio)}, and
records the state after burn-in discard and thinning. The log_q_ratio term is
zero for the symmetric walk but is threaded through so asymmetric proposals
can supply their Hastings correction.

The sampler is generic over the posterior: it takes any callable
``theta -> (log_posterior, gof)``. ``make_posterior`` builds that callable
from a model, a joint prior and a target set, short-circuiting the (possibly
expensive) model evaluation whenever the prior already vetoes the point.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConfigurationError,
    EvaluationError,
    InfeasibleParametersError,
    InitializationError,
    NumericalError,
)
from .priors import JointPrior
from .targets import TargetSet, log_likelihood

logger = logging.getLogger("epicalib.sampler")


@dataclass(frozen=True)
class ProposalSpec:
    """Per-parameter random-walk scales and the block size s.

    A scale of zero freezes its coordinate (degenerate walk); block_size = n
    updates every coordinate each iteration.
    """

    scales: np.ndarray
    block_size: int

    def __post_init__(self):
        scales = np.asarray(self.scales, dtype=float)
        object.__setattr__(self, "scales", scales)
        if scales.ndim != 1 or scales.size == 0:
            raise ValueError("scales must be a non-empty 1-D array")
        if np.any(scales < 0) or not np.all(np.isfinite(scales)):
            raise ValueError("proposal scales must be finite and >= 0")
        if not (1 <= self.block_size <= scales.size):
            raise ValueError(
                f"block_size must be in [1, {scales.size}], got {self.block_size}"
            )


@dataclass(frozen=True)
class SamplerOptions:
    iterations: int
    burn_in: int | None = None
    thinning: int = 10
    seeds: tuple[int, ...] = (0,)

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.burn_in is None:
            object.__setattr__(self, "burn_in", self.iterations // 5)
        if not (0 <= self.burn_in < self.iterations):
            raise ValueError("burn_in must satisfy 0 <= burn_in < iterations")
        if self.thinning < 1:
            raise ValueError("thinning must be >= 1")
        seeds = tuple(int(s) for s in self.seeds)
        object.__setattr__(self, "seeds", seeds)
        if len(set(seeds)) != len(seeds):
            raise ConfigurationError(f"duplicate chain seeds: {seeds}")

    @property
    def recorded_length(self) -> int:
        return (self.iterations - self.burn_in) // self.thinning


@dataclass(frozen=True)
class Chain:
    """Recorded trace of one chain: thinned post-burn-in states plus metadata."""

    names: tuple[str, ...]
    iterations: np.ndarray  # original iteration index of each recorded state
    params: np.ndarray      # (recorded, n_params)
    log_post: np.ndarray
    gof: np.ndarray
    accepted: np.ndarray    # whether the move at that iteration was accepted
    seed: int | None = None
    acceptance_rate: float | None = None
    chain_id: int = 0

    def __len__(self):
        return self.params.shape[0]

    def parameter(self, name: str) -> np.ndarray:
        return self.params[:, self.names.index(name)]


@dataclass(frozen=True)
class ChainSet:
    chains: tuple[Chain, ...]

    def __post_init__(self):
        if not self.chains:
            raise ValueError("ChainSet needs at least one chain")
        names = self.chains[0].names
        if any(c.names != names for c in self.chains):
            raise ValueError("all chains must share parameter names")

    def __len__(self):
        return len(self.chains)

    @property
    def names(self) -> tuple[str, ...]:
        return self.chains[0].names

    def parameter_matrix(self, name: str) -> np.ndarray:
        """(n_chains, recorded) matrix of one parameter across chains."""
        return np.stack([c.parameter(name) for c in self.chains])

    def pooled(self) -> np.ndarray:
        """All recorded states stacked, shape (sum recorded, n_params)."""
        return np.concatenate([c.params for c in self.chains])

    def pooled_gof(self) -> np.ndarray:
        return np.concatenate([c.gof for c in self.chains])


def make_posterior(model, prior: JointPrior, targets: TargetSet):
    """Callable theta -> (log posterior, gof) for run_chain.

    The model is only evaluated inside the prior's support; evaluation
    failures count as zero-likelihood points rather than crashing the chain.
    """

    def posterior(theta):
        lp_prior = prior.log_density(theta)
        if lp_prior == -math.inf:
            return -math.inf, math.inf
        try:
            outputs = model(theta)
            ll = log_likelihood(outputs, targets)
        except (InfeasibleParametersError, EvaluationError, NumericalError,
                ValueError, ArithmeticError) as exc:
            logger.warning("model evaluation failed at theta=%s: %s", theta, exc)
            return -math.inf, math.inf
        return lp_prior + ll, -2.0 * ll

    return posterior


def log_posterior(model, prior: JointPrior, targets: TargetSet, theta) -> float:
    """Joint log prior plus mode-normalized log likelihood; -inf outside support."""
    lp, _ = make_posterior(model, prior, targets)(np.asarray(theta, dtype=float))
    return lp


def propose(current: np.ndarray, spec: ProposalSpec, rng: np.random.Generator):
    """Perturb a uniformly chosen block of coordinates; returns (candidate, log_q_ratio)."""
    n = current.shape[0]
    if spec.scales.shape[0] != n:
        raise ValueError(f"proposal has {spec.scales.shape[0]} scales for {n} parameters")
    idx = rng.choice(n, size=spec.block_size, replace=False)
    candidate = current.copy()
    candidate[idx] += rng.normal(0.0, 1.0, size=spec.block_size) * spec.scales[idx]
    return candidate, 0.0


def acceptance_probability(log_post_current: float, log_post_candidate: float,
                           log_q_ratio: float = 0.0) -> float:
    """min{1, exp(delta log posterior + log_q_ratio)}; 0 for infeasible candidates."""
    if not math.isfinite(log_post_current):
        raise InitializationError(
            "current state has non-finite log posterior; chains must start in support"
        )
    if log_post_candidate == -math.inf:
        return 0.0
    if math.isnan(log_post_candidate):
        raise EvaluationError("candidate log posterior is NaN")
    diff = log_post_candidate - log_post_current + log_q_ratio
    return 1.0 if diff >= 0 else math.exp(diff)


def run_chain(posterior, proposal: ProposalSpec, options: SamplerOptions,
              init, seed: int, names: tuple[str, ...] | None = None,
              chain_id: int = 0) -> Chain:
    """Run one Metropolis-Hastings chain; deterministic given the seed."""
    theta = np.asarray(init, dtype=float).copy()
    if names is None:
        names = tuple(f"x{i}" for i in range(theta.shape[0]))
    rng = np.random.default_rng(seed)
    lp, gof = posterior(theta)
    if not math.isfinite(lp):
        raise InitializationError(
            "initial state has non-finite log posterior; draw starting points "
            "from the prior (or its init bounds) instead"
        )
    n_rec = options.recorded_length
    rec_iter = np.empty(n_rec, dtype=np.int64)
    rec_params = np.empty((n_rec, theta.shape[0]))
    rec_lp = np.empty(n_rec)
    rec_gof = np.empty(n_rec)
    rec_acc = np.empty(n_rec, dtype=bool)
    n_accepted = 0
    r = 0
    for t in range(1, options.iterations + 1):
        candidate, log_q = propose(theta, proposal, rng)
        lp_cand, gof_cand = posterior(candidate)
        a = acceptance_probability(lp, lp_cand, log_q)
        accepted = rng.random() < a
        if accepted:
            theta, lp, gof = candidate, lp_cand, gof_cand
            n_accepted += 1
        if t > options.burn_in and (t - options.burn_in) % options.thinning == 0:
            rec_iter[r] = t
            rec_params[r] = theta
            rec_lp[r] = lp
            rec_gof[r] = gof
            rec_acc[r] = accepted
            r += 1
    assert r == n_rec
    return Chain(
        names=tuple(names),
        iterations=rec_iter,
        params=rec_params,
        log_post=rec_lp,
        gof=rec_gof,
        accepted=rec_acc,
        seed=seed,
        acceptance_rate=n_accepted / options.iterations,
        chain_id=chain_id,
    )


def run_chains(posterior, proposal: ProposalSpec, options: SamplerOptions,
               inits, names: tuple[str, ...] | None = None) -> ChainSet:
    """Run one chain per seed in options.seeds from the given starting points."""
    inits = [np.asarray(x, dtype=float) for x in inits]
    if len(inits) != len(options.seeds):
        raise ConfigurationError(
            f"{len(inits)} initial states for {len(options.seeds)} seeds"
        )
    chains = tuple(
        run_chain(posterior, proposal, options, init, seed, names=names, chain_id=k)
        for k, (init, seed) in enumerate(zip(inits, options.seeds))
    )
    return ChainSet(chains=chains)
