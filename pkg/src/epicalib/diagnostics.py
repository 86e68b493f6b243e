"""Convergence and non-identifiability diagnostics.

Non-identifiability shows up in chains in three recognizable ways: the
Gelman-Rubin statistic stays far above 1 because separately started chains
wander distinct parts of an equivalence ridge; pooled samples show strong
cross-parameter correlation along the ridge; and posteriors stay as broad as
their priors because the data carry no information about the direction. The
report produced here aggregates all three signals per parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy import stats

from .errors import DegenerateChainError, InsufficientChainsError
from .priors import JointPrior, PriorSpec
from .sampler import ChainSet
from .targets import TargetSet, gof_total


@dataclass(frozen=True)
class GelmanRubinResult:
    parameter: str
    point_estimate: float
    upper_ci: float


def gelman_rubin_arrays(sequences: np.ndarray, parameter: str = "") -> GelmanRubinResult:
    """Potential scale reduction factor from an (n_chains, length) array.

    Classic two-variance construction: within-chain variance W, between-chain
    variance B, pooled variance estimate, with the degrees-of-freedom
    correction and an upper bound at the 97.5% quantile of the F distribution
    for the between/within variance ratio.
    """
    seqs = np.asarray(sequences, dtype=float)
    if seqs.ndim != 2:
        raise ValueError(f"expected a 2-D (chains, length) array, got shape {seqs.shape}")
    m, n = seqs.shape
    if m < 2:
        raise InsufficientChainsError("Gelman-Rubin needs at least 2 chains")
    if n < 10:
        raise ValueError(f"chains too short for Gelman-Rubin: length {n} < 10")
    xbar = seqs.mean(axis=1)
    s2 = seqs.var(axis=1, ddof=1)
    w = s2.mean()
    if w <= 0:
        raise DegenerateChainError("within-chain variance is zero")
    b_over_n = xbar.var(ddof=1)  # = B/n
    v = (n - 1) / n * w + (1 + 1 / m) * b_over_n

    # sampling-variability correction (Gelman & Rubin 1992)
    var_w = s2.var(ddof=1) / m
    var_b = 2.0 * (n * b_over_n) ** 2 / (m - 1)
    mu = xbar.mean()
    cov_wb = (n / m) * (
        _cov(s2, xbar**2) - 2.0 * mu * _cov(s2, xbar)
    )
    var_v = (
        ((n - 1) ** 2) * var_w
        + ((1 + 1 / m) ** 2) * var_b
        + 2.0 * (n - 1) * (1 + 1 / m) * cov_wb
    ) / n**2
    if var_v > 0:
        df_v = 2.0 * v**2 / var_v
        df_adj = (df_v + 3.0) / (df_v + 1.0)
    else:
        df_adj = 1.0

    r2_fixed = (n - 1) / n
    r2_random = (1 + 1 / m) * b_over_n / w
    point = math.sqrt(df_adj * (r2_fixed + r2_random))
    if var_w > 0 and b_over_n > 0:
        w_df = 2.0 * w**2 / var_w
        f_q = stats.f.ppf(0.975, m - 1, w_df)
        upper = math.sqrt(df_adj * (r2_fixed + f_q * r2_random))
    else:
        upper = point
    return GelmanRubinResult(parameter=parameter, point_estimate=point, upper_ci=max(upper, point))


def _cov(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.cov(a, b, ddof=1)[0, 1])


def gelman_rubin(chains: ChainSet, parameter: str) -> GelmanRubinResult:
    """R-hat for one parameter of a multi-chain run."""
    return gelman_rubin_arrays(chains.parameter_matrix(parameter), parameter)


def gelman_rubin_all(chains: ChainSet) -> dict[str, GelmanRubinResult]:
    return {name: gelman_rubin(chains, name) for name in chains.names}


def autocorrelation(series, max_lag: int) -> np.ndarray:
    """Normalized sample autocorrelation at lags 0..max_lag (lag 0 is 1)."""
    x = np.asarray(series, dtype=float)
    if x.ndim != 1:
        raise ValueError("autocorrelation expects a 1-D series")
    if len(x) <= max_lag:
        raise ValueError(f"series of length {len(x)} too short for max_lag {max_lag}")
    dx = x - x.mean()
    denom = float(np.dot(dx, dx))
    if denom == 0.0:
        raise DegenerateChainError("constant series has no autocorrelation")
    acf = np.empty(max_lag + 1)
    for lag in range(max_lag + 1):
        acf[lag] = np.dot(dx[: len(x) - lag], dx[lag:]) / denom
    return acf


def cross_correlation(samples) -> np.ndarray:
    """Parameter-by-parameter correlation matrix of pooled samples.

    Constant columns yield NaN off-diagonal entries (flagged, not fatal);
    the diagonal is exactly 1.
    """
    x = np.asarray(samples, dtype=float)
    if x.ndim != 2:
        raise ValueError("cross_correlation expects a 2-D (samples, parameters) array")
    if x.shape[0] < 10:
        raise ValueError("need at least 10 samples for a correlation matrix")
    centered = x - x.mean(axis=0)
    sd = centered.std(axis=0)
    k = x.shape[1]
    corr = np.full((k, k), np.nan)
    ok = sd > 0
    denom = np.outer(sd, sd)
    cov = centered.T @ centered / x.shape[0]
    with np.errstate(invalid="ignore"):
        corr[np.ix_(ok, ok)] = (cov / denom)[np.ix_(ok, ok)]
    np.fill_diagonal(corr, 1.0)
    return corr


def correlated_pairs(corr: np.ndarray, names, threshold: float):
    """(name_i, name_j, correlation) for every |corr| above the threshold."""
    pairs = []
    k = corr.shape[0]
    for i in range(k):
        for j in range(i + 1, k):
            c = corr[i, j]
            if np.isfinite(c) and abs(c) > threshold:
                pairs.append((names[i], names[j], float(c)))
    return pairs


def profile_likelihood(model, targets: TargetSet, param_index: int, grid,
                       nuisance_points) -> np.ndarray:
    """Best GOF over nuisance draws at each grid value of one parameter.

    nuisance_points is an (M, n_params) array of complete parameter vectors
    (fixed values or random draws); at each grid point the profiled
    coordinate is overwritten and the minimal GOF across the M vectors kept.
    A flat curve signals non-identifiability along that axis.
    Returns an array of (grid value, best gof) rows.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("grid must be a non-empty 1-D array")
    pts = np.asarray(nuisance_points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError("nuisance_points must be a non-empty 2-D array")
    if not (0 <= param_index < pts.shape[1]):
        raise ValueError(f"param_index {param_index} out of range for {pts.shape[1]} parameters")
    curve = np.empty((grid.size, 2))
    for gi, g in enumerate(grid):
        best = math.inf
        for row in pts:
            theta = row.copy()
            theta[param_index] = g
            try:
                best = min(best, gof_total(model(theta), targets))
            except Exception:
                continue  # infeasible nuisance draw; not a candidate
        curve[gi] = (g, best)
    return curve


@dataclass(frozen=True)
class DiagnosticThresholds:
    rhat: float = 1.1
    correlation: float = 0.9
    flat_ratio: float = 0.9


@dataclass(frozen=True)
class ParameterDiagnostic:
    name: str
    rhat: float
    rhat_upper: float
    posterior_sd: float
    prior_sd: float | None
    rhat_flag: bool
    flat_flag: bool

    @property
    def verdict(self) -> str:
        if self.rhat_flag and self.flat_flag:
            return "non-converged, data uninformative"
        if self.rhat_flag:
            return "non-converged"
        if self.flat_flag:
            return "data uninformative"
        return "ok"


@dataclass(frozen=True)
class NonIdentifiabilityReport:
    parameters: tuple[ParameterDiagnostic, ...]
    correlated_pairs: tuple[tuple[str, str, float], ...]
    thresholds: DiagnosticThresholds = dc_field(default_factory=DiagnosticThresholds)

    @property
    def converged(self) -> bool:
        return not any(p.rhat_flag for p in self.parameters)

    @property
    def verdict(self) -> str:
        flagged = [p.name for p in self.parameters if p.rhat_flag or p.flat_flag]
        if not flagged and not self.correlated_pairs:
            return "ok"
        return "non-identifiability suspected"

    def flags(self) -> set[str]:
        """Flat set of flag labels, used to compare runs for evidence monotonicity."""
        out = set()
        for p in self.parameters:
            if p.rhat_flag:
                out.add(f"rhat:{p.name}")
            if p.flat_flag:
                out.add(f"flat:{p.name}")
        for a, b, _ in self.correlated_pairs:
            out.add(f"corr:{a}~{b}")
        return out

    def to_dict(self) -> dict:
        return {
            "thresholds": {
                "rhat": self.thresholds.rhat,
                "correlation": self.thresholds.correlation,
                "flat_ratio": self.thresholds.flat_ratio,
            },
            "parameters": [
                {
                    "name": p.name,
                    "rhat": p.rhat,
                    "rhat_upper": p.rhat_upper,
                    "posterior_sd": p.posterior_sd,
                    "prior_sd": p.prior_sd,
                    "rhat_flag": p.rhat_flag,
                    "flat_flag": p.flat_flag,
                    "verdict": p.verdict,
                }
                for p in self.parameters
            ],
            "correlated_pairs": [
                {"a": a, "b": b, "correlation": c} for a, b, c in self.correlated_pairs
            ],
            "converged": self.converged,
            "verdict": self.verdict,
        }


def detect_nonidentifiability(chains: ChainSet, priors: JointPrior | None,
                              thresholds: DiagnosticThresholds = DiagnosticThresholds(),
                              ) -> NonIdentifiabilityReport:
    """Aggregate R-hat, ridge correlations and flat-posterior flags per parameter."""
    if len(chains) < 2:
        raise InsufficientChainsError("non-identifiability detection needs >= 2 chains")
    pooled = chains.pooled()
    corr = cross_correlation(pooled)
    pairs = tuple(correlated_pairs(corr, chains.names, thresholds.correlation))
    diags = []
    for i, name in enumerate(chains.names):
        gr = gelman_rubin(chains, name)
        post_sd = float(pooled[:, i].std(ddof=1))
        prior_sd = None
        if priors is not None:
            psd = priors.spec_for(name).sd
            prior_sd = float(psd) if math.isfinite(psd) else None
        flat = prior_sd is not None and prior_sd > 0 and (post_sd / prior_sd) > thresholds.flat_ratio
        diags.append(
            ParameterDiagnostic(
                name=name,
                rhat=gr.point_estimate,
                rhat_upper=gr.upper_ci,
                posterior_sd=post_sd,
                prior_sd=prior_sd,
                rhat_flag=gr.point_estimate > thresholds.rhat,
                flat_flag=bool(flat),
            )
        )
    return NonIdentifiabilityReport(
        parameters=tuple(diags), correlated_pairs=pairs, thresholds=thresholds
    )


@dataclass(frozen=True)
class PriorPosteriorSummary:
    prior_mean: float
    prior_sd: float
    posterior_mean: float
    posterior_sd: float
    overlap: float
    grid: np.ndarray            # bin centers shared by both densities
    prior_density: np.ndarray
    posterior_density: np.ndarray


def prior_posterior_summary(prior: PriorSpec, samples, bins: int = 50) -> PriorPosteriorSummary:
    """Summary statistics plus binned densities on a shared grid.

    The overlap coefficient integrates min(prior, posterior) density over the
    grid; 1 means indistinguishable, 0 disjoint. Improper priors have no
    normalized density, so their overlap and moments are NaN.
    """
    x = np.asarray(samples, dtype=float)
    if x.ndim != 1 or x.size < 100:
        raise ValueError(f"need at least 100 posterior samples, got {x.size}")
    p_mean, p_sd = prior.mean, prior.sd
    proper = math.isfinite(p_mean) and math.isfinite(p_sd)
    lo, hi = float(x.min()), float(x.max())
    if proper:
        lo = min(lo, p_mean - 4.0 * p_sd)
        hi = max(hi, p_mean + 4.0 * p_sd)
    if hi <= lo:
        hi = lo + 1.0
    edges = np.linspace(lo, hi, bins + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    width = edges[1] - edges[0]
    post_density, _ = np.histogram(x, bins=edges, density=True)
    prior_density = np.array([math.exp(prior.log_density(float(c))) for c in centers])
    if proper:
        overlap = float(np.sum(np.minimum(prior_density, post_density)) * width)
        overlap = min(overlap, 1.0)
    else:
        overlap = math.nan
    return PriorPosteriorSummary(
        prior_mean=p_mean if proper else math.nan,
        prior_sd=p_sd if proper else math.nan,
        posterior_mean=float(x.mean()),
        posterior_sd=float(x.std(ddof=1)),
        overlap=overlap,
        grid=centers,
        prior_density=prior_density,
        posterior_density=post_density,
    )
