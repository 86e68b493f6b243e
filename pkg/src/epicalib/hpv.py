"""Strain-stratified stochastic cohort model of HPV natural history.

A single birth cohort of women is simulated in monthly cycles through the
states Well -> HPV infection -> CIN1 -> CIN2/3 -> invasive cancer
(local/regional/distant) -> dead, with regression edges (HPV clears back to
Well, CIN1 regresses to Well, CIN2/3 regresses to CIN1) and background
mortality from every alive state. Infection, progression and regression
probabilities are strain-specific (low risk, high risk 16, high risk 18,
high risk other) and age-dependent through a banded baseline table.

The calibrated parameters are 26 non-negative multipliers on those baseline
probabilities: per-strain multipliers for infection, clearance, HPV->CIN1,
CIN1->CIN23 and CIN23->cancer (20), two regression multipliers shared across
strains, and four per-strain immune degrees that scale down re-infection
after a past clearance. Immune degrees act on individual susceptibility, not
on the shared table, so every table edge is scaled by exactly one multiplier.

Cycle semantics: each month every individual first resolves movement/death
with one uniform draw against its state's outgoing row (progression listed
before regression before death); individuals who were and remain Well then
resolve acquisition with a second uniform draw over the four strains. Both
draws are consumed every cycle for every individual, so runs with a shared
seed are common-random-number coupled across parameter changes.

Model outputs are the 31 statistics of the shipped target set, in target
order: mean duration of infection by strain and age at infection (8),
high-risk prevalence in five age bands, strain shares among prevalent CIN1
(2), CIN2/3 (3) and cancer (2), and invasive cancer incidence per 100,000
woman-years in eleven 5-year age bands.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from enum import IntEnum
from importlib import resources

import numpy as np

from .errors import ConfigurationError, InfeasibleParametersError, ParseError


class Strain(IntEnum):
    LOW_RISK = 0
    HIGH_RISK_16 = 1
    HIGH_RISK_18 = 2
    HIGH_RISK_OTHER = 3


STRAIN_KEYS = ("lr", "hr16", "hr18", "hro")
N_STRAINS = 4


class HealthState(IntEnum):
    WELL = 0
    HPV_LR = 1
    HPV_HR16 = 2
    HPV_HR18 = 3
    HPV_HRO = 4
    CIN1_LR = 5
    CIN1_HR16 = 6
    CIN1_HR18 = 7
    CIN1_HRO = 8
    CIN23_LR = 9
    CIN23_HR16 = 10
    CIN23_HR18 = 11
    CIN23_HRO = 12
    CANCER_LOCAL = 13
    CANCER_REGIONAL = 14
    CANCER_DISTANT = 15
    DEAD = 16


N_STATES = 17
_WELL = int(HealthState.WELL)
_HPV0 = int(HealthState.HPV_LR)
_CIN1_0 = int(HealthState.CIN1_LR)
_CIN23_0 = int(HealthState.CIN23_LR)
_LC = int(HealthState.CANCER_LOCAL)
_RC = int(HealthState.CANCER_REGIONAL)
_DC = int(HealthState.CANCER_DISTANT)
_DEAD = int(HealthState.DEAD)

# strain-specific edge families, each an (n_bands, 4) probability array
_STRAIN_FAMILIES = (
    ("well", "hpv", "infection"),
    ("hpv", "well", "hpv_clear"),
    ("hpv", "cin1", "hpv_prog"),
    ("cin1", "well", "cin1_reg"),
    ("cin1", "cin23", "cin1_prog"),
    ("cin23", "cin1", "cin23_reg"),
    ("cin23", "cancer_local", "cin23_prog"),
)
# shared edges, each an (n_bands,) probability array
_SHARED_FAMILIES = (
    ("cancer_local", "cancer_regional", "spread_local"),
    ("cancer_regional", "cancer_distant", "spread_regional"),
    ("cancer_local", "dead", "death_local"),
    ("cancer_regional", "dead", "death_regional"),
    ("cancer_distant", "dead", "death_distant"),
)

MULTIPLIER_NAMES = tuple(
    [f"infection_{s}" for s in STRAIN_KEYS]
    + [f"clearance_{s}" for s in STRAIN_KEYS]
    + [f"hpv_to_cin1_{s}" for s in STRAIN_KEYS]
    + [f"cin1_to_cin23_{s}" for s in STRAIN_KEYS]
    + [f"cin23_to_cancer_{s}" for s in STRAIN_KEYS]
    + ["cin1_regression", "cin23_regression"]
    + [f"immune_degree_{s}" for s in STRAIN_KEYS]
)
N_MULTIPLIERS = 26

PREVALENCE_BANDS = ((20, 25), (25, 35), (35, 45), (45, 55), (55, 65))
INCIDENCE_BANDS = tuple((lo, lo + 5) for lo in range(25, 80, 5))

# output order of the shipped 31-target set: durations are reported in the
# table's strain order (LR, HR other, HR16, HR18), young (<30) block first
_DURATION_STRAIN_ORDER = (0, 3, 1, 2)
OUTPUT_NAMES = tuple(
    [f"duration_{STRAIN_KEYS[s]}_under30" for s in _DURATION_STRAIN_ORDER]
    + [f"duration_{STRAIN_KEYS[s]}_over30" for s in _DURATION_STRAIN_ORDER]
    + [f"hr_prevalence_{lo}_{hi - 1}" for lo, hi in PREVALENCE_BANDS]
    + ["cin1_type_hr16", "cin1_type_hro"]
    + ["cin23_type_hr16", "cin23_type_hr18", "cin23_type_hro"]
    + ["cancer_type_hr16", "cancer_type_hr18"]
    + [f"cancer_incidence_{lo}_{hi - 1}" for lo, hi in INCIDENCE_BANDS]
)


@dataclass(frozen=True)
class BaselineTable:
    """Monthly baseline transition probabilities per age band (and strain)."""

    bands: tuple[tuple[int, int], ...]
    infection: np.ndarray
    hpv_clear: np.ndarray
    hpv_prog: np.ndarray
    cin1_reg: np.ndarray
    cin1_prog: np.ndarray
    cin23_reg: np.ndarray
    cin23_prog: np.ndarray
    spread_local: np.ndarray
    spread_regional: np.ndarray
    death_local: np.ndarray
    death_regional: np.ndarray
    death_distant: np.ndarray

    def band_index(self, age_years: float) -> int:
        for k, (lo, hi) in enumerate(self.bands):
            if lo <= age_years < hi:
                return k
        raise ConfigurationError(
            f"age {age_years} outside the baseline table's bands "
            f"[{self.bands[0][0]}, {self.bands[-1][1]})"
        )


def load_baseline_table(path) -> BaselineTable:
    """Parse a baseline CSV with header from_state,to_state,strain,age_lo,age_hi,probability."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return _parse_baseline_rows(rows, str(path))


def shipped_baseline_table() -> BaselineTable:
    """The repo's synthetic, clearly-illustrative baseline (see docs)."""
    ref = resources.files("epicalib.data") / "hpv_baseline_transitions.csv"
    with ref.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return _parse_baseline_rows(rows, "hpv_baseline_transitions.csv")


_HEADER = ["from_state", "to_state", "strain", "age_lo", "age_hi", "probability"]


def _parse_baseline_rows(rows, source: str) -> BaselineTable:
    if not rows or [h.strip() for h in rows[0]] != _HEADER:
        raise ParseError(f"{source}: expected header {','.join(_HEADER)}")
    parsed = []
    band_set = set()
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 6:
            raise ParseError(f"{source}: expected 6 columns", line=lineno)
        frm, to, strain, lo_s, hi_s, p_s = (c.strip() for c in row)
        try:
            lo, hi, p = int(lo_s), int(hi_s), float(p_s)
        except ValueError:
            raise ParseError(f"{source}: non-numeric age band or probability", line=lineno) from None
        if not (0.0 <= p <= 1.0):
            raise ParseError(f"{source}: probability {p} outside [0, 1]", line=lineno)
        if not lo < hi:
            raise ParseError(f"{source}: empty age band [{lo}, {hi})", line=lineno)
        band_set.add((lo, hi))
        parsed.append((lineno, frm, to, strain, (lo, hi), p))
    if not parsed:
        raise ParseError(f"{source}: no transition rows")
    bands = tuple(sorted(band_set))
    for (_, hi_prev), (lo_next, _) in zip(bands, bands[1:]):
        if hi_prev != lo_next:
            raise ParseError(f"{source}: age bands must tile contiguously, got {bands}")
    band_idx = {b: k for k, b in enumerate(bands)}
    n_bands = len(bands)
    strain_arrays = {fam: np.zeros((n_bands, N_STRAINS)) for _, _, fam in _STRAIN_FAMILIES}
    shared_arrays = {fam: np.zeros(n_bands) for _, _, fam in _SHARED_FAMILIES}
    strain_edges = {(f, t): fam for f, t, fam in _STRAIN_FAMILIES}
    shared_edges = {(f, t): fam for f, t, fam in _SHARED_FAMILIES}
    seen = set()
    for lineno, frm, to, strain, band, p in parsed:
        key = (frm, to)
        if key in strain_edges:
            if strain not in STRAIN_KEYS:
                raise ParseError(
                    f"{source}: edge {frm}->{to} needs a strain in {STRAIN_KEYS}", line=lineno
                )
            slot = (key, strain, band)
            if slot in seen:
                raise ParseError(f"{source}: duplicate row for {frm}->{to} {strain} {band}", line=lineno)
            seen.add(slot)
            strain_arrays[strain_edges[key]][band_idx[band], STRAIN_KEYS.index(strain)] = p
        elif key in shared_edges:
            if strain not in ("", "-"):
                raise ParseError(f"{source}: edge {frm}->{to} is not strain-specific", line=lineno)
            slot = (key, band)
            if slot in seen:
                raise ParseError(f"{source}: duplicate row for {frm}->{to} {band}", line=lineno)
            seen.add(slot)
            shared_arrays[shared_edges[key]][band_idx[band]] = p
        else:
            raise ParseError(f"{source}: unknown transition {frm}->{to}", line=lineno)
    return BaselineTable(bands=bands, **strain_arrays, **shared_arrays)


def multipliers_to_array(multipliers) -> np.ndarray:
    """Accept a dict keyed by multiplier name or a 26-vector in canonical order."""
    if isinstance(multipliers, dict):
        extra = set(multipliers) - set(MULTIPLIER_NAMES)
        missing = set(MULTIPLIER_NAMES) - set(multipliers)
        if extra or missing:
            raise ConfigurationError(
                f"multiplier map mismatch: extra {sorted(extra)}, missing {sorted(missing)}"
            )
        values = np.array([float(multipliers[n]) for n in MULTIPLIER_NAMES])
    else:
        values = np.asarray(multipliers, dtype=float)
        if values.shape != (N_MULTIPLIERS,):
            raise ConfigurationError(
                f"expected {N_MULTIPLIERS} multipliers, got shape {values.shape}"
            )
    if not np.all(np.isfinite(values)) or np.any(values < 0):
        raise InfeasibleParametersError("multipliers must be finite and >= 0")
    return values


def identity_multipliers() -> np.ndarray:
    return np.ones(N_MULTIPLIERS)


@dataclass(frozen=True)
class EffectiveTransitions:
    """Baseline table after multiplier scaling, plus per-strain immune degrees."""

    table: BaselineTable
    immune_degree: np.ndarray


def apply_multipliers(baseline: BaselineTable, multipliers) -> EffectiveTransitions:
    """Scale baseline probabilities by the 26 multipliers.

    Scaled probabilities are clamped to [0, 1]. Per (state, strain, band) row
    the outgoing disease-edge sum must stay <= 1 (the stay probability is the
    residual); a violation raises InfeasibleParametersError, which the
    sampler treats as a zero-likelihood point.
    """
    m = multipliers_to_array(multipliers)
    by_name = dict(zip(MULTIPLIER_NAMES, m))

    def strain_scaled(family_array, prefix):
        scale = np.array([by_name[f"{prefix}_{s}"] for s in STRAIN_KEYS])
        return np.clip(family_array * scale[None, :], 0.0, 1.0)

    infection = strain_scaled(baseline.infection, "infection")
    hpv_clear = strain_scaled(baseline.hpv_clear, "clearance")
    hpv_prog = strain_scaled(baseline.hpv_prog, "hpv_to_cin1")
    cin1_prog = strain_scaled(baseline.cin1_prog, "cin1_to_cin23")
    cin23_prog = strain_scaled(baseline.cin23_prog, "cin23_to_cancer")
    cin1_reg = np.clip(baseline.cin1_reg * by_name["cin1_regression"], 0.0, 1.0)
    cin23_reg = np.clip(baseline.cin23_reg * by_name["cin23_regression"], 0.0, 1.0)

    rows = {
        "well (infection)": infection.sum(axis=1),
        "hpv": hpv_clear + hpv_prog,
        "cin1": cin1_reg + cin1_prog,
        "cin23": cin23_reg + cin23_prog,
    }
    for label, sums in rows.items():
        worst = float(np.max(sums))
        if worst > 1.0:
            raise InfeasibleParametersError(
                f"outgoing probabilities for {label} sum to {worst:.4f} > 1 after scaling"
            )
    table = BaselineTable(
        bands=baseline.bands,
        infection=infection,
        hpv_clear=hpv_clear,
        hpv_prog=hpv_prog,
        cin1_reg=cin1_reg,
        cin1_prog=cin1_prog,
        cin23_reg=cin23_reg,
        cin23_prog=cin23_prog,
        spread_local=baseline.spread_local,
        spread_regional=baseline.spread_regional,
        death_local=baseline.death_local,
        death_regional=baseline.death_regional,
        death_distant=baseline.death_distant,
    )
    immune = np.array([by_name[f"immune_degree_{s}"] for s in STRAIN_KEYS])
    return EffectiveTransitions(table=table, immune_degree=immune)


def default_mortality() -> np.ndarray:
    """Shipped background monthly mortality, indexed by age in years."""
    ref = resources.files("epicalib.data") / "background_mortality.csv"
    with ref.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if rows[0] != ["age", "monthly_prob"]:
        raise ParseError("background_mortality.csv: bad header")
    ages = [int(r[0]) for r in rows[1:]]
    probs = [float(r[1]) for r in rows[1:]]
    if ages != list(range(len(ages))):
        raise ParseError("background_mortality.csv: ages must be 0..N in order")
    return np.array(probs)


@dataclass(frozen=True)
class CohortConfig:
    cohort_size: int = 20_000
    start_age: int = 15
    end_age: int = 85
    cycle_months: int = 1
    seed: int = 0
    mortality: np.ndarray = field(default_factory=default_mortality)

    def __post_init__(self):
        if self.cohort_size < 1:
            raise ConfigurationError(f"cohort_size must be >= 1, got {self.cohort_size}")
        if not self.start_age < self.end_age:
            raise ConfigurationError("start_age must be < end_age")
        if self.cycle_months != 1:
            raise ConfigurationError("only monthly cycles are supported")
        mort = np.asarray(self.mortality, dtype=float)
        object.__setattr__(self, "mortality", mort)
        if len(mort) < self.end_age:
            raise ConfigurationError(
                f"mortality table covers ages 0..{len(mort) - 1}, need up to {self.end_age - 1}"
            )
        if np.any(mort < 0) or np.any(mort > 1):
            raise ConfigurationError("mortality probabilities must lie in [0, 1]")


@dataclass(frozen=True)
class CohortResult:
    outputs: np.ndarray
    output_names: tuple[str, ...]
    census: np.ndarray        # (months + 1, N_STATES) state counts per cycle
    cohort_size: int
    months: int
    n_reentered_well: int     # individuals who returned to Well after infection
    cumulative_cancer: int

    def state_census(self, cycle: int) -> np.ndarray:
        if not (0 <= cycle <= self.months):
            raise ValueError(f"cycle {cycle} outside simulated range 0..{self.months}")
        return self.census[cycle]


def _build_cycle_tables(eff: EffectiveTransitions, config: CohortConfig):
    """Per year of age: stage-A cumulative rows + destinations, and infection probs.

    Stage-A rows list outgoing (progression, regression, death) probabilities
    cumulatively, padded with 2.0 so a uniform draw past the row total means
    'stay'. Raises InfeasibleParametersError if any total (including
    background and excess mortality) exceeds 1.
    """
    t = eff.table
    years = range(config.start_age, config.end_age)
    n_years = len(years)
    cum = np.full((n_years, N_STATES, 3), 2.0)
    dest = np.tile(np.arange(N_STATES, dtype=np.intp)[None, :, None], (n_years, 1, 4))
    infection = np.empty((n_years, N_STRAINS))
    for yi, age in enumerate(years):
        b = t.band_index(age)
        mort = config.mortality[age]
        infection[yi] = t.infection[b]
        if t.infection[b].sum() > 1.0:
            raise InfeasibleParametersError(f"infection probabilities at age {age} sum past 1")

        def put(state, edges):
            probs = [p for _, p in edges]
            total = sum(probs)
            if total > 1.0:
                raise InfeasibleParametersError(
                    f"outgoing probabilities of {HealthState(state).name} at age {age} "
                    f"sum to {total:.4f} > 1"
                )
            cum[yi, state, : len(edges)] = np.cumsum(probs)
            for k, (to, _) in enumerate(edges):
                dest[yi, state, k] = to

        put(_WELL, [(_DEAD, mort)])
        for s in range(N_STRAINS):
            put(_HPV0 + s, [(_CIN1_0 + s, t.hpv_prog[b, s]), (_WELL, t.hpv_clear[b, s]), (_DEAD, mort)])
            put(_CIN1_0 + s, [(_CIN23_0 + s, t.cin1_prog[b, s]), (_WELL, t.cin1_reg[b, s]), (_DEAD, mort)])
            put(_CIN23_0 + s, [(_LC, t.cin23_prog[b, s]), (_CIN1_0 + s, t.cin23_reg[b, s]), (_DEAD, mort)])
        put(_LC, [(_RC, t.spread_local[b]), (_DEAD, min(1.0, mort + t.death_local[b]))])
        put(_RC, [(_DC, t.spread_regional[b]), (_DEAD, min(1.0, mort + t.death_regional[b]))])
        put(_DC, [(_DEAD, min(1.0, mort + t.death_distant[b]))])
    return cum, dest, infection


def simulate_cohort(multipliers, config: CohortConfig,
                    baseline: BaselineTable | None = None) -> CohortResult:
    """Run the cohort and return the 31 target-aligned outputs plus per-cycle census."""
    if baseline is None:
        baseline = shipped_baseline_table()
    eff = apply_multipliers(baseline, multipliers)
    cum, dest, infection = _build_cycle_tables(eff, config)
    deg = eff.immune_degree
    n = config.cohort_size
    months = (config.end_age - config.start_age) * 12
    rng = np.random.default_rng(config.seed)

    # susceptibility depends only on which strains an individual has cleared,
    # so the 16 possible immunity patterns give 16 cumulative-probability rows
    # per year of age, precomputed once per evaluation
    n_years = infection.shape[0]
    cum_inf = np.empty((n_years, 16, N_STRAINS))
    for pattern in range(16):
        factor = np.clip(1.0 - deg * [(pattern >> s) & 1 for s in range(N_STRAINS)], 0.0, 1.0)
        cum_inf[:, pattern, :] = np.cumsum(infection * factor[None, :], axis=1)

    states = np.zeros(n, dtype=np.intp)
    immunity = np.zeros(n, dtype=np.intp)  # bit s set once strain s was cleared
    inf_start = np.full(n, -1, dtype=np.int32)
    cancer_strain = np.full(n, -1, dtype=np.int8)

    census = np.zeros((months + 1, N_STATES), dtype=np.int64)
    census[0] = np.bincount(states, minlength=N_STATES)

    dur_sum = np.zeros((N_STRAINS, 2))
    dur_cnt = np.zeros((N_STRAINS, 2), dtype=np.int64)
    prev_num = np.zeros(len(PREVALENCE_BANDS))
    prev_den = np.zeros(len(PREVALENCE_BANDS))
    cin1_pt = np.zeros(N_STRAINS)
    cin23_pt = np.zeros(N_STRAINS)
    cancer_pt = np.zeros(N_STRAINS)
    cancer_alive = np.zeros(N_STRAINS)  # incremental census of cancer cases by causal strain
    inc_events = np.zeros(len(INCIDENCE_BANDS))
    inc_pm = np.zeros(len(INCIDENCE_BANDS))
    n_reentered = 0

    prev_band_of_cycle = np.full(months, -1)
    inc_band_of_cycle = np.full(months, -1)
    for t in range(months):
        age = config.start_age + t / 12.0
        for k, (lo, hi) in enumerate(PREVALENCE_BANDS):
            if lo <= age < hi:
                prev_band_of_cycle[t] = k
        for k, (lo, hi) in enumerate(INCIDENCE_BANDS):
            if lo <= age < hi:
                inc_band_of_cycle[t] = k

    for t in range(months):
        counts = census[t]
        alive = n - counts[_DEAD]
        pb = prev_band_of_cycle[t]
        if pb >= 0:
            prev_num[pb] += counts[_HPV0 + 1:_HPV0 + 4].sum()  # HR16, HR18, HRO
            prev_den[pb] += alive
        cin1_pt += counts[_CIN1_0:_CIN1_0 + 4]
        cin23_pt += counts[_CIN23_0:_CIN23_0 + 4]
        cancer_pt += cancer_alive
        ib = inc_band_of_cycle[t]
        if ib >= 0:
            inc_pm[ib] += alive - counts[_LC:_DEAD].sum()

        yi = t // 12
        u = rng.random((2, n))
        k_idx = (u[0][:, None] >= cum[yi, states]).sum(axis=1)
        nxt = dest[yi, states, k_idx]

        # acquisition among those Well before and after movement/death
        still_well = (states == _WELL) & (nxt == _WELL)
        wi = np.nonzero(still_well)[0]
        if wi.size:
            cw = cum_inf[yi, immunity[wi]]
            ks = (u[1, wi][:, None] >= cw).sum(axis=1)
            got = ks < N_STRAINS
            if got.any():
                gi = wi[got]
                nxt[gi] = _HPV0 + ks[got]
                inf_start[gi] = t + 1

        moved = nxt != states
        exits = moved & (states >= _HPV0) & (states < _HPV0 + 4) & (nxt != _DEAD)
        if exits.any():
            ei = np.nonzero(exits)[0]
            strains = states[ei] - _HPV0
            old = ((config.start_age + inf_start[ei] / 12.0) >= 30.0).astype(np.intp)
            np.add.at(dur_sum, (strains, old), (t + 1 - inf_start[ei]).astype(float))
            np.add.at(dur_cnt, (strains, old), 1)

        to_well = moved & (nxt == _WELL)
        if to_well.any():
            ci = np.nonzero(to_well)[0]
            strains = (states[ci] - 1) % 4
            immunity[ci] |= 1 << strains
            n_reentered += int(ci.size)

        onset = moved & (nxt == _LC)
        if onset.any():
            oi = np.nonzero(onset)[0]
            onset_strains = states[oi] - _CIN23_0
            cancer_strain[oi] = onset_strains.astype(np.int8)
            cancer_alive += np.bincount(onset_strains, minlength=N_STRAINS)
            ib = inc_band_of_cycle[t]
            if ib >= 0:
                inc_events[ib] += oi.size
        if cancer_alive.any():
            cancer_died = (states >= _LC) & (states <= _DC) & (nxt == _DEAD)
            if cancer_died.any():
                cancer_alive -= np.bincount(
                    cancer_strain[cancer_died].astype(np.intp), minlength=N_STRAINS
                )

        states = nxt
        census[t + 1] = np.bincount(states, minlength=N_STATES)

    outputs = _assemble_outputs(
        dur_sum, dur_cnt, prev_num, prev_den, cin1_pt, cin23_pt, cancer_pt,
        inc_events, inc_pm,
    )
    return CohortResult(
        outputs=outputs,
        output_names=OUTPUT_NAMES,
        census=census,
        cohort_size=n,
        months=months,
        n_reentered_well=n_reentered,
        cumulative_cancer=int((cancer_strain >= 0).sum()),
    )


def _assemble_outputs(dur_sum, dur_cnt, prev_num, prev_den, cin1_pt, cin23_pt,
                      cancer_pt, inc_events, inc_pm) -> np.ndarray:
    out = []
    for age_class in (0, 1):  # <30 then >30 at infection
        for s in _DURATION_STRAIN_ORDER:
            cnt = dur_cnt[s, age_class]
            out.append(dur_sum[s, age_class] / cnt if cnt else 0.0)
    for k in range(len(PREVALENCE_BANDS)):
        out.append(prev_num[k] / prev_den[k] if prev_den[k] else 0.0)
    tot = cin1_pt.sum()
    out += [cin1_pt[Strain.HIGH_RISK_16] / tot if tot else 0.0,
            cin1_pt[Strain.HIGH_RISK_OTHER] / tot if tot else 0.0]
    tot = cin23_pt.sum()
    out += [cin23_pt[Strain.HIGH_RISK_16] / tot if tot else 0.0,
            cin23_pt[Strain.HIGH_RISK_18] / tot if tot else 0.0,
            cin23_pt[Strain.HIGH_RISK_OTHER] / tot if tot else 0.0]
    tot = cancer_pt.sum()
    out += [cancer_pt[Strain.HIGH_RISK_16] / tot if tot else 0.0,
            cancer_pt[Strain.HIGH_RISK_18] / tot if tot else 0.0]
    for k in range(len(INCIDENCE_BANDS)):
        woman_years = inc_pm[k] / 12.0
        out.append(inc_events[k] / woman_years * 1e5 if woman_years else 0.0)
    return np.array(out)


def state_census(result: CohortResult, cycle: int) -> np.ndarray:
    """Counts per health state at a recorded cycle; sums to the cohort size."""
    return result.state_census(cycle)


def make_hpv_model(config: CohortConfig, baseline: BaselineTable | None = None):
    """Model callable for the sampler: 26 multipliers -> 31 outputs.

    Every evaluation reuses the same simulation seed, so proposals are scored
    under common random numbers and the chain stays deterministic.
    """
    if baseline is None:
        baseline = shipped_baseline_table()

    def evaluate(theta) -> np.ndarray:
        return simulate_cohort(theta, config, baseline).outputs

    return evaluate
