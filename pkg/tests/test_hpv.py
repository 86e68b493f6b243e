import numpy as np
import pytest

from epicalib.errors import ConfigurationError, InfeasibleParametersError, ParseError
from epicalib.hpv import (
    MULTIPLIER_NAMES,
    N_MULTIPLIERS,
    OUTPUT_NAMES,
    BaselineTable,
    CohortConfig,
    HealthState,
    apply_multipliers,
    identity_multipliers,
    load_baseline_table,
    multipliers_to_array,
    shipped_baseline_table,
    simulate_cohort,
    state_census,
)
from epicalib.targets import hpv_target_set

WELL = int(HealthState.WELL)
HPV_LR = int(HealthState.HPV_LR)
CIN1_LR = int(HealthState.CIN1_LR)
DEAD = int(HealthState.DEAD)


def toy_baseline(bands=((15, 85),), **overrides) -> BaselineTable:
    """All-zero single-strain-friendly table; override named families."""
    nb = len(bands)
    arrays = {
        name: np.zeros((nb, 4))
        for name in ("infection", "hpv_clear", "hpv_prog", "cin1_reg", "cin1_prog",
                     "cin23_reg", "cin23_prog")
    }
    arrays.update({
        name: np.zeros(nb)
        for name in ("spread_local", "spread_regional", "death_local",
                     "death_regional", "death_distant")
    })
    for key, value in overrides.items():
        arrays[key] = np.asarray(value, dtype=float)
    return BaselineTable(bands=tuple(bands), **arrays)


def flat_mortality(p: float) -> np.ndarray:
    return np.full(100, p)


class TestMultiplierMap:
    def test_exactly_26_names(self):
        assert len(MULTIPLIER_NAMES) == N_MULTIPLIERS == 26
        assert len(set(MULTIPLIER_NAMES)) == 26

    def test_paper_named_parameters_present(self):
        for name in ("hpv_to_cin1_hr16", "cin1_to_cin23_lr", "cin23_to_cancer_hro",
                     "cin23_to_cancer_hr18", "cin23_to_cancer_hr16", "immune_degree_lr"):
            assert name in MULTIPLIER_NAMES

    def test_dict_and_array_forms_agree(self):
        d = {name: 1.0 for name in MULTIPLIER_NAMES}
        d["infection_lr"] = 2.5
        arr = multipliers_to_array(d)
        assert arr[MULTIPLIER_NAMES.index("infection_lr")] == 2.5

    def test_missing_name_rejected(self):
        d = {name: 1.0 for name in MULTIPLIER_NAMES[:-1]}
        with pytest.raises(ConfigurationError):
            multipliers_to_array(d)

    def test_negative_rejected(self):
        m = identity_multipliers()
        m[3] = -0.5
        with pytest.raises(InfeasibleParametersError):
            multipliers_to_array(m)


class TestApplyMultipliers:
    def test_identity_reproduces_baseline_exactly(self):
        base = shipped_baseline_table()
        eff = apply_multipliers(base, identity_multipliers())
        for field in ("infection", "hpv_clear", "hpv_prog", "cin1_reg", "cin1_prog",
                      "cin23_reg", "cin23_prog"):
            assert np.array_equal(getattr(eff.table, field), getattr(base, field))

    def test_scaling_one_edge_family(self):
        base = toy_baseline(hpv_prog=np.full((1, 4), 0.01))
        m = {name: 1.0 for name in MULTIPLIER_NAMES}
        m["hpv_to_cin1_hr16"] = 3.0
        eff = apply_multipliers(base, m)
        assert eff.table.hpv_prog[0, 1] == pytest.approx(0.03)
        assert eff.table.hpv_prog[0, 0] == pytest.approx(0.01)

    def test_clamped_to_one(self):
        base = toy_baseline(hpv_clear=np.full((1, 4), 0.6))
        m = {name: 1.0 for name in MULTIPLIER_NAMES}
        m["clearance_lr"] = 2.0
        eff = apply_multipliers(base, m)
        assert eff.table.hpv_clear[0, 0] == 1.0

    def test_row_sum_above_one_is_infeasible(self):
        base = toy_baseline(hpv_clear=np.full((1, 4), 0.6),
                            hpv_prog=np.full((1, 4), 0.3))
        m = {name: 1.0 for name in MULTIPLIER_NAMES}
        m["clearance_lr"] = 2.0  # clamps to 1.0, plus 0.3 progression
        with pytest.raises(InfeasibleParametersError):
            apply_multipliers(base, m)

    def test_infection_sum_above_one_is_infeasible(self):
        base = toy_baseline(infection=np.full((1, 4), 0.3))
        m = {name: 1.0 for name in MULTIPLIER_NAMES}
        m["infection_hro"] = 3.0  # 0.3+0.3+0.3+0.9 > 1
        with pytest.raises(InfeasibleParametersError):
            apply_multipliers(base, m)

    def test_immune_degree_passed_through(self):
        base = toy_baseline()
        m = {name: 1.0 for name in MULTIPLIER_NAMES}
        m["immune_degree_hr16"] = 0.75
        eff = apply_multipliers(base, m)
        assert eff.immune_degree[1] == 0.75


class TestCohortInvariants:
    def test_census_conservation_and_initial_state(self):
        cfg = CohortConfig(cohort_size=2000, seed=1)
        res = simulate_cohort(identity_multipliers(), cfg)
        assert np.all(res.census.sum(axis=1) == 2000)
        assert res.census[0, WELL] == 2000
        assert res.census[0, 1:].sum() == 0

    def test_dead_count_nondecreasing(self):
        cfg = CohortConfig(cohort_size=2000, seed=2)
        res = simulate_cohort(identity_multipliers(), cfg)
        dead = res.census[:, DEAD]
        assert np.all(np.diff(dead) >= 0)

    def test_state_census_range_check(self):
        cfg = CohortConfig(cohort_size=100, seed=3)
        res = simulate_cohort(identity_multipliers(), cfg)
        assert state_census(res, 0)[WELL] == 100
        with pytest.raises(ValueError):
            res.state_census(res.months + 1)

    def test_deterministic_given_seed(self):
        cfg = CohortConfig(cohort_size=1500, seed=77)
        a = simulate_cohort(identity_multipliers(), cfg)
        b = simulate_cohort(identity_multipliers(), cfg)
        assert np.array_equal(a.outputs, b.outputs)
        assert np.array_equal(a.census, b.census)

    def test_different_seeds_differ(self):
        a = simulate_cohort(identity_multipliers(), CohortConfig(cohort_size=1500, seed=1))
        b = simulate_cohort(identity_multipliers(), CohortConfig(cohort_size=1500, seed=2))
        assert not np.array_equal(a.outputs, b.outputs)

    def test_regression_edges_exercised(self):
        cfg = CohortConfig(cohort_size=2000, seed=4)
        res = simulate_cohort(identity_multipliers(), cfg)
        assert res.n_reentered_well > 0

    def test_output_names_align_with_shipped_targets(self):
        assert tuple(hpv_target_set().names) == OUTPUT_NAMES

    def test_no_progression_means_no_disease(self):
        m = {name: 1.0 for name in MULTIPLIER_NAMES}
        for s in ("lr", "hr16", "hr18", "hro"):
            m[f"infection_{s}"] = 0.0
        cfg = CohortConfig(cohort_size=1000, seed=5)
        res = simulate_cohort(m, cfg)
        out = dict(zip(res.output_names, res.outputs))
        for name, value in out.items():
            if name.startswith(("hr_prevalence", "cancer_incidence")):
                assert value == 0.0
        occupied = np.flatnonzero(res.census.sum(axis=0))
        assert set(occupied) <= {WELL, DEAD}


class TestMarkovOracle:
    def test_three_state_chain_matches_matrix_power(self):
        # Well -> Infected -> Dead, one strain, no regression
        base = toy_baseline(infection=np.array([[0.1, 0.0, 0.0, 0.0]]))
        mort = 0.05
        cfg = CohortConfig(cohort_size=20_000, start_age=15, end_age=25, seed=11,
                           mortality=flat_mortality(mort))
        res = simulate_cohort(identity_multipliers(), cfg, base)
        # movement/death resolves first, acquisition second, so
        # P(W->H) = (1 - mort) * 0.1
        p = np.array([
            [(1 - mort) * 0.9, (1 - mort) * 0.1, mort],  # W
            [0.0, 1 - mort, mort],                       # H
            [0.0, 0.0, 1.0],                             # D
        ])
        occ = np.array([1.0, 0.0, 0.0])
        n = cfg.cohort_size
        for t in range(1, res.months + 1):
            occ = occ @ p
            if t in (12, 60, 120):
                observed = res.census[t][[WELL, HPV_LR, DEAD]] / n
                se = np.sqrt(np.maximum(occ * (1 - occ), 1e-12) / n)
                assert np.all(np.abs(observed - occ) <= 3 * se + 1e-9)

    def test_four_state_chain_with_regression(self):
        # Well <-> Infected -> CIN1 -> Well, no deaths: time-homogeneous
        # 3-state chain when immunity is off
        base = toy_baseline(
            infection=np.array([[0.08, 0, 0, 0]]),
            hpv_clear=np.array([[0.09, 0, 0, 0]]),
            hpv_prog=np.array([[0.01, 0, 0, 0]]),
            cin1_reg=np.array([[0.05, 0, 0, 0]]),
        )
        m = {name: 1.0 for name in MULTIPLIER_NAMES}
        m["immune_degree_lr"] = 0.0
        cfg = CohortConfig(cohort_size=20_000, start_age=15, end_age=40, seed=13,
                           mortality=flat_mortality(0.0))
        res = simulate_cohort(m, cfg, base)
        p = np.array([
            [0.92, 0.08, 0.0],   # W: infect 0.08
            [0.09, 0.90, 0.01],  # H: clear 0.09, progress 0.01
            [0.05, 0.0, 0.95],   # C1: regress 0.05
        ])
        occ = np.array([1.0, 0.0, 0.0])
        n = cfg.cohort_size
        for t in range(1, res.months + 1):
            occ = occ @ p
            if t in (60, 180, 300):
                observed = res.census[t][[WELL, HPV_LR, CIN1_LR]] / n
                se = np.sqrt(np.maximum(occ * (1 - occ), 1e-12) / n)
                assert np.all(np.abs(observed - occ) <= 3 * se + 1e-9)

    def test_mean_infection_duration_geometric(self):
        # exit probability q = clear + progress = 0.1 -> mean duration 10 months
        base = toy_baseline(
            infection=np.array([[0.08, 0, 0, 0]]),
            hpv_clear=np.array([[0.09, 0, 0, 0]]),
            hpv_prog=np.array([[0.01, 0, 0, 0]]),
        )
        m = {name: 1.0 for name in MULTIPLIER_NAMES}
        m["immune_degree_lr"] = 0.0
        cfg = CohortConfig(cohort_size=10_000, start_age=15, end_age=45, seed=17,
                           mortality=flat_mortality(0.0))
        res = simulate_cohort(m, cfg, base)
        out = dict(zip(res.output_names, res.outputs))
        assert out["duration_lr_under30"] == pytest.approx(10.0, abs=0.3)
        # episodes still open at the horizon are censored, which biases the
        # late-starting stratum slightly short
        assert out["duration_lr_over30"] == pytest.approx(10.0, abs=0.7)

    def test_age_at_infection_classification(self):
        # infections only possible before age 30 -> every episode is young
        base = toy_baseline(
            bands=((15, 30), (30, 85)),
            infection=np.array([[0.05, 0, 0, 0], [0.0, 0, 0, 0]]),
            hpv_clear=np.array([[0.1, 0, 0, 0], [0.1, 0, 0, 0]]),
        )
        cfg = CohortConfig(cohort_size=3000, seed=19, mortality=flat_mortality(0.0))
        res = simulate_cohort(identity_multipliers(), cfg, base)
        out = dict(zip(res.output_names, res.outputs))
        assert out["duration_lr_under30"] > 0.0
        assert out["duration_lr_over30"] == 0.0

    def test_lr_only_infections_leave_hr_outputs_zero(self):
        base = toy_baseline(
            infection=np.array([[0.05, 0, 0, 0]]),
            hpv_clear=np.array([[0.1, 0, 0, 0]]),
        )
        cfg = CohortConfig(cohort_size=2000, seed=23, mortality=flat_mortality(0.0))
        res = simulate_cohort(identity_multipliers(), cfg, base)
        out = dict(zip(res.output_names, res.outputs))
        assert all(out[k] == 0.0 for k in out if k.startswith("hr_prevalence"))
        assert out["cancer_type_hr16"] == 0.0


class TestDoseResponse:
    @pytest.mark.parametrize("name", ["cin23_to_cancer_hr16", "hpv_to_cin1_hr16"])
    def test_raising_progression_does_not_reduce_cancer(self, name):
        cfg = CohortConfig(cohort_size=4000, seed=29)
        totals = []
        for level in (0.5, 1.0, 2.0):
            m = {n: 1.0 for n in MULTIPLIER_NAMES}
            m[name] = level
            totals.append(simulate_cohort(m, cfg).cumulative_cancer)
        assert totals[0] <= totals[1] <= totals[2]


class TestConfigValidation:
    def test_zero_cohort_rejected(self):
        with pytest.raises(ConfigurationError):
            CohortConfig(cohort_size=0)

    def test_age_order_enforced(self):
        with pytest.raises(ConfigurationError):
            CohortConfig(cohort_size=10, start_age=50, end_age=40)

    def test_mortality_must_cover_ages(self):
        with pytest.raises(ConfigurationError):
            CohortConfig(cohort_size=10, end_age=85, mortality=np.full(60, 0.001))

    def test_age_outside_bands_rejected(self):
        base = toy_baseline(bands=((15, 50),))
        cfg = CohortConfig(cohort_size=10, start_age=15, end_age=85, seed=0)
        with pytest.raises(ConfigurationError):
            simulate_cohort(identity_multipliers(), cfg, base)


class TestBaselineLoading:
    def test_shipped_table_loads(self):
        base = shipped_baseline_table()
        assert base.bands[0] == (15, 20) and base.bands[-1] == (80, 85)
        assert np.all(base.infection >= 0) and np.all(base.infection <= 1)
        # strain aggressiveness ordering HR16 > HR18 > HRO > LR for progression
        assert np.all(base.hpv_prog[:, 1] > base.hpv_prog[:, 2])
        assert np.all(base.hpv_prog[:, 2] > base.hpv_prog[:, 3])
        assert np.all(base.hpv_prog[:, 3] > base.hpv_prog[:, 0])

    def test_csv_roundtrip(self, tmp_path):
        p = tmp_path / "base.csv"
        p.write_text(
            "from_state,to_state,strain,age_lo,age_hi,probability\n"
            "well,hpv,lr,15,85,0.05\n"
            "hpv,well,lr,15,85,0.1\n"
            "cancer_local,dead,,15,85,0.01\n"
        )
        base = load_baseline_table(p)
        assert base.infection[0, 0] == 0.05
        assert base.death_local[0] == 0.01

    def test_unknown_edge_rejected(self, tmp_path):
        p = tmp_path / "base.csv"
        p.write_text("from_state,to_state,strain,age_lo,age_hi,probability\n"
                     "well,cancer_local,lr,15,85,0.05\n")
        with pytest.raises(ParseError):
            load_baseline_table(p)

    def test_probability_out_of_range_rejected(self, tmp_path):
        p = tmp_path / "base.csv"
        p.write_text("from_state,to_state,strain,age_lo,age_hi,probability\n"
                     "well,hpv,lr,15,85,1.5\n")
        with pytest.raises(ParseError):
            load_baseline_table(p)

    def test_missing_strain_rejected(self, tmp_path):
        p = tmp_path / "base.csv"
        p.write_text("from_state,to_state,strain,age_lo,age_hi,probability\n"
                     "well,hpv,,15,85,0.05\n")
        with pytest.raises(ParseError):
            load_baseline_table(p)

    def test_noncontiguous_bands_rejected(self, tmp_path):
        p = tmp_path / "base.csv"
        p.write_text("from_state,to_state,strain,age_lo,age_hi,probability\n"
                     "well,hpv,lr,15,30,0.05\n"
                     "well,hpv,lr,40,85,0.01\n")
        with pytest.raises(ParseError):
            load_baseline_table(p)

    def test_duplicate_row_rejected(self, tmp_path):
        p = tmp_path / "base.csv"
        p.write_text("from_state,to_state,strain,age_lo,age_hi,probability\n"
                     "well,hpv,lr,15,85,0.05\n"
                     "well,hpv,lr,15,85,0.06\n")
        with pytest.raises(ParseError):
            load_baseline_table(p)
