import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from epicalib.errors import AlignmentError, ConfigurationError
from epicalib.priors import (
    Gamma,
    ImproperUniform,
    JointPrior,
    Normal,
    Uniform,
    joint_log_prior,
    log_prior_density,
    sample_prior,
)


class TestLogDensities:
    def test_improper_uniform_outside_support(self):
        spec = ImproperUniform(lower=0.0)
        assert log_prior_density(spec, -1.0) == -math.inf
        assert log_prior_density(spec, 3.0) == 0.0

    def test_improper_uniform_upper_bound(self):
        spec = ImproperUniform(lower=0.0, upper=50.0)
        assert spec.log_density(51.0) == -math.inf
        assert spec.log_density(49.0) == 0.0

    def test_normal_at_mode(self):
        spec = Normal(9.0, 1.0)
        assert spec.log_density(9.0) == pytest.approx(-0.5 * math.log(2 * math.pi), rel=1e-12)

    def test_normal_matches_scipy(self):
        spec = Normal(0.06, 0.01)
        for x in (0.03, 0.06, 0.1):
            assert spec.log_density(x) == pytest.approx(
                stats.norm.logpdf(x, 0.06, 0.01), rel=1e-12
            )

    def test_gamma_zero_boundary(self):
        assert Gamma(shape=2.0, rate=1.0).log_density(0.0) == -math.inf
        assert Gamma(shape=1.0, rate=3.0).log_density(0.0) == pytest.approx(math.log(3.0))

    def test_gamma_negative(self):
        assert Gamma(shape=2.0, rate=1.0).log_density(-0.5) == -math.inf

    @given(
        x=st.floats(0.01, 50.0),
        shape=st.floats(0.2, 10.0),
        rate=st.floats(0.1, 10.0),
    )
    @settings(max_examples=60, deadline=None)
    def test_gamma_matches_scipy(self, x, shape, rate):
        spec = Gamma(shape=shape, rate=rate)
        expected = stats.gamma.logpdf(x, a=shape, scale=1.0 / rate)
        assert spec.log_density(x) == pytest.approx(expected, rel=1e-9, abs=1e-9)

    def test_uniform_density(self):
        spec = Uniform(2.0, 6.0)
        assert spec.log_density(3.0) == pytest.approx(-math.log(4.0))
        assert spec.log_density(6.5) == -math.inf


class TestConstructionValidation:
    def test_uniform_needs_a_lt_b(self):
        with pytest.raises(ValueError):
            Uniform(2.0, 2.0)

    def test_normal_needs_positive_sigma(self):
        with pytest.raises(ValueError):
            Normal(0.0, -1.0)

    def test_gamma_needs_positive_params(self):
        with pytest.raises(ValueError):
            Gamma(shape=0.0, rate=1.0)
        with pytest.raises(ValueError):
            Gamma(shape=1.0, rate=0.0)

    def test_improper_uniform_bounds_ordered(self):
        with pytest.raises(ValueError):
            ImproperUniform(lower=5.0, upper=1.0)


class TestJointPrior:
    def test_all_improper_inside_is_zero(self):
        prior = JointPrior(
            names=("a", "b"),
            specs=(ImproperUniform(0.0), ImproperUniform(0.0, 10.0)),
        )
        assert joint_log_prior(prior, [1.0, 2.0]) == 0.0

    def test_one_factor_out_of_support(self):
        prior = JointPrior(names=("a", "b"), specs=(ImproperUniform(0.0), Normal(0, 1)))
        assert joint_log_prior(prior, [-1.0, 0.0]) == -math.inf

    def test_two_normals_closed_form(self):
        prior = JointPrior(names=("c", "p"), specs=(Normal(9, 1), Normal(0.06, 0.01)))
        got = joint_log_prior(prior, [9.0, 0.06])
        expected = -math.log(2 * math.pi) - math.log(1.0 * 0.01)
        assert got == pytest.approx(expected, rel=1e-12)
        oracle = stats.norm.logpdf(9, 9, 1) + stats.norm.logpdf(0.06, 0.06, 0.01)
        assert got == pytest.approx(float(oracle), rel=1e-12)

    def test_dimension_mismatch(self):
        prior = JointPrior(names=("a",), specs=(Normal(0, 1),))
        with pytest.raises(AlignmentError):
            joint_log_prior(prior, [1.0, 2.0])

    @given(st.permutations(list(range(4))))
    @settings(max_examples=20, deadline=None)
    def test_permutation_equivariance(self, perm):
        names = ("a", "b", "c", "d")
        specs = (Normal(0, 1), Uniform(0, 2), Gamma(2, 3), Normal(5, 2))
        theta = np.array([0.3, 1.1, 0.7, 4.0])
        base = JointPrior(names=names, specs=specs).log_density(theta)
        p = list(perm)
        permuted = JointPrior(
            names=tuple(names[i] for i in p), specs=tuple(specs[i] for i in p)
        ).log_density(theta[p])
        assert permuted == pytest.approx(base, rel=1e-12)


class TestNormalization:
    @pytest.mark.parametrize(
        "spec,lo,hi",
        [
            (Uniform(1.0, 4.0), 1.0, 4.0),
            (Normal(2.0, 0.5), 2.0 - 10 * 0.5, 2.0 + 10 * 0.5),
            (Gamma(shape=3.0, rate=2.0), 0.0, 40.0),
            (Gamma(shape=0.7, rate=1.0), 0.0, 50.0),
        ],
    )
    def test_density_integrates_to_one(self, spec, lo, hi):
        total, err = integrate.quad(lambda x: math.exp(spec.log_density(x)), lo, hi,
                                    limit=200)
        assert total == pytest.approx(1.0, abs=1e-6)


class TestSampling:
    def test_uniform_support(self):
        rng = np.random.default_rng(0)
        spec = Uniform(0.0, 1.0)
        draws = [sample_prior(spec, rng) for _ in range(100)]
        assert all(0.0 <= x < 1.0 for x in draws)

    def test_normal_sample_mean(self):
        rng = np.random.default_rng(1)
        draws = np.array([Normal(9, 1).sample(rng) for _ in range(100_000)])
        assert abs(draws.mean() - 9.0) < 0.02

    def test_gamma_moment_check(self):
        rng = np.random.default_rng(2)
        shape, rate, n = 3.0, 2.0, 100_000
        draws = np.array([Gamma(shape, rate).sample(rng) for _ in range(n)])
        tol = 3.0 * (math.sqrt(shape) / rate) / math.sqrt(n)
        assert abs(draws.mean() - shape / rate) < tol

    def test_deterministic_given_rng_state(self):
        a = Normal(0, 1).sample(np.random.default_rng(123))
        b = Normal(0, 1).sample(np.random.default_rng(123))
        assert a == b

    @pytest.mark.parametrize(
        "spec,cdf",
        [
            (Uniform(2.0, 5.0), lambda x: stats.uniform.cdf(x, loc=2.0, scale=3.0)),
            (Normal(1.0, 2.0), lambda x: stats.norm.cdf(x, loc=1.0, scale=2.0)),
            (Gamma(2.5, 1.5), lambda x: stats.gamma.cdf(x, a=2.5, scale=1.0 / 1.5)),
            # improper uniforms sample uniformly from their init window
            (ImproperUniform(0.0, init_lower=1.0, init_upper=4.0),
             lambda x: stats.uniform.cdf(x, loc=1.0, scale=3.0)),
        ],
    )
    def test_kolmogorov_smirnov(self, spec, cdf):
        rng = np.random.default_rng(99)
        draws = np.array([spec.sample(rng) for _ in range(100_000)])
        ks = stats.kstest(draws, cdf).statistic
        assert ks < 0.01

    def test_improper_uniform_needs_init_bounds(self):
        rng = np.random.default_rng(0)
        with pytest.raises(ConfigurationError):
            ImproperUniform(lower=0.0).sample(rng)

    def test_improper_uniform_with_init_bounds(self):
        rng = np.random.default_rng(0)
        spec = ImproperUniform(lower=0.0, init_lower=1.0, init_upper=3.0)
        draws = [spec.sample(rng) for _ in range(50)]
        assert all(1.0 <= x < 3.0 for x in draws)

    def test_joint_sample_shape(self):
        prior = JointPrior(names=("a", "b"), specs=(Normal(0, 1), Gamma(2, 2)))
        theta = prior.sample(np.random.default_rng(5))
        assert theta.shape == (2,)
