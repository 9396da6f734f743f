import math

import numpy as np
import pytest
from scipy.integrate import quad

from puffercal import (
    DiscreteDistribution,
    ExponentialParams,
    GaussianParams,
    LaplaceParams,
    PrivacySpec,
    build_empirical,
    noise_log_density,
    posterior_log_density,
)
from puffercal.dist import (
    noise_variance,
    sample_noise,
    truncation_window,
)
from puffercal.errors import EmptySample, InvalidValue, NonNormalizable

from conftest import point_mass


class TestDiscreteDistribution:
    def test_valid_construction(self):
        d = DiscreteDistribution(atoms=(0.0, 1.0), masses=(0.25, 0.75))
        assert d.min_atom == 0.0
        assert d.max_atom == 1.0

    def test_atoms_must_increase(self):
        with pytest.raises(InvalidValue):
            DiscreteDistribution(atoms=(1.0, 1.0), masses=(0.5, 0.5))
        with pytest.raises(InvalidValue):
            DiscreteDistribution(atoms=(2.0, 1.0), masses=(0.5, 0.5))

    def test_masses_positive_and_normalized(self):
        with pytest.raises(InvalidValue):
            DiscreteDistribution(atoms=(0.0, 1.0), masses=(1.0, 0.0))
        with pytest.raises(InvalidValue):
            DiscreteDistribution(atoms=(0.0, 1.0), masses=(0.5, 0.4))
        with pytest.raises(InvalidValue):
            DiscreteDistribution(atoms=(0.0,), masses=(0.5, 0.5))

    def test_non_finite_atom_rejected(self):
        with pytest.raises(InvalidValue):
            DiscreteDistribution(atoms=(math.inf,), masses=(1.0,))

    def test_cdf_point_mass(self):
        d = point_mass(5.0)
        assert d.cdf(4.0) == 0.0
        assert d.cdf(5.0) == 1.0
        assert d.cdf(6.0) == 1.0

    def test_cdf_partial_sum(self):
        d = DiscreteDistribution(atoms=(0.0, 1.0), masses=(0.25, 0.75))
        assert d.cdf(0.0) == 0.25
        assert d.cdf(0.5) == 0.25
        assert d.cdf(1.0) == 1.0

    def test_sample_deterministic(self):
        d = DiscreteDistribution(atoms=(0.0, 1.0, 3.0), masses=(0.2, 0.3, 0.5))
        a = d.sample(np.random.default_rng(3), 100)
        b = d.sample(np.random.default_rng(3), 100)
        assert np.array_equal(a, b)
        assert set(np.unique(a)) <= {0.0, 1.0, 3.0}


class TestBuildEmpirical:
    def test_counting(self):
        d = build_empirical([1, 1, 2])
        assert d.atoms == (1.0, 2.0)
        assert d.masses == pytest.approx((2 / 3, 1 / 3), rel=1e-15)

    def test_point_mass(self):
        d = build_empirical([5])
        assert d.atoms == (5.0,)
        assert d.masses == (1.0,)

    def test_empty_rejected(self):
        with pytest.raises(EmptySample):
            build_empirical([])

    def test_non_finite_rejected(self):
        with pytest.raises(InvalidValue):
            build_empirical([1.0, math.nan])

    def test_fair_coin_law_of_large_numbers(self):
        rng = np.random.default_rng(1234)
        draws = rng.integers(0, 2, size=1000)
        d = build_empirical([float(v) for v in draws])
        assert d.atoms == (0.0, 1.0)
        assert abs(d.masses[0] - 0.5) < 0.05
        assert abs(d.masses[1] - 0.5) < 0.05


class TestMechanismParams:
    def test_positive_scale_required(self):
        with pytest.raises(InvalidValue):
            LaplaceParams(scale=0.0)
        with pytest.raises(InvalidValue):
            GaussianParams(sigma=-1.0)
        with pytest.raises(InvalidValue):
            ExponentialParams(scale=0.0)

    def test_cost_must_be_metric(self):
        # The squared cost violates the triangle inequality.
        with pytest.raises(InvalidValue):
            ExponentialParams(scale=1.0, cost=lambda z: z * z, cost_name="z2")

    def test_asymmetric_cost_rejected(self):
        with pytest.raises(InvalidValue):
            ExponentialParams(scale=1.0, cost=lambda z: abs(z) + z, cost_name="bad")


class TestNoiseLogDensity:
    def test_laplace_at_zero(self):
        assert noise_log_density(LaplaceParams(scale=1.0), 0.0) == pytest.approx(
            math.log(0.5), abs=1e-15
        )

    def test_gaussian_at_zero(self):
        assert noise_log_density(GaussianParams(sigma=1.0), 0.0) == pytest.approx(
            -0.5 * math.log(2 * math.pi), abs=1e-15
        )

    def test_exponential_equals_laplace_at_zero(self):
        mech = ExponentialParams(scale=1.0)
        assert noise_log_density(mech, 0.0) == pytest.approx(math.log(0.5), abs=1e-10)

    def test_exponential_matches_laplace_on_grid(self):
        theta = 0.7
        mech = ExponentialParams(scale=theta)
        lap = LaplaceParams(scale=theta)
        for z in np.linspace(-8.0, 8.0, 100):
            assert noise_log_density(mech, float(z)) == pytest.approx(
                noise_log_density(lap, float(z)), abs=1e-10
            )

    def test_non_integrable_cost_rejected(self):
        mech = ExponentialParams(scale=1.0, cost=lambda z: 0.0, cost_name="flat")
        with pytest.raises(NonNormalizable):
            noise_log_density(mech, 0.0)

    @pytest.mark.parametrize(
        "mech",
        [
            LaplaceParams(scale=2.0),
            GaussianParams(sigma=1.5),
            ExponentialParams(scale=1.3),
            ExponentialParams(
                scale=1.0, cost=lambda z: 2.0 * abs(z), cost_name="scaled-abs"
            ),
        ],
    )
    def test_density_integrates_to_one(self, mech):
        anchor = point_mass(0.0)
        lo, hi = truncation_window(mech, anchor)
        total, _ = quad(
            lambda z: math.exp(noise_log_density(mech, z)),
            lo,
            hi,
            points=[0.0],
            limit=200,
        )
        assert total == pytest.approx(1.0, abs=1e-8)


class TestPosterior:
    def test_point_mass_shift(self):
        mech = LaplaceParams(scale=1.0)
        assert posterior_log_density(mech, point_mass(0.0), 0.0) == pytest.approx(
            math.log(0.5), abs=1e-12
        )

    def test_two_atom_gaussian_oracle(self):
        # Direct two-term mixture sum at y = 0 for atoms at -1 and +1.
        prior = DiscreteDistribution(atoms=(-1.0, 1.0), masses=(0.5, 0.5))
        mech = GaussianParams(sigma=1.0)
        phi = lambda z: math.exp(-0.5 * z * z) / math.sqrt(2 * math.pi)
        expected = math.log(0.5 * phi(-1.0) + 0.5 * phi(1.0))
        assert posterior_log_density(mech, prior, 0.0) == pytest.approx(
            expected, abs=1e-12
        )

    @pytest.mark.parametrize(
        "mech", [LaplaceParams(scale=0.8), GaussianParams(sigma=1.1)]
    )
    def test_tail_decays_monotonically(self, mech):
        prior = DiscreteDistribution(atoms=(0.0, 2.0), masses=(0.4, 0.6))
        ys = np.linspace(3.0, 30.0, 50)
        values = [posterior_log_density(mech, prior, float(y)) for y in ys]
        assert all(a > b for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize(
        "mech",
        [
            LaplaceParams(scale=1.2),
            GaussianParams(sigma=0.9),
            ExponentialParams(scale=0.6),
        ],
    )
    def test_posterior_integrates_to_one(self, mech):
        prior = DiscreteDistribution(atoms=(-1.0, 0.5, 2.0), masses=(0.3, 0.45, 0.25))
        lo, hi = truncation_window(mech, prior)
        total, _ = quad(
            lambda y: math.exp(posterior_log_density(mech, prior, y)),
            lo,
            hi,
            points=list(prior.atoms),
            limit=300,
        )
        assert total == pytest.approx(1.0, abs=1e-6)


class TestVectorizedDensities:
    def test_scalar_only_cost_on_matrix(self):
        # math.sqrt rejects arrays, forcing the element-wise fallback.
        mech = ExponentialParams(
            scale=1.0, cost=lambda z: math.sqrt(z * z), cost_name="scalar-abs"
        )
        from puffercal.dist import noise_log_density_many

        grid = np.array([[-1.0, 0.0], [0.5, 2.0]])
        values = noise_log_density_many(mech, grid)
        assert values.shape == grid.shape
        lap = LaplaceParams(scale=1.0)
        for z, v in zip(grid.ravel(), values.ravel()):
            assert v == pytest.approx(noise_log_density(lap, float(z)), abs=1e-10)

    def test_posterior_many_matches_scalar(self):
        prior = DiscreteDistribution(atoms=(-1.0, 0.5), masses=(0.4, 0.6))
        mech = GaussianParams(sigma=0.7)
        from puffercal.dist import posterior_log_density_many

        ys = np.linspace(-4.0, 4.0, 17)
        many = posterior_log_density_many(mech, prior, ys)
        for y, v in zip(ys, many):
            assert v == pytest.approx(posterior_log_density(mech, prior, float(y)), abs=1e-12)


class TestNoiseVarianceAndSampling:
    def test_variances(self):
        assert noise_variance(LaplaceParams(scale=2.0)) == 8.0
        assert noise_variance(GaussianParams(sigma=1.5)) == 2.25
        # Exponential with |z| cost is Laplace: variance 2 theta^2.
        assert noise_variance(ExponentialParams(scale=1.3)) == pytest.approx(
            2 * 1.3**2, rel=1e-6
        )

    def test_sampling_deterministic(self):
        mech = ExponentialParams(scale=1.0)
        a = sample_noise(mech, np.random.default_rng(9), 500)
        b = sample_noise(mech, np.random.default_rng(9), 500)
        assert np.array_equal(a, b)

    def test_exponential_sampling_matches_laplace_quantiles(self):
        mech = ExponentialParams(scale=1.0)
        draws = sample_noise(mech, np.random.default_rng(42), 200_000)
        # Median of |Z| for Laplace(1) is ln 2.
        assert np.median(np.abs(draws)) == pytest.approx(math.log(2), abs=0.02)
        assert np.var(draws) == pytest.approx(2.0, rel=0.05)


class TestPrivacySpec:
    def test_alpha_one_rejected(self):
        with pytest.raises(InvalidValue, match="alpha = 1 rejected"):
            PrivacySpec(alpha=1.0, epsilon=0.5)

    def test_alpha_ranges(self):
        assert PrivacySpec(alpha=0.5, epsilon=1.0).is_sub_unit
        assert not PrivacySpec(alpha=2.0, epsilon=1.0).is_sub_unit
        assert PrivacySpec(alpha=math.inf, epsilon=1.0).alpha == math.inf
        with pytest.raises(InvalidValue):
            PrivacySpec(alpha=0.0, epsilon=1.0)
        with pytest.raises(InvalidValue):
            PrivacySpec(alpha=-2.0, epsilon=1.0)

    def test_epsilon_positive(self):
        with pytest.raises(InvalidValue):
            PrivacySpec(alpha=2.0, epsilon=0.0)
        with pytest.raises(InvalidValue):
            PrivacySpec(alpha=2.0, epsilon=-1.0)
