import numpy as np
import pytest

from asfbounds import (
    EstimationError,
    RevealedDataset,
    ZeroVarianceError,
    bandwidth_rule,
    conditional_mean_complement,
    count_density,
    epanechnikov,
    fit_kernel_density,
    kde_fit,
    nadaraya_watson,
    normal_cdf,
    normal_quantile,
    simulate_draws,
)
from asfbounds.density import grid_axis, trapezoid_integrate

from conftest import KDE_FIDELITY_SEED


class TestEpanechnikov:
    def test_at_mode(self):
        assert epanechnikov(0.0) == 0.75

    def test_support_boundary(self):
        assert epanechnikov(1.0) == 0.0
        assert epanechnikov(-1.0) == 0.0

    def test_outside_support(self):
        assert epanechnikov(2.0) == 0.0

    def test_vectorized(self):
        u = np.array([-2.0, 0.0, 0.5, 1.5])
        assert np.allclose(epanechnikov(u), [0.0, 0.75, 0.75 * 0.75, 0.0])

    def test_integrates_to_one(self):
        u = np.linspace(-1, 1, 100001)
        assert np.trapezoid(epanechnikov(u), u) == pytest.approx(1.0, abs=1e-8)


class TestBandwidthRule:
    def test_two_point_hand_value(self):
        # s = sqrt(0.5), n = 2  ->  sqrt(0.5) * 2**(-1/5)
        assert bandwidth_rule([0.0, 1.0]) == pytest.approx(0.6155722066724582, abs=1e-12)

    def test_constant_sample(self):
        with pytest.raises(ZeroVarianceError):
            bandwidth_rule([0.3, 0.3, 0.3])

    def test_too_small(self):
        with pytest.raises(EstimationError):
            bandwidth_rule([0.5])

    def test_large_uniform_sample_matches_analytic_std(self):
        rng = np.random.default_rng(12)
        sample = rng.uniform(size=100_000)
        h = bandwidth_rule(sample)
        target = (1 / np.sqrt(12)) * 100_000 ** (-0.2)
        assert abs(h - target) / target < 0.10


class TestKdeFit:
    def test_single_point_at_mode(self):
        d = kde_fit(np.array([0.5]), 0.1, 1001)
        g = grid_axis(1001)
        assert d.values[g == 0.5][0] == pytest.approx(7.5)

    def test_single_point_outside_window(self):
        d = kde_fit(np.array([0.5]), 0.1, 1001)
        g = grid_axis(1001)
        assert d.values[g == 0.61][0] == 0.0

    def test_fidelity_to_cubic_density(self, fidelity_draws):
        # 50k draws whose law has density 3p^2: the fitted curve stays
        # uniformly close on the interior band
        sel = (fidelity_draws.x == 1) & (fidelity_draws.z == 1)
        pts = fidelity_draws.p[sel][:50_000]
        fit = fit_kernel_density(pts)
        g = grid_axis(1001)
        band = (g >= 0.1) & (g <= 0.9)
        sup = np.max(np.abs(fit.density.values - 3 * g**2)[band])
        assert sup <= 0.05

    def test_boundary_leakage_follows_first_order_law(self, fidelity_draws):
        # without correction the fit loses 0.1875 * h * f(boundary) of mass
        # per boundary; checking against that law pins the normalization much
        # tighter than a fixed tolerance could
        pts = fidelity_draws.p[:50_000]
        fit = fit_kernel_density(pts)
        h = fit.bandwidths[0]
        assert fit.density.integral() == pytest.approx(1.0 - 2 * 0.1875 * h, abs=1.5e-3)
        assert np.all(fit.density.values >= 0)

    def test_normalization_for_boundary_vanishing_density(self, fidelity_draws):
        # the (0, 1) cell has density 6p(1-p), which vanishes at both edges,
        # so leakage is second order and the integral is close to one
        sel = (fidelity_draws.x == 0) & (fidelity_draws.z == 1)
        fit = fit_kernel_density(fidelity_draws.p[sel])
        assert fit.density.integral() == pytest.approx(1.0, abs=2e-3)

    def test_reflection_restores_boundary_mass(self):
        rng = np.random.default_rng(3)
        pts = rng.uniform(size=20_000)
        h = bandwidth_rule(pts)
        plain = kde_fit(pts, h, 1001)
        corrected = kde_fit(pts, h, 1001, boundary_correction="reflection")
        assert corrected.integral() > plain.integral()
        assert corrected.integral() == pytest.approx(1.0, abs=2e-4)

    def test_bivariate_product_kernel(self):
        d = kde_fit(np.array([[0.5, 0.5]]), (0.1, 0.2), 101)
        g = grid_axis(101)
        i = int(np.nonzero(g == 0.5)[0][0])
        assert d.values[i, i] == pytest.approx(0.75 / 0.1 * 0.75 / 0.2)

    def test_empty_input(self):
        with pytest.raises(EstimationError):
            kde_fit(np.empty(0), 0.1)

    def test_points_outside_unit_interval(self):
        with pytest.raises(ValueError):
            kde_fit(np.array([1.4]), 0.1)


class TestCountDensity:
    def test_frequencies(self):
        d = count_density(np.array([0.2, 0.2, 0.7]))
        assert np.allclose(d.points, [0.2, 0.7])
        assert np.allclose(d.masses, [2 / 3, 1 / 3])

    def test_single_value(self):
        d = count_density(np.array([0.5]))
        assert d.masses[0] == 1.0

    def test_two_point_concentration(self):
        rng = np.random.default_rng(7)
        pts = np.where(rng.uniform(size=10_000) < 0.5, 0.2, 0.8)
        d = count_density(pts)
        assert np.all(np.abs(d.masses - 0.5) < 0.02)

    def test_masses_sum_exactly(self):
        rng = np.random.default_rng(8)
        d = count_density(rng.integers(0, 7, size=1000) / 10.0)
        assert abs(d.masses.sum() - 1.0) < 1e-12


class TestNadarayaWatson:
    def test_all_ones(self):
        assert nadaraya_watson([1, 1, 1], [0.4, 0.5, 0.6], 0.5, 0.2) == 1.0

    def test_symmetric_half(self):
        assert nadaraya_watson([0, 1], [0.4, 0.6], 0.5, 0.2) == pytest.approx(0.5)

    def test_zero_weight_errors(self):
        with pytest.raises(EstimationError, match="zero kernel weight"):
            nadaraya_watson([1, 0], [0.1, 0.2], 0.9, 0.05)

    def test_benchmark_conditional_mean(self):
        # with X = 1 the conditional mean of D given a report p equals
        # Phi(2 * Phi^{-1}(1 - p)); check on interior query points
        draws = simulate_draws(50_000, KDE_FIDELITY_SEED)
        sel = draws.x == 1
        d, p = draws.d[sel].astype(float), draws.p[sel]
        h = bandwidth_rule(p)
        for q in (0.2, 0.35, 0.5, 0.65, 0.8):
            target = float(normal_cdf(2 * normal_quantile(1 - q)))
            assert nadaraya_watson(d, p, q, h) == pytest.approx(target, abs=0.05)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(5)
        d = rng.integers(0, 2, 200).astype(float)
        p = rng.uniform(size=200)
        perm = rng.permutation(200)
        a = nadaraya_watson(d, p, 0.5, 0.2)
        b = nadaraya_watson(d[perm], p[perm], 0.5, 0.2)
        assert a == pytest.approx(b, abs=1e-12)

    def test_duplication_invariance(self):
        rng = np.random.default_rng(6)
        d = rng.integers(0, 2, 100).astype(float)
        p = rng.uniform(size=100)
        a = nadaraya_watson(d, p, 0.5, 0.2)
        b = nadaraya_watson(np.tile(d, 2), np.tile(p, 2), 0.5, 0.2)
        assert a == pytest.approx(b, abs=1e-12)


class TestConditionalMeanComplement:
    def test_half(self):
        ds = RevealedDataset.from_arrays(d=[1, 1, 0, 0], x=[0, 0, 0, 0])
        assert conditional_mean_complement(ds, 0) == 0.5

    def test_all_ones(self):
        ds = RevealedDataset.from_arrays(d=[1, 1], x=[0, 0])
        assert conditional_mean_complement(ds, 0) == 0.0

    def test_empty_cell(self):
        ds = RevealedDataset.from_arrays(d=[1, 0], x=[0, 1], z=[0, 1])
        with pytest.raises(EstimationError):
            conditional_mean_complement(ds, 0, 1)

    def test_benchmark_cell_value(self):
        draws = simulate_draws(100_000, 2)
        ds = RevealedDataset.from_arrays(d=draws.d, x=draws.x, z=draws.z)
        assert conditional_mean_complement(ds, 0, 0) == pytest.approx(0.25, abs=0.01)
