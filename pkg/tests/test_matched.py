import numpy as np
import pytest
from joblib import Parallel, delayed

from asfbounds import (
    AnalysisConfig,
    EstimationError,
    MatchedDataset,
    bootstrap_matched,
    estimate_asf_matched,
    simulate_sample,
)


def constant_decision_data(n=50, d=1):
    rng = np.random.default_rng(4)
    return MatchedDataset.from_arrays(
        d=np.full(n, d), p=rng.uniform(size=n), x=np.zeros(n, dtype=int)
    )


class TestEstimate:
    def test_unanimous_decisions(self):
        est = estimate_asf_matched(constant_decision_data(d=1), 0)
        assert est.mu_hat == 1.0

    def test_benchmark_x0(self, sample_20k):
        est = estimate_asf_matched(sample_20k, 0)
        assert abs(est.mu_hat - 0.5) <= 0.03
        assert est.n == 20_000

    def test_benchmark_x1(self, sample_20k):
        est = estimate_asf_matched(sample_20k, 1)
        assert abs(est.mu_hat - 0.5) <= 0.03

    def test_estimate_in_unit_interval(self):
        rng = np.random.default_rng(9)
        for _ in range(10):
            n = int(rng.integers(20, 200))
            data = MatchedDataset.from_arrays(
                d=rng.integers(0, 2, n), p=rng.uniform(size=n),
                x=rng.integers(0, 2, n),
            )
            est = estimate_asf_matched(data, 0)
            assert 0.0 <= est.mu_hat <= 1.0

    def test_row_order_irrelevant(self):
        rng = np.random.default_rng(10)
        n = 300
        data = MatchedDataset.from_arrays(
            d=rng.integers(0, 2, n), p=rng.uniform(size=n), x=rng.integers(0, 2, n)
        )
        shuffled = data.take(rng.permutation(n))
        a = estimate_asf_matched(data, 0).mu_hat
        b = estimate_asf_matched(shuffled, 0).mu_hat
        assert a == pytest.approx(b, abs=1e-12)

    def test_missing_attribute_value(self):
        with pytest.raises(EstimationError, match="x=1"):
            estimate_asf_matched(constant_decision_data(), 1)

    def test_skip_count_reported(self):
        # regression points cluster far from the other attribute's reports,
        # so some query points fall outside every kernel window
        p = np.concatenate([np.linspace(0.05, 0.12, 30), np.linspace(0.85, 0.95, 30)])
        x = np.repeat([0, 1], 30)
        d = np.tile([0, 1], 30)
        data = MatchedDataset.from_arrays(d=d, p=p, x=x)
        est = estimate_asf_matched(data, 0)
        assert est.n_skipped > 0
        assert est.n_skipped < len(data)


class TestBootstrap:
    def test_degenerate_replicates_have_zero_se(self):
        # identical rows: every resample reproduces the same dataset
        data = MatchedDataset.from_arrays(
            d=np.tile([1, 0], 20), p=np.tile([0.4, 0.6], 20), x=np.zeros(40, dtype=int)
        )
        est = bootstrap_matched(data, 0, B=2, seed=1)
        assert est.se == 0.0
        assert est.ci_lower == est.ci_upper == est.mu_hat

    def test_deterministic_given_seed(self, sample_20k):
        data = sample_20k.take(np.arange(500))
        a = bootstrap_matched(data, 0, B=30, seed=5)
        b = bootstrap_matched(data, 0, B=30, seed=5)
        assert (a.se, a.ci_lower, a.ci_upper) == (b.se, b.ci_lower, b.ci_upper)

    def test_worker_count_does_not_change_result(self, sample_20k):
        data = sample_20k.take(np.arange(500))
        serial = bootstrap_matched(data, 0, B=30, seed=5,
                                   config=AnalysisConfig(workers=1))
        parallel = bootstrap_matched(data, 0, B=30, seed=5,
                                     config=AnalysisConfig(workers=2))
        assert serial.to_dict() == parallel.to_dict()

    def test_needs_two_replicates(self):
        with pytest.raises(ValueError, match="B >= 2"):
            bootstrap_matched(constant_decision_data(), 0, B=1, seed=0)

    def test_percentile_interval_covers_truth(self):
        # true value is 1/2 for the benchmark; the 95% percentile interval
        # should cover it in at least 90% of repetitions
        def one(rep):
            data = simulate_sample(2_000, (202, rep))
            est = bootstrap_matched(data, 0, B=200, seed=rep)
            return est.ci_lower <= 0.5 <= est.ci_upper

        hits = Parallel(n_jobs=2)(delayed(one)(rep) for rep in range(200))
        assert sum(hits) >= 180


class TestBivariateReports:
    def test_product_kernel_estimate(self):
        # d independent of a bivariate report: the structural function is
        # flat, so the estimate tends to the plain mean of d
        rng = np.random.default_rng(17)
        n = 4000
        data = MatchedDataset.from_arrays(
            d=(rng.uniform(size=n) < 0.7).astype(int),
            p=rng.uniform(size=(n, 2)),
            x=np.zeros(n, dtype=int),
        )
        est = estimate_asf_matched(data, 0)
        assert est.mu_hat == pytest.approx(0.7, abs=0.03)
