import math

import numpy as np
import pytest

from conftest import rel_err, within_se
from varmoments.errors import DomainError
from varmoments.moments import Ar1Spec, IidMomentModel, expected_s2_ar1, var_s2_iid
from varmoments.samplestats import sample_variance
from varmoments.stochastic import (
    BLOCK_SIZE,
    STREAM_ECF,
    DistributionSpec,
    ar1_from_innovations,
    draw_sample,
    replication_rng,
    run_replications,
    simulate_ar1,
    variance_with_se,
)


class TestDistributionSpec:
    def test_validation(self):
        for bad in (lambda: DistributionSpec.normal(0, 0), lambda: DistributionSpec.exponential(-1),
                    lambda: DistributionSpec.uniform(1, 1), lambda: DistributionSpec("cauchy", (0,)),
                    lambda: DistributionSpec.normal(float("nan"), 1)):
            with pytest.raises(DomainError):
                bad()

    def test_moments(self):
        u = DistributionSpec.uniform(-1, 3)
        assert u.mean == 1.0 and rel_err(u.variance, 16 / 12) <= 1e-15
        assert DistributionSpec.exponential(2.0).central_moment(4) == 9 / 16
        with pytest.raises(DomainError):
            u.central_moment(5)

    @pytest.mark.parametrize("d", [DistributionSpec.normal(1, 4), DistributionSpec.exponential(0.5),
                                   DistributionSpec.uniform(2, 3)])
    def test_sample_moments_match(self, d):
        x = d.sample(replication_rng(3), 200_000)
        se_mean = math.sqrt(d.variance / x.size)
        assert within_se(x.mean(), d.mean, se_mean, k=4)
        v, se_v = variance_with_se(x)
        assert within_se(v, d.variance, se_v, k=4)


class TestSeeding:
    def test_deterministic(self):
        a = replication_rng(42, 5).standard_normal(10)
        b = replication_rng(42, 5).standard_normal(10)
        assert np.array_equal(a, b)

    def test_indices_and_streams_differ(self):
        base = replication_rng(42, 0).standard_normal(10)
        assert not np.array_equal(base, replication_rng(42, 1).standard_normal(10))
        assert not np.array_equal(base, replication_rng(43, 0).standard_normal(10))
        assert not np.array_equal(base, replication_rng(42, 0, STREAM_ECF).standard_normal(10))

    def test_bad_seed(self):
        with pytest.raises(DomainError):
            replication_rng(-1)
        with pytest.raises(DomainError):
            replication_rng(1.5)

    def test_seed_separation(self):
        r = 20_000
        a = run_replications(DistributionSpec.normal(), 5, r, seed=1, keep_pairs=True).pairs[:, 1]
        b = run_replications(DistributionSpec.normal(), 5, r, seed=2, keep_pairs=True).pairs[:, 1]
        assert abs(np.corrcoef(a, b)[0, 1]) < 4 / math.sqrt(r)


class TestAr1:
    def test_deterministic(self):
        a = Ar1Spec(1.0, 0.6, 30)
        assert np.array_equal(simulate_ar1(a, 11), simulate_ar1(a, 11))
        assert not np.array_equal(simulate_ar1(a, 11), simulate_ar1(a, 12))

    def test_rho_zero_is_plain_normal(self):
        x = simulate_ar1(Ar1Spec(2.0, 0.0, 25), 5)
        z = replication_rng(5, 0).standard_normal(25)
        assert np.allclose(x, math.sqrt(2.0) * z, rtol=0, atol=1e-15)

    def test_recursion(self):
        z = np.array([1.0, 0.5, -1.0])
        x = ar1_from_innovations(z, 1.0, 0.5)
        x0 = 1 / math.sqrt(0.75)
        assert np.allclose(x, [x0, 0.5 * x0 + 0.5, 0.25 * x0 + 0.25 - 1.0])

    def test_rejects_non_spec(self):
        with pytest.raises(DomainError):
            simulate_ar1(DistributionSpec.normal(), 1)

    @pytest.mark.parametrize("rho", [-0.5, 0.5, 0.9])
    def test_stationary_marginal_and_lag_one(self, rho):
        a = Ar1Spec(1.0, rho, 200)
        x = np.stack([draw_sample(a, 200, 17, i) for i in range(2000)])
        g0 = a.marginal_variance
        # first coordinate has the stationary law, no burn-in
        v, se = variance_with_se(x[:, 0])
        assert within_se(v, g0, se)
        lag1 = (x[:, 1:] * x[:, :-1]).mean(axis=1) / g0
        assert within_se(lag1.mean(), rho, lag1.std(ddof=1) / math.sqrt(lag1.size))


class TestReplications:
    def test_validation(self):
        with pytest.raises(DomainError):
            run_replications(DistributionSpec.normal(), 1, 100)
        with pytest.raises(DomainError):
            run_replications(DistributionSpec.normal(), 5, 1)
        with pytest.raises(DomainError):
            run_replications("normal", 5, 100)
        with pytest.raises(DomainError):
            run_replications(DistributionSpec.normal(), 3, 100, symmetric=True)

    def test_reproducible_and_block_independent(self):
        d = DistributionSpec.exponential()
        r = BLOCK_SIZE + 300
        a = run_replications(d, 6, r, seed=5, keep_pairs=True)
        b = run_replications(d, 6, r, seed=5, keep_pairs=True)
        assert a.as_dict() == b.as_dict()
        # first rows coincide with a shorter run: replications are indexed
        c = run_replications(d, 6, 50, seed=5, keep_pairs=True)
        assert np.array_equal(a.pairs[:50], c.pairs)
        s = draw_sample(d, 6, 5, 7)
        assert a.pairs[7, 1] == pytest.approx(sample_variance(s), rel=1e-14)

    @pytest.mark.slow
    def test_worker_count_invariance(self):
        d = DistributionSpec.normal()
        r = 2 * BLOCK_SIZE + 10
        one = run_replications(d, 8, r, seed=3, keep_pairs=True, workers=1)
        two = run_replications(d, 8, r, seed=3, keep_pairs=True, workers=2)
        assert one.as_dict() == two.as_dict()
        assert np.array_equal(one.pairs, two.pairs)

    def test_ar1_length_override(self):
        rep = run_replications(Ar1Spec(1.0, 0.2, 10), n=6, r=200, seed=1)
        assert rep.n == 6
        assert run_replications(Ar1Spec(1.0, 0.2, 10), r=200, seed=1).n == 10

    def test_symmetric_defaults(self):
        assert run_replications(DistributionSpec.normal(), 3, 100).mean_symmetric_moments is None
        assert run_replications(DistributionSpec.normal(), 4, 100).mean_symmetric_moments is not None

    def test_pairs_shape(self):
        rep = run_replications(DistributionSpec.uniform(), 5, 120, keep_pairs=True)
        assert rep.pairs.shape == (120, 2)
        assert "pairs" in rep.as_dict(include_pairs=True)
        assert "pairs" not in rep.as_dict()

    @pytest.mark.slow
    def test_normal_mean_and_variance(self):
        rep = run_replications(DistributionSpec.normal(0, 2.0), 11, 50_000, seed=21)
        assert within_se(rep.mean_of_s2, 2.0, rep.se_of_mean_s2)
        assert within_se(rep.var_of_s2, 2 * 4.0 / 10, rep.se_of_var_s2)

    @pytest.mark.slow
    @pytest.mark.parametrize("rho", [-0.5, 0.5])
    def test_ar1_mean(self, rho):
        a = Ar1Spec(1.0, rho, 10)
        rep = run_replications(a, r=40_000, seed=4)
        assert within_se(rep.mean_of_s2, expected_s2_ar1(a), rep.se_of_mean_s2)

    @pytest.mark.slow
    def test_exponential_mean_variance_covariance(self):
        # Cov(xbar, s^2) = mu3c / n = 2 / 10 for Exp(1)
        rep = run_replications(DistributionSpec.exponential(), 10, 50_000, seed=6, keep_pairs=True)
        xbar, s2 = rep.pairs.T
        prod = (xbar - xbar.mean()) * (s2 - s2.mean())
        cov = prod.sum() / (prod.size - 1)
        assert within_se(cov, 0.2, prod.std(ddof=1) / math.sqrt(prod.size))
        m = IidMomentModel.from_central(1.0, 1.0, 9.0)
        assert within_se(rep.var_of_s2, var_s2_iid(m, 10), rep.se_of_var_s2)


def test_variance_with_se_normal_reference(rng):
    v = rng.standard_normal(100_000)
    var, se = variance_with_se(v)
    # for normal data the SE of the variance is about sqrt(2 / (r - 1))
    assert rel_err(se, math.sqrt(2 / (v.size - 1))) < 0.05
