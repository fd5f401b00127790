import numpy as np
import pytest

from emse_lab import (
    BernoulliGaussian,
    BernoulliPointMass,
    Gaussian,
    MismatchPair,
    MseEvalConfig,
    ScalarChannel,
    emse_s,
    emse_s_via_kl,
    pme,
    pme_derivative,
    psi,
    psi_derivatives,
    psi_mc,
)
from emse_lab.scalar_channel import _psi_quadrature

CFG = MseEvalConfig()

# Precomputed with a standalone two-term Bayes-rule script
# (posterior = theta*N(y;1,s2) / (theta*N(y;1,s2) + (1-theta)*N(y;0,s2)),
# theta=0.1, s2=0.34):
BERNOULLI_PME_ORACLE = {
    0.3: 0.05811497311807202,
    0.5: 0.1,
    1.2: 0.4654548626667332,
}

# Brute-force Monte Carlo with 10^7 samples (independent script, seed
# 20250810): Psi for true Bernoulli(0.1) vs postulated Bernoulli(0.2)
# at noise 0.34.
PSI_MC_ORACLE_MEAN = 0.06924293163331066
PSI_MC_ORACLE_STDERR = 5.08209894530586e-05


class TestPme:
    def test_linear_gaussian_shrinkage(self):
        assert pme(Gaussian(0.0, 1.0), 2.0, 1.0) == pytest.approx(1.0, abs=1e-14)
        y = np.array([-1.0, 0.0, 3.0])
        np.testing.assert_allclose(pme(Gaussian(0.0, 2.0), y, 1.0), 2 * y / 3.0)

    def test_bernoulli_matches_bayes_oracle(self):
        for y, expected in BERNOULLI_PME_ORACLE.items():
            assert pme(BernoulliPointMass(0.1), y, 0.34) == pytest.approx(
                expected, abs=1e-12
            )

    def test_symmetric_prior_at_zero(self):
        for prior in (Gaussian(0.0, 1.0), Gaussian(0.0, 5.0)):
            assert pme(prior, 0.0, 0.7) == 0.0

    def test_finite_for_extreme_observations(self):
        prior = BernoulliGaussian(0.1)
        for y in (-1e6, 1e6):
            assert np.isfinite(pme(prior, y, 0.3))

    def test_rejects_bad_noise(self):
        with pytest.raises(ValueError):
            pme(Gaussian(0, 1), 0.5, 0.0)
        with pytest.raises(ValueError):
            ScalarChannel(-1.0)

    def test_derivative_matches_finite_difference(self):
        prior = BernoulliGaussian(0.15, 1.3)
        y = np.linspace(-3, 3, 13)
        h = 1e-6
        fd = (pme(prior, y + h, 0.4) - pme(prior, y - h, 0.4)) / (2 * h)
        np.testing.assert_allclose(pme_derivative(prior, y, 0.4), fd, atol=1e-8)


class TestPsi:
    def test_matched_gaussian_closed_form(self):
        pair = MismatchPair(Gaussian(0.0, 1.0), Gaussian(0.0, 1.0))
        assert psi(pair, 0.5, CFG) == pytest.approx(0.5 / 1.5, abs=1e-12)
        for s2 in (0.1, 1.0, 4.0):
            assert psi(pair, s2, CFG) == pytest.approx(s2 / (1 + s2), abs=1e-12)

    def test_matched_bernoulli_at_reported_fixed_point(self):
        # the fixed-point identity forces Psi(0.34) ~ 0.2*(0.34-0.03);
        # tolerance reflects the two-decimal rounding of 0.34
        p = BernoulliPointMass(0.1)
        value = psi(MismatchPair(p, p), 0.34, CFG)
        assert value == pytest.approx(0.062, abs=1e-3)

    def test_mismatched_matches_mc_oracle(self):
        pair = MismatchPair(BernoulliPointMass(0.1), BernoulliPointMass(0.2))
        value = psi(pair, 0.34, CFG)
        assert abs(value - PSI_MC_ORACLE_MEAN) <= 3 * PSI_MC_ORACLE_STDERR

    def test_internal_mc_cross_check_runs(self):
        pair = MismatchPair(BernoulliPointMass(0.1), BernoulliPointMass(0.2))
        cfg = MseEvalConfig(mc_samples=200_000, seed=42)
        value = psi(pair, 0.34, cfg)
        assert value == pytest.approx(psi(pair, 0.34, CFG), abs=1e-12)

    def test_psi_mc_agrees_with_quadrature(self):
        pair = MismatchPair(BernoulliGaussian(0.1), BernoulliGaussian(0.2))
        mc, stderr = psi_mc(pair, 0.27, 200_000, seed=1)
        assert abs(mc - psi(pair, 0.27, CFG)) <= 5 * stderr

    def test_order_doubling_converged_point_mass(self):
        # point-mass priors are fully converged by order 64
        p = BernoulliPointMass(0.1)
        for tt in (0.11, 0.20):
            pair = MismatchPair(p, BernoulliPointMass(tt))
            a = _psi_quadrature(pair, 0.34, 64)
            b = _psi_quadrature(pair, 0.34, 128)
            assert abs(a - b) < 1e-10

    def test_order_doubling_converged_spike_slab(self):
        # spike-and-slab integrands need the higher default order
        pair = MismatchPair(BernoulliGaussian(0.1), BernoulliGaussian(0.2))
        a = _psi_quadrature(pair, 0.27, CFG.quadrature_order)
        b = _psi_quadrature(pair, 0.27, 384)
        assert abs(a - b) < 1e-9

    def test_monotone_on_grid(self):
        for make in (BernoulliPointMass, BernoulliGaussian):
            pair = MismatchPair(make(0.1), make(0.2))
            grid = np.geomspace(0.01, 10.0, 25)
            values = [psi(pair, s, CFG) for s in grid]
            assert all(b >= a - 1e-9 for a, b in zip(values, values[1:]))


class TestPsiDerivatives:
    def test_gaussian_analytic(self):
        # Psi(s2) = s2/(1+s2): d/ds2 = 1/(1+s2)^2, d2/ds2^2 = -2/(1+s2)^3
        pair = MismatchPair(Gaussian(0.0, 1.0), Gaussian(0.0, 1.0))
        d = psi_derivatives(pair, 1.0, CFG)
        assert d.alpha == pytest.approx(0.25, abs=1e-6)
        assert d.beta == pytest.approx(-0.25, abs=1e-6)

    def test_table_slope_below_rate(self):
        pair = MismatchPair(BernoulliPointMass(0.1), BernoulliPointMass(0.2))
        d = psi_derivatives(pair, 0.34, CFG)
        assert 0.0 < d.alpha < 0.2

    def test_step_halving_within_error_estimate(self):
        pair = MismatchPair(BernoulliPointMass(0.1), BernoulliPointMass(0.2))
        coarse = psi_derivatives(pair, 0.34, MseEvalConfig(derivative_step=2e-3))
        fine = psi_derivatives(pair, 0.34, MseEvalConfig(derivative_step=1e-3))
        assert abs(coarse.alpha - fine.alpha) <= max(coarse.alpha_err, 1e-12)


class TestEmseS:
    def test_identity_case_exact_zero(self):
        for prior in (Gaussian(0.0, 1.0), BernoulliGaussian(0.1)):
            pair = MismatchPair(prior, prior)
            assert emse_s(pair, 0.5, CFG) == 0.0

    def test_gaussian_pair_hand_value(self):
        # postulated variance 2 gives xhat = 2y/3; excess = 5/9 - 1/2
        pair = MismatchPair(Gaussian(0.0, 1.0), Gaussian(0.0, 2.0))
        assert emse_s(pair, 1.0, CFG) == pytest.approx(1.0 / 18.0, abs=1e-12)

    def test_bernoulli_positive(self):
        pair = MismatchPair(BernoulliPointMass(0.1), BernoulliPointMass(0.2))
        assert emse_s(pair, 0.34, CFG) > 0.0


class TestKlRoute:
    def test_identity_case(self):
        pair = MismatchPair(Gaussian(0.0, 1.0), Gaussian(0.0, 1.0))
        assert emse_s_via_kl(pair, 1.0, CFG) == pytest.approx(0.0, abs=1e-12)

    def test_gaussian_pair(self):
        pair = MismatchPair(Gaussian(0.0, 1.0), Gaussian(0.0, 2.0))
        value = emse_s_via_kl(pair, 1.0, CFG)
        assert value == pytest.approx(1.0 / 18.0, rel=0.01)

    def test_bernoulli_pair_cross_validates(self):
        pair = MismatchPair(BernoulliPointMass(0.1), BernoulliPointMass(0.2))
        direct = emse_s(pair, 0.34, CFG)
        via_kl = emse_s_via_kl(pair, 0.34, CFG)
        assert via_kl == pytest.approx(direct, rel=0.01)


class TestMmseOptimality:
    def test_true_prior_is_best_on_table_pairs(self):
        for make in (BernoulliPointMass, BernoulliGaussian):
            p = make(0.1)
            matched = MismatchPair(p, p)
            for tt in (0.11, 0.15, 0.20):
                pair = MismatchPair(p, make(tt))
                for s2 in (0.1, 0.34, 1.0):
                    assert psi(matched, s2, CFG) <= psi(pair, s2, CFG) + 1e-9
