import numpy as np
import pytest

from emse_lab import (
    BernoulliGaussian,
    BernoulliPointMass,
    FixedPointError,
    Gaussian,
    MismatchPair,
    MseEvalConfig,
    SystemParams,
    scan_fixed_points,
    solve_se,
)

CFG = MseEvalConfig()


def quadratic_root(delta, sigma_z2):
    """Closed-form fixed point for the unit linear-Gaussian MSE curve.

    delta*(u - sigma_z2) = u/(1+u) rearranges to
    delta*u^2 + (delta - delta*sigma_z2 - 1)*u - delta*sigma_z2 = 0.
    """
    b = delta - delta * sigma_z2 - 1.0
    return (-b + np.sqrt(b**2 + 4.0 * delta**2 * sigma_z2)) / (2.0 * delta)


class TestSolveSe:
    def test_linear_gaussian_quadratic_oracle(self):
        pair = MismatchPair(Gaussian(0.0, 1.0), Gaussian(0.0, 1.0))
        params = SystemParams(delta=0.5, sigma_z2=0.1)
        fp = solve_se(pair, params, CFG)
        assert fp.sigma2 == pytest.approx(quadratic_root(0.5, 0.1), abs=1e-10)
        assert fp.stable

    def test_bernoulli_reported_noise_level(self):
        p = BernoulliPointMass(0.1)
        fp = solve_se(MismatchPair(p, p), SystemParams(0.2, 0.03), CFG)
        assert fp.sigma2 == pytest.approx(0.34, abs=0.005)

    def test_spike_slab_reported_noise_level(self):
        p = BernoulliGaussian(0.1)
        fp = solve_se(MismatchPair(p, p), SystemParams(0.2, 0.03), CFG)
        assert fp.sigma2 == pytest.approx(0.27, abs=0.005)

    def test_residual_invariant(self):
        pair = MismatchPair(BernoulliPointMass(0.1), BernoulliPointMass(0.2))
        fp = solve_se(pair, SystemParams(0.2, 0.03), CFG)
        assert fp.residual < 1e-10 * max(1.0, fp.psi_at)
        assert fp.sigma2 >= 0.03

    def test_postulated_noise_dominates_matched(self):
        for make in (BernoulliPointMass, BernoulliGaussian):
            p = make(0.1)
            params = SystemParams(0.2, 0.03)
            s_p = solve_se(MismatchPair(p, p), params, CFG).sigma2
            for tt in (0.11, 0.20):
                s_q = solve_se(MismatchPair(p, make(tt)), params, CFG).sigma2
                assert s_q >= s_p - 1e-9

    def test_huge_rate_drives_noise_to_floor(self):
        pair = MismatchPair(Gaussian(0.0, 1.0), Gaussian(0.0, 1.0))
        fp = solve_se(pair, SystemParams(delta=1e6, sigma_z2=0.1), CFG)
        assert fp.sigma2 == pytest.approx(0.1, rel=1e-5)

    def test_non_convergence_raises_with_trajectory(self):
        pair = MismatchPair(BernoulliPointMass(0.1), BernoulliPointMass(0.2))
        with pytest.raises(FixedPointError) as err:
            solve_se(pair, SystemParams(0.2, 0.03), CFG, max_iters=2)
        assert len(err.value.trajectory) >= 2

    def test_params_validation(self):
        with pytest.raises(ValueError):
            SystemParams(delta=0.0)
        with pytest.raises(ValueError):
            SystemParams(delta=0.2, sigma_z2=-0.1)


class TestScanFixedPoints:
    def test_linear_gaussian_single_stable_root(self):
        pair = MismatchPair(Gaussian(0.0, 1.0), Gaussian(0.0, 1.0))
        params = SystemParams(0.5, 0.1)
        roots = scan_fixed_points(pair, params, CFG, num=128)
        assert len(roots) == 1
        assert roots[0].sigma2 == pytest.approx(quadratic_root(0.5, 0.1), abs=1e-9)
        assert roots[0].stable

    def test_contains_iterated_solution(self):
        pair = MismatchPair(BernoulliPointMass(0.1), BernoulliPointMass(0.2))
        params = SystemParams(0.2, 0.03)
        iterated = solve_se(pair, params, CFG).sigma2
        roots = scan_fixed_points(pair, params, CFG, num=128)
        assert len(roots) == 1
        assert roots[0].sigma2 == pytest.approx(iterated, abs=1e-9)
        assert roots[0].stable

    def test_every_root_satisfies_equation(self):
        pair = MismatchPair(BernoulliGaussian(0.1), BernoulliGaussian(0.2))
        params = SystemParams(0.2, 0.03)
        for root in scan_fixed_points(pair, params, CFG, num=128):
            assert root.residual < 1e-10 * max(1.0, root.psi_at)
