"""Transition kernels: slice thresholds, shrinkage behavior, regional
acceptance ratios and reduction properties."""

import math

import numpy as np
import pytest
from scipy import stats

from rgess.distributions import Gaussian, MixtureModel, StudentT
from rgess.samplers import (
    MAX_SHRINK_ITERS,
    ChainState,
    TargetDensity,
    ess_step,
    gmrgess_step,
    mh_step,
    regional_log_ratio,
    regional_mh_step,
    t_auxiliary_params,
    tmrgess_step,
)

FIG2_COV = np.array([[10.0, 3.0], [3.0, 2.0]])


def constant_loglik(_x):
    return 0.0


class TestEssStep:
    def test_constant_likelihood_accepts_first_proposal(self):
        prior = Gaussian([0.0, 0.0], FIG2_COV)
        state = ChainState(point=np.array([1.0, 1.0]))
        rng = np.random.default_rng(0)
        for _ in range(200):
            out = ess_step(state, prior, constant_loglik, rng)
            assert out.rejections == 0
            state = out.next

    def test_constant_likelihood_reduces_to_prior(self):
        prior = Gaussian([0.0, 0.0], FIG2_COV)
        state = ChainState(point=np.array([0.0, 0.0]))
        rng = np.random.default_rng(99)
        draws = []
        for _ in range(4000):
            state = ess_step(state, prior, constant_loglik, rng).next
            draws.append(state.point)
        draws = np.stack(draws)
        for i in range(2):
            sd = math.sqrt(FIG2_COV[i, i])
            assert stats.kstest(draws[:, i], "norm", args=(0.0, sd)).pvalue > 0.001

    def test_nonfinite_loglik_at_current_point_raises(self):
        prior = Gaussian([0.0], [[1.0]])
        state = ChainState(point=np.array([0.0]))
        with pytest.raises(ValueError):
            ess_step(state, prior, lambda x: -np.inf, np.random.default_rng(0))

    def test_conjugate_gaussian_posterior(self):
        # prior N(0, S), likelihood N(x | m, I): posterior has
        # cov (S^-1 + I)^-1 and mean cov @ m
        prior = Gaussian([0.0, 0.0], FIG2_COV)
        m_lik = np.array([2.0, 2.0])

        def loglik(x):
            d = x - m_lik
            return -0.5 * float(d @ d)

        post_cov = np.linalg.inv(np.linalg.inv(FIG2_COV) + np.eye(2))
        post_mean = post_cov @ m_lik

        rng = np.random.default_rng(12)
        state = ChainState(point=np.array([0.0, 0.0]))
        draws = []
        for i in range(6000):
            state = ess_step(state, prior, loglik, rng).next
            if i >= 1000:
                draws.append(state.point)
        draws = np.stack(draws)
        mean_hat = draws.mean(axis=0)
        cov_hat = np.cov(draws, rowvar=False)
        assert np.all(np.abs(mean_hat - post_mean) <= 0.1 * np.abs(post_mean))
        assert np.all(np.abs(np.diag(cov_hat) - np.diag(post_cov)) <= 0.1 * np.diag(post_cov))

    def test_shrinkage_monotone_and_theta_in_final_bracket(self):
        prior = Gaussian([0.0, 0.0], np.eye(2))
        # likelihood concentrated away from the prior forces several shrinks
        def loglik(x):
            d = x - np.array([2.5, -1.5])
            return -8.0 * float(d @ d)

        rng = np.random.default_rng(4)
        state = ChainState(point=np.array([2.5, -1.5]))
        saw_multi_rejections = False
        for _ in range(50):
            brackets = []
            out = ess_step(state, prior, loglik, rng, trace_brackets=brackets)
            widths = [hi - lo for lo, hi, _ in brackets]
            # The initial angle sits exactly at theta_max, so the first
            # rejection cannot shrink the bracket; afterwards every rejected
            # angle is interior and the width strictly decreases.
            assert all(w <= widths[0] for w in widths[:2])
            assert all(w2 < w1 for w1, w2 in zip(widths[1:], widths[2:]))
            lo, hi, theta = brackets[-1]
            assert lo <= theta <= hi
            if out.rejections > 1:
                saw_multi_rejections = True
                assert out.angle_final == pytest.approx(brackets[-1][2])
            state = out.next
        assert saw_multi_rejections


def _gaussian_pair_mixture():
    return MixtureModel(
        [0.5, 0.5],
        [Gaussian([-3.0], [[1.5]]), Gaussian([3.0], [[0.8]])],
    )


def _t_pair_mixture():
    return MixtureModel(
        [0.4, 0.6],
        [StudentT([-3.0], [[1.5]], 5.0), StudentT([3.0], [[0.8]], 7.0)],
    )


def _bimodal_target():
    mix = MixtureModel(
        [0.6, 0.4], [Gaussian([-3.5], [[1.0]]), Gaussian([3.0], [[1.2]])]
    )
    return TargetDensity(dim=1, log_pi=mix.log_density)


class TestGmrgessStep:
    def test_target_equals_pseudo_prior_never_rejects(self):
        g = Gaussian([1.0, -1.0], FIG2_COV)
        mixture = MixtureModel([1.0], [g])
        target = TargetDensity(dim=2, log_pi=g.log_density)
        rng = np.random.default_rng(5)
        state = ChainState(point=np.array([1.0, -1.0]), region=0)
        for _ in range(300):
            out = gmrgess_step(state, mixture, target, rng)
            assert out.rejections == 0
            state = out.next

    def test_requires_gaussian_components(self):
        with pytest.raises(ValueError):
            gmrgess_step(
                ChainState(point=np.array([0.0])),
                _t_pair_mixture(),
                _bimodal_target(),
                np.random.default_rng(0),
            )

    def test_region_consistency_over_random_steps(self):
        mixture = _gaussian_pair_mixture()
        target = _bimodal_target()
        rng = np.random.default_rng(21)
        x = np.array([-3.0])
        state = ChainState(point=x, region=mixture.assign_region(x))
        for _ in range(500):
            out = gmrgess_step(state, mixture, target, rng)
            assert out.next.region == mixture.assign_region(out.next.point)
            state = out.next

    def test_deterministic_given_seed(self):
        mixture = _gaussian_pair_mixture()
        target = _bimodal_target()
        state = ChainState(point=np.array([-2.0]), region=0)
        a = gmrgess_step(state, mixture, target, np.random.default_rng(77))
        b = gmrgess_step(state, mixture, target, np.random.default_rng(77))
        np.testing.assert_array_equal(a.next.point, b.next.point)
        assert a.rejections == b.rejections
        assert a.angle_final == b.angle_final

    def test_nonfinite_target_at_current_point_raises(self):
        mixture = _gaussian_pair_mixture()
        target = TargetDensity(dim=1, log_pi=lambda _x: -np.inf)
        with pytest.raises(ValueError):
            gmrgess_step(
                ChainState(point=np.array([0.0]), region=0),
                mixture, target, np.random.default_rng(0),
            )

    def test_theta_zero_recovery_terminates_on_point_mass(self):
        # A target supported on the current point alone: the bracket shrinks
        # until the proposal underflows to the current point, which is then
        # accepted. The step must terminate well before the guard cap.
        mixture = _gaussian_pair_mixture()
        anchor = np.array([-3.0])

        def point_mass(x):
            return 0.0 if np.array_equal(x, anchor) else -np.inf

        target = TargetDensity(dim=1, log_pi=point_mass)
        state = ChainState(point=anchor, region=mixture.assign_region(anchor))
        out = gmrgess_step(state, mixture, target, np.random.default_rng(3))
        assert 0 < out.rejections < MAX_SHRINK_ITERS
        np.testing.assert_array_equal(out.next.point, anchor)
        assert out.next.region == state.region

    def test_shrinkage_cap_returns_current_point(self, monkeypatch):
        # Exhaust the guard before the bracket underflows to recovery.
        monkeypatch.setattr("rgess.samplers.MAX_SHRINK_ITERS", 10)
        mixture = _gaussian_pair_mixture()
        anchor = np.array([-3.0])

        def point_mass(x):
            return 0.0 if np.array_equal(x, anchor) else -np.inf

        target = TargetDensity(dim=1, log_pi=point_mass)
        state = ChainState(point=anchor, region=mixture.assign_region(anchor))
        out = gmrgess_step(state, mixture, target, np.random.default_rng(3))
        assert out.rejections == 10
        np.testing.assert_array_equal(out.next.point, anchor)
        assert out.next.region == state.region
        assert out.angle_final == 0.0


class TestTmrgessStep:
    def test_auxiliary_params_at_mean(self):
        comp = StudentT([1.0, 2.0], np.eye(2), 6.0)
        params = t_auxiliary_params(comp, np.array([1.0, 2.0]))
        assert params.beta == pytest.approx(3.0)  # nu/2 exactly
        assert params.alpha == pytest.approx(4.0)

    def test_auxiliary_params_unit_offset(self):
        comp = StudentT([0.0, 0.0], np.eye(2), 4.0)
        params = t_auxiliary_params(comp, np.array([1.0, 1.0]))
        assert params.alpha == pytest.approx(3.0)
        assert params.beta == pytest.approx(3.0)

    def test_target_equals_t_pseudo_prior_samples_the_t(self):
        comp = StudentT([0.5], [[1.0]], 6.0)
        mixture = MixtureModel([1.0], [comp])
        target = TargetDensity(dim=1, log_pi=comp.log_density)
        rng = np.random.default_rng(10)
        state = ChainState(point=np.array([0.5]), region=0)
        draws = []
        for _ in range(10_000):
            out = tmrgess_step(state, mixture, target, rng)
            assert out.rejections == 0
            state = out.next
            draws.append(state.point[0])
        pvalue = stats.kstest(
            np.array(draws), lambda q: stats.t.cdf(q, df=6.0, loc=0.5, scale=1.0)
        ).pvalue
        assert pvalue > 0.001

    def test_requires_t_components(self):
        with pytest.raises(ValueError):
            tmrgess_step(
                ChainState(point=np.array([0.0])),
                _gaussian_pair_mixture(),
                _bimodal_target(),
                np.random.default_rng(0),
            )

    def test_region_consistency_and_determinism(self):
        mixture = _t_pair_mixture()
        target = _bimodal_target()
        state = ChainState(point=np.array([2.5]), region=1)
        rng = np.random.default_rng(31)
        for _ in range(300):
            out = tmrgess_step(state, mixture, target, rng)
            assert out.next.region == mixture.assign_region(out.next.point)
            state = out.next
        a = tmrgess_step(state, mixture, target, np.random.default_rng(5))
        b = tmrgess_step(state, mixture, target, np.random.default_rng(5))
        np.testing.assert_array_equal(a.next.point, b.next.point)


class TestRegionalMhStep:
    def test_target_equals_single_component_always_accepts(self):
        g = Gaussian([0.0, 0.0], np.eye(2))
        mixture = MixtureModel([1.0], [g])
        target = TargetDensity(dim=2, log_pi=g.log_density)
        rng = np.random.default_rng(14)
        state = ChainState(point=np.array([0.3, -0.3]), region=0)
        for _ in range(300):
            out = regional_mh_step(state, mixture, target, rng)
            assert out.rejections == 0
            state = out.next

    def test_rejection_keeps_point_bitwise(self):
        mixture = _gaussian_pair_mixture()
        anchor = np.array([-3.0])

        def point_mass(x):
            return 0.0 if np.array_equal(x, anchor) else -np.inf

        target = TargetDensity(dim=1, log_pi=point_mass)
        state = ChainState(point=anchor, region=0)
        out = regional_mh_step(state, mixture, target, np.random.default_rng(2))
        assert out.rejections == 1
        assert out.next.point is anchor

    def test_empirical_stationary_matches_target(self):
        # small-scale version of the discretized oracle; the full-strength
        # variant lives in the acceptance suite. The pseudo-prior components
        # overlap the region boundary so cross-mode moves stay live.
        mixture = MixtureModel(
            [0.5, 0.5], [Gaussian([-2.5], [[4.0]]), Gaussian([2.5], [[6.25]])]
        )
        target_mix = MixtureModel(
            [0.6, 0.4], [Gaussian([-2.5], [[1.0]]), Gaussian([2.5], [[2.25]])]
        )
        target = TargetDensity(dim=1, log_pi=target_mix.log_density)
        rng = np.random.default_rng(8)
        x = np.array([-2.5])
        state = ChainState(point=x, region=mixture.assign_region(x))
        samples = []
        for i in range(40_000):
            state = regional_mh_step(state, mixture, target, rng).next
            if i >= 1000:
                samples.append(state.point[0])
        grid = np.linspace(-10.0, 10.0, 41)
        idx = np.clip(np.round((np.array(samples) + 10.0) / 0.5), 0, 40).astype(int)
        empirical = np.bincount(idx, minlength=41) / len(samples)
        dens = np.array([math.exp(target.log_pi(np.array([g]))) for g in grid])
        expected = dens / dens.sum()
        tv = 0.5 * np.abs(empirical - expected).sum()
        assert tv < 0.05


class TestMhStep:
    def test_uniform_box_always_accepts_inside(self):
        def box_logpdf(x):
            return 0.0 if np.all(np.abs(x) < 100.0) else -np.inf

        target = TargetDensity(dim=2, log_pi=box_logpdf)
        rng = np.random.default_rng(6)
        state = ChainState(point=np.array([0.0, 0.0]))
        for _ in range(200):
            out = mh_step(state, 0.01 * np.eye(2), target, rng)
            assert out.rejections == 0
            state = out.next

    def test_standard_normal_moments(self):
        target = TargetDensity(
            dim=1, log_pi=lambda x: -0.5 * float(x @ x)
        )
        rng = np.random.default_rng(15)
        state = ChainState(point=np.array([0.0]))
        draws = np.empty(100_000)
        for i in range(100_000):
            state = mh_step(state, np.eye(1), target, rng).next
            draws[i] = state.point[0]
        assert abs(draws.mean()) < 0.05
        assert abs(draws.var() - 1.0) < 0.05

    def test_rejection_keeps_point_bitwise(self):
        anchor = np.array([1.0, 2.0])

        def point_mass(x):
            return 0.0 if np.array_equal(x, anchor) else -np.inf

        target = TargetDensity(dim=2, log_pi=point_mass)
        state = ChainState(point=anchor)
        out = mh_step(state, np.eye(2), target, np.random.default_rng(1))
        assert out.rejections == 1
        assert out.next.point is anchor


class TestAcceptanceRatioIdentity:
    """The residual-form threshold equals the proposal-form MH ratio."""

    @pytest.mark.parametrize("kind", ["gaussian", "student_t"])
    def test_residual_and_proposal_forms_agree(self, kind):
        rng = np.random.default_rng(40)
        mixture = _gaussian_pair_mixture() if kind == "gaussian" else _t_pair_mixture()
        target = _bimodal_target()
        for _ in range(200):
            x1 = rng.uniform(-6.0, 6.0, size=1)
            x2 = rng.uniform(-6.0, 6.0, size=1)
            i = mixture.assign_region(x1)
            j = mixture.assign_region(x2)
            comp = mixture.component_log_densities
            residual_form = (
                target.log_pi(x2) - comp(x2)[i]
            ) - (target.log_pi(x1) - comp(x1)[j])
            proposal_form = regional_log_ratio(mixture, target, x1, i, x2, j)
            assert abs(residual_form - proposal_form) < 1e-10
