import math

import numpy as np
import pytest
from scipy.special import betainc, betaincinv

from riskbounds import (
    BallSpec,
    CVaR,
    Distance,
    ERM,
    FeasibleSampler,
    SupportBounds,
    distance,
    evaluate,
    from_samples,
    pos_sup,
    quadrature_risk,
    random_feasible,
)
from riskbounds.bandit import BetaArm, DiracArm, DiscreteArm, TruncNormalArm, UniformArm
from riskbounds.measures import ce_power, drm_power, rdeu_power, srm_power
from riskbounds.oracles import refining_integral
from conftest import random_interior_dist

B01 = SupportBounds(0.0, 1.0)
B05 = SupportBounds(0.0, 5.0)


class TestQuadrature:
    def test_uniform_cvar_analytic(self):
        for alpha in (0.05, 0.25, 0.6):
            got = quadrature_risk(UniformArm(0, 1), CVaR(alpha), B01)
            assert got == pytest.approx(1 - alpha / 2, abs=1e-9)

    def test_uniform_erm_analytic(self):
        got = quadrature_risk(UniformArm(0, 1), ERM(1.0), B01)
        assert got == pytest.approx(math.log(math.e - 1.0), abs=1e-9)

    def test_dirac_exact(self):
        assert quadrature_risk(DiracArm(0.7), CVaR(0.05), B01) == pytest.approx(0.7, abs=1e-14)

    def test_beta_cvar_closed_form(self):
        # independent route: CVaR of Beta(A,B) = (A/(A+B)) (1 - I_q(A+1, B)) / alpha
        a_shape, b_shape, alpha = 2.0, 5.0, 0.05
        q = betaincinv(a_shape, b_shape, 1 - alpha)
        closed = (a_shape / (a_shape + b_shape)) * (1 - betainc(a_shape + 1, b_shape, q)) / alpha
        got = quadrature_risk(BetaArm(a_shape, b_shape), CVaR(alpha), B01)
        assert got == pytest.approx(closed, abs=1e-9)

    def test_scaled_beta_support(self):
        plain = quadrature_risk(BetaArm(2, 5), CVaR(0.1), B01)
        scaled = quadrature_risk(BetaArm(2, 5), CVaR(0.1), B05)
        assert scaled == pytest.approx(5 * plain, rel=1e-9)

    def test_truncnormal_montecarlo_sanity(self):
        arm = TruncNormalArm(0.4, 0.15)
        got = quadrature_risk(arm, CVaR(0.25), B01)
        rng = np.random.default_rng(0)
        draws = arm.sample(rng, 400_000, B01)
        tail = np.quantile(draws, 0.75)
        mc = draws[draws >= tail].mean()
        assert got == pytest.approx(mc, abs=5e-3)

    def test_discrete_arm_matches_exact_evaluation(self):
        rng = np.random.default_rng(1)
        specs = [CVaR(0.2), ERM(1.5), srm_power(2.0), drm_power(0.7), ce_power(2.0), rdeu_power(2.0, 2.0)]
        for _ in range(10):
            d = random_interior_dist(rng, B01)
            arm = DiscreteArm(d)
            for spec in specs:
                assert quadrature_risk(arm, spec, B01) == pytest.approx(
                    evaluate(spec, d), abs=1e-9
                )

    def test_all_families_on_continuous_arm(self):
        arm = BetaArm(2, 2)
        for spec in (CVaR(0.3), ERM(2.0), srm_power(2.0), drm_power(0.5), ce_power(2.0), rdeu_power(2.0, 2.0)):
            val = quadrature_risk(arm, spec, B01)
            assert 0.0 <= val <= 1.0

    def test_refining_integral_polynomial(self):
        got = refining_integral(lambda x: x**3, 0.0, 2.0)
        assert got == pytest.approx(4.0, abs=1e-12)

    def test_refining_integral_rejects_nonfinite(self):
        def inverse(x):
            with np.errstate(divide="ignore"):
                return 1.0 / np.asarray(x)

        with pytest.raises(RuntimeError, match="finite"):
            refining_integral(inverse, 0.0, 1.0)


class TestFeasibleSampler:
    def test_zero_radius_returns_center(self):
        center = from_samples([1, 2, 3, 4], B05)
        sampler = FeasibleSampler(center, BallSpec(Distance.SUPREMUM, 0.0), rng_seed=0)
        cands = random_feasible(sampler, 5)
        assert len(cands) == 5 and all(c == center for c in cands)

    @pytest.mark.parametrize("kind,c", [(Distance.SUPREMUM, 0.25), (Distance.WASSERSTEIN1, 0.4)])
    def test_all_candidates_feasible(self, kind, c):
        center = from_samples([1, 2, 3, 4], B05)
        sampler = FeasibleSampler(center, BallSpec(kind, c), rng_seed=1)
        for cand in random_feasible(sampler, 200):
            assert distance(center, cand, kind) <= c

    def test_feasible_on_random_centers(self):
        rng = np.random.default_rng(2)
        for trial in range(10):
            center = random_interior_dist(rng, B01)
            for kind, c in ((Distance.SUPREMUM, rng.uniform(0.01, 0.6)), (Distance.WASSERSTEIN1, rng.uniform(0.01, 0.4))):
                sampler = FeasibleSampler(center, BallSpec(kind, c), rng_seed=trial)
                for cand in random_feasible(sampler, 30):
                    assert distance(center, cand, kind) <= c

    def test_candidates_never_beat_the_ball_extreme(self):
        # the optimality probe itself, at unit scale
        center = from_samples([1, 2, 3, 4], B05)
        c = 0.25
        sampler = FeasibleSampler(center, BallSpec(Distance.SUPREMUM, c), rng_seed=3)
        spec = CVaR(0.3)
        best = evaluate(spec, pos_sup(center, c))
        cands = random_feasible(sampler, 10_000)
        vals = np.array([evaluate(spec, cand) for cand in cands])
        assert np.all(vals <= best + 1e-9)
