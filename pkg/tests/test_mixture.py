import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from repmix.mixture import (
    TwoComponentNormalMixture,
    VagueComponent,
    build_prior,
    empirical_bayes_weight,
    log_predictive_densities,
    marginal_likelihood_fixed,
    update_fixed,
)
from repmix.numerics import integrate, normal_density
from repmix.studies import StudySummary

# frozen from tests/oracles.py (30-digit quadrature)
ORACLE_MARGINAL_REP1 = {0.0: 0.28134905129161525, 0.5: 0.8090353931546557, 1.0: 1.3367217350176961}
ORACLE_WEIGHT_POST_REP1 = 0.8261206779875498

instances = st.builds(
    lambda xo, so, xr, sr, w, mu, tau2: (
        StudySummary("o", xo, so), StudySummary("r", xr, sr), w, VagueComponent(mu, tau2)
    ),
    st.floats(-2, 2), st.floats(0.01, 1), st.floats(-2, 2), st.floats(0.01, 1),
    st.floats(0, 1), st.floats(-1, 1), st.floats(0.5, 10),
)


class TestBuildPrior:
    def test_labels(self, original, vague):
        p = build_prior(original, vague, 0.5)
        assert p.as_tuple() == pytest.approx((0.5, 0.21, 0.0025, 0.0, 2.0))

    def test_endpoints(self, original, vague):
        assert build_prior(original, vague, 1.0).components() == [(1.0, 0.21, pytest.approx(0.0025))]
        assert build_prior(original, vague, 0.0).components() == [(1.0, 0.0, 2.0)]

    def test_rejects_bad_weight(self, original, vague):
        with pytest.raises(ValueError):
            build_prior(original, vague, 1.2)

    def test_improper_vague_rejected(self):
        with pytest.raises(ValueError):
            VagueComponent(0.0, math.inf)


class TestUpdateFixed:
    def test_labels_rep1(self, original, reps, vague):
        post = update_fixed(build_prior(original, vague, 0.5), reps[0])
        assert post.weight_informative == pytest.approx(ORACLE_WEIGHT_POST_REP1, rel=1e-13)
        assert round(post.weight_informative, 4) == 0.8261
        assert post.mean_informative == pytest.approx(0.15, abs=1e-15)
        assert post.var_informative == pytest.approx(0.00125, rel=1e-14)
        assert post.mean_vague == pytest.approx(0.0898876404494382, rel=1e-14)
        assert post.var_vague == pytest.approx(0.002496878901373284, rel=1e-14)

    def test_indistinguishable_components_keep_weight(self):
        o = StudySummary("o", 0.3, 0.1)
        prior = build_prior(o, VagueComponent(0.3, 0.01), 0.37)
        post = update_fixed(prior, StudySummary("r", 0.3, 0.1))
        assert post.weight_informative == pytest.approx(0.37, rel=1e-14)

    @pytest.mark.parametrize("w", [0.0, 1.0])
    def test_endpoints_exact(self, original, reps, vague, w):
        post = update_fixed(build_prior(original, vague, w), reps[2])
        assert post.weight_informative == w
        assert len(post.components()) == 1

    def test_survives_extreme_conflict(self):
        o = StudySummary("o", 0.0, 0.01)
        r = StudySummary("r", 2.0, 0.01)  # 140 sd apart
        post = update_fixed(build_prior(o, VagueComponent(0, 2), 0.5), r)
        assert 0.0 <= post.weight_informative < 1e-300 or post.weight_informative == 0.0
        assert np.isfinite(post.logpdf(2.0))

    @given(instances)
    @settings(max_examples=60, deadline=None)
    def test_pointwise_bayes_identity(self, inst):
        o, r, w, vague = inst
        prior = build_prior(o, vague, w)
        post = update_fixed(prior, r)
        lo, hi = post.span()
        theta = np.linspace(lo, hi, 512)
        lhs = post.logpdf(theta) + marginal_likelihood_fixed(r, o, vague, w, log=True)
        rhs = np.log(normal_density(r.estimate, theta, r.variance)) + prior.logpdf(theta)
        finite = np.isfinite(rhs)
        # identity in log space: log relative error 1e-10
        assert np.all(np.abs(lhs[finite] - rhs[finite]) <= 1e-10 * (1 + np.abs(rhs[finite])))

    @given(instances)
    @settings(max_examples=30, deadline=None)
    def test_weight_is_posterior_probability(self, inst):
        o, r, w, vague = inst
        post = update_fixed(build_prior(o, vague, w), r)
        lc, _ = log_predictive_densities(r, build_prior(o, vague, w))
        ml = marginal_likelihood_fixed(r, o, vague, w, log=True)
        expected = w * math.exp(lc - ml) if w > 0 else 0.0
        assert post.weight_informative == pytest.approx(expected, abs=1e-12)

    @given(instances)
    @settings(max_examples=30, deadline=None)
    def test_posterior_mean_between_components(self, inst):
        o, r, w, vague = inst
        post = update_fixed(build_prior(o, vague, w), r)
        m1, m2 = post.mean_informative, post.mean_vague
        if w == 0:
            assert post.mean() == m2
        elif w == 1:
            assert post.mean() == m1
        else:
            assert min(m1, m2) - 1e-12 <= post.mean() <= max(m1, m2) + 1e-12

    def test_normalizes(self, original, reps, vague):
        for r in reps:
            post = update_fixed(build_prior(original, vague, 0.5), r)
            lo, hi = post.span()
            total = integrate(post.pdf, lo, hi, points=[post.mean_informative, post.mean_vague])
            assert total == pytest.approx(1.0, abs=1e-8)


class TestMarginalLikelihood:
    @pytest.mark.parametrize("w", [0.0, 0.5, 1.0])
    def test_labels_rep1(self, original, reps, vague, w):
        assert marginal_likelihood_fixed(reps[0], original, vague, w) == pytest.approx(
            ORACLE_MARGINAL_REP1[w], rel=1e-13
        )

    def test_quadrature_oracle(self, original, reps, vague):
        for r in reps:
            for w in (0.2, 0.7):
                q = oracles.quad_marginal_fixed(original.estimate, original.std_error, r.estimate,
                                                r.std_error, w, 0.0, 2.0)
                assert marginal_likelihood_fixed(r, original, vague, w) == pytest.approx(q, rel=1e-10)

    def test_linear_in_weight(self, original, reps, vague):
        r = reps[1]
        f0 = marginal_likelihood_fixed(r, original, vague, 0.0)
        f1 = marginal_likelihood_fixed(r, original, vague, 1.0)
        for w in np.linspace(0, 1, 11):
            assert marginal_likelihood_fixed(r, original, vague, w) == pytest.approx(
                (1 - w) * f0 + w * f1, rel=1e-14
            )


class TestEmpiricalBayes:
    def test_rep2_borrows(self, original, reps, vague):
        eb = empirical_bayes_weight(reps[1], original, vague)
        assert (eb.omega_hat, eb.tie) == (1.0, False)
        assert math.exp(eb.log_predictive_consistent) == pytest.approx(5.1079324855913956, rel=1e-13)
        assert math.exp(eb.log_predictive_vague) == pytest.approx(0.27875653706956445, rel=1e-13)

    def test_rep3_discounts(self, original, reps, vague):
        eb = empirical_bayes_weight(reps[2], original, vague)
        assert (eb.omega_hat, eb.tie) == (0.0, False)
        assert math.exp(eb.log_predictive_consistent) == pytest.approx(0.009835333750263098, rel=1e-12)

    @pytest.mark.parametrize("idx", [0, 1, 2])
    def test_grid_oracle(self, original, reps, vague, idx):
        grid = np.linspace(0, 1, 101)
        vals = [marginal_likelihood_fixed(reps[idx], original, vague, w) for w in grid]
        assert empirical_bayes_weight(reps[idx], original, vague).omega_hat == grid[int(np.argmax(vals))]

    def test_tie(self):
        o = StudySummary("o", 0.3, 0.1)
        eb = empirical_bayes_weight(StudySummary("r", 0.1, 0.2), o, VagueComponent(0.3, 0.01))
        assert (eb.omega_hat, eb.tie) == (0.5, True)


class TestMixtureObject:
    def test_cdf_limits(self):
        m = TwoComponentNormalMixture(0.3, -1, 0.5, 2, 0.1)
        assert m.cdf(1e6) == 1.0 and m.cdf(-1e6) == 0.0

    def test_variance(self):
        m = TwoComponentNormalMixture(0.5, -1, 1, 1, 1)
        assert m.variance() == pytest.approx(2.0)
