"""
Random mixture weight with a Beta(eta, nu) prior.

Integrating the weight out only requires its prior mean, so the marginal
likelihood and the effect-size posterior coincide with the fixed-weight
results at ``omega = eta / (eta + nu)``. The weight itself gets a posterior
that is a two-component Beta mixture:

    pi(w | data) = p * Beta(w | eta + 1, nu) + (1 - p) * Beta(w | eta, nu + 1)

with ``p`` proportional to ``E[w] * f_consistent``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .mixture import (
    UNIT_INFORMATION,
    TwoComponentNormalMixture,
    _log_mix,
    VagueComponent,
    build_prior,
    log_predictive_densities,
    marginal_likelihood_fixed,
    update_fixed,
)
from .numerics import beta_log_density, find_root, normal_log_density
from .studies import StudySummary

__all__ = [
    "BetaWeightPrior",
    "WeightPosterior",
    "marginal_likelihood_random",
    "joint_posterior_density",
    "weight_marginal_posterior",
    "effect_marginal_posterior",
    "weight_posterior_limit",
    "weight_density_from_bf",
    "CONSISTENCY_OVERWHELMING",
    "CONFLICT_OVERWHELMING",
]

CONSISTENCY_OVERWHELMING = "consistency_overwhelming"
CONFLICT_OVERWHELMING = "conflict_overwhelming"


@dataclass(frozen=True)
class BetaWeightPrior:
    eta: float = 1.0
    nu: float = 1.0

    def __post_init__(self):
        for name in ("eta", "nu"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"Beta shape {name} must be positive and finite, got {v!r}")

    @property
    def mean(self) -> float:
        return self.eta / (self.eta + self.nu)

    def logpdf(self, w):
        return beta_log_density(w, self.eta, self.nu)

    def pdf(self, w):
        return np.exp(self.logpdf(w))


@dataclass(frozen=True)
class WeightPosterior:
    """Marginal posterior of the mixture weight.

    Stores the Beta prior and the two prior-predictive densities of the
    replication estimate (under the original-study component and under the
    vague component); the density is an explicit formula in those.
    """

    eta: float
    nu: float
    predictive_consistent: float
    predictive_vague: float
    normalizer: float
    log_predictive_consistent: float
    log_predictive_vague: float

    @property
    def prior(self) -> BetaWeightPrior:
        return BetaWeightPrior(self.eta, self.nu)

    @property
    def prob_upper(self) -> float:
        """Weight of the Beta(eta + 1, nu) part of the posterior."""
        a = math.log(self.eta) + self.log_predictive_consistent
        b = math.log(self.nu) + self.log_predictive_vague
        return math.exp(a - np.logaddexp(a, b))

    def logpdf(self, w):
        w = np.asarray(w, dtype=float)
        lc, ld = self.log_predictive_consistent, self.log_predictive_vague
        with np.errstate(divide="ignore"):
            lin = np.logaddexp(np.log(w) + lc, np.log1p(-w) + ld)
        log_norm = _log_mix(self.prior.mean, lc, ld)
        out = self.prior.logpdf(w) + lin - log_norm
        out = np.where((w < 0) | (w > 1), -np.inf, out)
        return out[()] if out.ndim == 0 else out

    def pdf(self, w):
        return np.exp(self.logpdf(w))

    def cdf(self, w):
        p = self.prob_upper
        w = np.clip(np.asarray(w, dtype=float), 0.0, 1.0)
        out = p * special.betainc(self.eta + 1, self.nu, w) + (1 - p) * special.betainc(
            self.eta, self.nu + 1, w
        )
        return out[()] if np.ndim(out) == 0 else out

    def mean(self) -> float:
        p = self.prob_upper
        a, b = self.eta, self.nu
        return p * (a + 1) / (a + b + 1) + (1 - p) * a / (a + b + 1)

    def quantile(self, q: float) -> float:
        if not 0 < q < 1:
            raise ValueError("quantile level must lie in (0, 1)")
        return find_root(lambda w: self.cdf(w) - q, 0.0, 1.0, tol=1e-13)


def _log_terms(rep, original, vague):
    return log_predictive_densities(rep, build_prior(original, vague, 0.5))


def marginal_likelihood_random(
    rep: StudySummary,
    original: StudySummary,
    vague: VagueComponent = UNIT_INFORMATION,
    prior: BetaWeightPrior = BetaWeightPrior(),
    log: bool = False,
):
    """Marginal likelihood with the weight integrated over its Beta prior.

    Identical to :func:`repmix.mixture.marginal_likelihood_fixed` at the
    prior mean weight.
    """
    return marginal_likelihood_fixed(rep, original, vague, prior.mean, log=log)


def joint_posterior_density(theta, w, rep, original, vague=UNIT_INFORMATION,
                            prior=BetaWeightPrior()):
    """Joint posterior density of effect size and weight (broadcasts over arrays)."""
    w = np.asarray(w, dtype=float)
    if np.any((w < 0) | (w > 1)):
        raise ValueError("weight must lie in [0, 1]")
    theta = np.asarray(theta, dtype=float)
    with np.errstate(divide="ignore"):
        mix = np.logaddexp(
            np.log(w) + normal_log_density(theta, original.estimate, original.variance),
            np.log1p(-w) + normal_log_density(theta, vague.mu, vague.tau2),
        )
    log_num = (
        normal_log_density(rep.estimate, theta, rep.variance)
        + prior.logpdf(w)
        + mix
    )
    out = np.exp(log_num - marginal_likelihood_random(rep, original, vague, prior, log=True))
    return out[()] if np.ndim(out) == 0 else out


def weight_marginal_posterior(rep, original, vague=UNIT_INFORMATION,
                              prior=BetaWeightPrior()) -> WeightPosterior:
    """Marginal posterior of the weight. Linear in ``w`` under a flat prior."""
    lc, ld = _log_terms(rep, original, vague)
    return WeightPosterior(
        prior.eta,
        prior.nu,
        math.exp(lc),
        math.exp(ld),
        marginal_likelihood_random(rep, original, vague, prior),
        lc,
        ld,
    )


def effect_marginal_posterior(rep, original, vague=UNIT_INFORMATION,
                              prior=BetaWeightPrior()) -> TwoComponentNormalMixture:
    """Marginal posterior of the effect size: the fixed-weight posterior at E[w]."""
    return update_fixed(build_prior(original, vague, prior.mean), rep)


def weight_posterior_limit(prior: BetaWeightPrior, direction: str) -> BetaWeightPrior:
    """Limit of the weight posterior when the data overwhelmingly favour one side.

    ``"consistency_overwhelming"`` (BF_dc -> 0) adds one to ``eta``;
    ``"conflict_overwhelming"`` (BF_dc -> infinity) adds one to ``nu``.
    """
    if direction == CONSISTENCY_OVERWHELMING:
        return BetaWeightPrior(prior.eta + 1, prior.nu)
    if direction == CONFLICT_OVERWHELMING:
        return BetaWeightPrior(prior.eta, prior.nu + 1)
    raise ValueError(f"unknown direction {direction!r}")


def weight_density_from_bf(w, prior: BetaWeightPrior, bf_dc: float):
    """Weight posterior written through the discounting-vs-consistency Bayes factor.

    ``pi(w) * (w + (1 - w) * bf) / (E[w] * (1 - bf) + bf)``
    """
    w = np.asarray(w, dtype=float)
    e = prior.mean
    out = prior.pdf(w) * (w + (1 - w) * bf_dc) / (e * (1 - bf_dc) + bf_dc)
    return out[()] if out.ndim == 0 else out
