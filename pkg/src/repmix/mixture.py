"""
Two-component normal mixture prior and its closed-form fixed-weight update.

The prior on the effect size is

    omega * N(theta_o, sigma_o^2) + (1 - omega) * N(mu, tau2)

where the first component is the original study's posterior and the second
is a vague alternative. Updating on a replication estimate gives another
two-component mixture whose components are the ordinary conjugate updates
and whose weight is reweighted by how well each component predicted the
replication.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .numerics import SPAN_SDS, normal_cdf, normal_log_density
from .studies import StudySummary

__all__ = [
    "VagueComponent",
    "TwoComponentNormalMixture",
    "UNIT_INFORMATION",
    "build_prior",
    "update_fixed",
    "log_predictive_densities",
    "marginal_likelihood_fixed",
    "empirical_bayes_weight",
    "EmpiricalBayesWeight",
    "posterior_fixed",
]

EB_TIE_TOL = 1e-12


def _check_weight(omega):
    if not (0.0 <= omega <= 1.0):
        raise ValueError(f"mixture weight must lie in [0, 1], got {omega!r}")
    return float(omega)


@dataclass(frozen=True)
class VagueComponent:
    """Mean and variance of the vague (non-informative) prior component."""

    mu: float = 0.0
    tau2: float = 2.0

    def __post_init__(self):
        if not math.isfinite(self.mu):
            raise ValueError("vague mean must be finite")
        if not (math.isfinite(self.tau2) and self.tau2 > 0):
            raise ValueError(
                f"vague variance must be positive and finite, got {self.tau2!r}"
            )


# unit-information prior for standardized mean differences
UNIT_INFORMATION = VagueComponent(0.0, 2.0)


@dataclass(frozen=True)
class TwoComponentNormalMixture:
    """``w * N(mean_informative, var_informative) + (1 - w) * N(mean_vague, var_vague)``.

    Used both for the prior and for the posterior. A weight of exactly 0 or
    1 is a degenerate mixture: the zero-weight component is kept for
    bookkeeping but never contributes to densities or probabilities.
    """

    weight_informative: float
    mean_informative: float
    var_informative: float
    mean_vague: float
    var_vague: float

    def __post_init__(self):
        _check_weight(self.weight_informative)
        for v in (self.var_informative, self.var_vague):
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"component variance must be positive and finite, got {v!r}")
        for m in (self.mean_informative, self.mean_vague):
            if not math.isfinite(m):
                raise ValueError("component means must be finite")

    @classmethod
    def single(cls, mean, var):
        return cls(1.0, mean, var, mean, var)

    def as_tuple(self):
        return (
            self.weight_informative,
            self.mean_informative,
            self.var_informative,
            self.mean_vague,
            self.var_vague,
        )

    def components(self):
        """``(weight, mean, variance)`` for each component with positive weight."""
        w = self.weight_informative
        out = []
        if w > 0:
            out.append((w, self.mean_informative, self.var_informative))
        if w < 1:
            out.append((1.0 - w, self.mean_vague, self.var_vague))
        return out

    def logpdf(self, x):
        comps = self.components()
        x = np.asarray(x, dtype=float)
        terms = [math.log(w) + normal_log_density(x, m, v) for w, m, v in comps]
        out = logsumexp(np.stack(np.broadcast_arrays(*terms)), axis=0)
        return out[()] if np.ndim(out) == 0 else out

    def pdf(self, x):
        return np.exp(self.logpdf(x))

    def cdf(self, x):
        out = sum(w * normal_cdf(x, m, v) for w, m, v in self.components())
        return out[()] if np.ndim(out) == 0 else out

    def sf(self, x):
        """Upper tail ``1 - cdf``, accurate far in the right tail."""
        out = sum(w * normal_cdf(-np.asarray(x, dtype=float), -m, v)
                  for w, m, v in self.components())
        return out[()] if np.ndim(out) == 0 else out

    def mean(self) -> float:
        return math.fsum(w * m for w, m, _ in self.components())

    def variance(self) -> float:
        mu = self.mean()
        return math.fsum(w * (v + (m - mu) ** 2) for w, m, v in self.components())

    def span(self, n_sd: float = SPAN_SDS):
        """Range covering both component means +/- ``n_sd`` of the widest component."""
        comps = self.components()
        sd = max(math.sqrt(v) for _, _, v in comps)
        means = [m for _, m, _ in comps]
        return min(means) - n_sd * sd, max(means) + n_sd * sd


def build_prior(
    original: StudySummary, vague: VagueComponent = UNIT_INFORMATION, omega: float = 0.5
) -> TwoComponentNormalMixture:
    """Mixture prior: the original study's posterior with weight ``omega``."""
    omega = _check_weight(omega)
    return TwoComponentNormalMixture(
        omega, original.estimate, original.variance, vague.mu, vague.tau2
    )


def log_predictive_densities(rep: StudySummary, prior: TwoComponentNormalMixture):
    """Log prior-predictive densities of the replication estimate.

    Returns ``(log N(x_r | m_i, v_i + se_r^2), log N(x_r | m_v, v_v + se_r^2))``
    for the informative and vague component respectively.
    """
    s2 = rep.variance
    return (
        float(normal_log_density(rep.estimate, prior.mean_informative, prior.var_informative + s2)),
        float(normal_log_density(rep.estimate, prior.mean_vague, prior.var_vague + s2)),
    )


def _conjugate(mean, var, x, s2):
    v = 1.0 / (1.0 / var + 1.0 / s2)
    return (mean / var + x / s2) * v, v


def update_fixed(prior: TwoComponentNormalMixture, rep: StudySummary) -> TwoComponentNormalMixture:
    """Posterior mixture after observing one replication estimate.

    Each component gets the usual normal-normal update. The informative
    weight becomes the posterior probability of the informative component,
    computed with log-sum-exp so that extreme conflicts do not underflow.

    Parameters
    ----------
    prior : TwoComponentNormalMixture
    rep : StudySummary
        Replication (or pooled replication) estimate and standard error.

    Returns
    -------
    TwoComponentNormalMixture
    """
    x, s2 = rep.estimate, rep.variance
    m1, v1 = _conjugate(prior.mean_informative, prior.var_informative, x, s2)
    m2, v2 = _conjugate(prior.mean_vague, prior.var_vague, x, s2)
    w = prior.weight_informative
    if w == 0.0 or w == 1.0:
        w_post = w
    else:
        lc, ld = log_predictive_densities(rep, prior)
        a = math.log(w) + lc
        b = math.log1p(-w) + ld
        w_post = math.exp(a - np.logaddexp(a, b))
        w_post = min(max(w_post, 0.0), 1.0)
    return TwoComponentNormalMixture(w_post, m1, v1, m2, v2)


def posterior_fixed(
    original: StudySummary,
    rep: StudySummary,
    vague: VagueComponent = UNIT_INFORMATION,
    omega: float = 0.5,
) -> TwoComponentNormalMixture:
    return update_fixed(build_prior(original, vague, omega), rep)


def marginal_likelihood_fixed(
    rep: StudySummary,
    original: StudySummary,
    vague: VagueComponent = UNIT_INFORMATION,
    omega: float = 0.5,
    log: bool = False,
):
    """Marginal likelihood of the replication estimate under the fixed-weight prior.

    It is linear in ``omega``:
    ``omega * N(x_r | x_o, se_r^2 + se_o^2) + (1 - omega) * N(x_r | mu, se_r^2 + tau2)``.
    """
    omega = _check_weight(omega)
    lc, ld = log_predictive_densities(rep, build_prior(original, vague, omega))
    out = _log_mix(omega, lc, ld)
    return out if log else math.exp(out)


def _log_mix(w, log_a, log_b):
    """``log(w * exp(log_a) + (1 - w) * exp(log_b))`` with exact endpoints."""
    if w == 1.0:
        return float(log_a)
    if w == 0.0:
        return float(log_b)
    return float(np.logaddexp(math.log(w) + log_a, math.log1p(-w) + log_b))


@dataclass(frozen=True)
class EmpiricalBayesWeight:
    omega_hat: float
    tie: bool
    log_predictive_consistent: float
    log_predictive_vague: float


def empirical_bayes_weight(
    rep: StudySummary, original: StudySummary, vague: VagueComponent = UNIT_INFORMATION
) -> EmpiricalBayesWeight:
    """Weight in [0, 1] maximizing the fixed-weight marginal likelihood.

    The marginal likelihood is linear in the weight, so the maximizer is 1 or
    0 depending on which component predicted the replication better. Equal
    predictive log-densities (within 1e-12) give 0.5 and ``tie=True``.
    """
    lc, ld = log_predictive_densities(rep, build_prior(original, vague, 0.5))
    if abs(lc - ld) <= EB_TIE_TOL:
        return EmpiricalBayesWeight(0.5, True, lc, ld)
    return EmpiricalBayesWeight(1.0 if lc > ld else 0.0, False, lc, ld)
