"""
Bayes factors for the mixture weight and for the effect size.

Weight tests contrast discounting the original study (``H_d``) with full
consistency (``H_c: omega = 1``); effect-size tests contrast
``H_0: theta = 0`` with the mixture-prior alternative. All ratios are formed
as ``exp(log numerator - log denominator)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .mixture import (
    UNIT_INFORMATION,
    VagueComponent,
    marginal_likelihood_fixed,
)
from .numerics import normal_log_density
from .random_weight import BetaWeightPrior, marginal_likelihood_random
from .studies import StudySummary

__all__ = [
    "BayesFactorReport",
    "bf_dc_point",
    "bf_dc_beta",
    "bf_01_mixture",
    "bf_01_replication",
    "bf_limit_small_sigma_r",
    "jeffreys_category",
    "format_bf",
    "JEFFREYS_BANDS",
]

# upper band edges (inclusive) and labels
JEFFREYS_BANDS = (
    (3.2, "Barely worth mentioning"),
    (10.0, "Substantial evidence"),
    (31.6, "Strong evidence"),
    (100.0, "Very strong evidence"),
    (math.inf, "Decisive evidence"),
)


def jeffreys_category(value: float) -> str:
    """Jeffreys evidence band of a Bayes factor.

    Values below one are inverted first, so the band describes the strength
    of evidence for whichever hypothesis the factor favours.

    >>> jeffreys_category(5)
    'Substantial evidence'
    >>> jeffreys_category(1 / 150)
    'Decisive evidence'
    """
    if not value >= 0:
        raise ValueError(f"Bayes factor must be nonnegative, got {value!r}")
    if value == 0:
        return "Decisive evidence"
    x = value if value >= 1 else 1.0 / value
    for upper, label in JEFFREYS_BANDS:
        if x <= upper:
            return label
    raise AssertionError("unreachable")


def _signif(x: float, digits: int = 2) -> str:
    return f"{float(f'{x:.{digits}g}'):g}"


def format_bf(value: float) -> str:
    """Print a Bayes factor the way replication tables usually do.

    Values between 1/10 and 10 keep two significant digits, larger ones
    (or larger reciprocals) are rounded to integers, and anything below
    1/1000 is shown as ``"<1/1000"`` (and above 1000 as ``">1000"``).
    Factors below one are printed as ``"1/x"``.

    >>> format_bf(0.2104), format_bf(27.3), format_bf(4e-7)
    ('1/4.8', '27', '<1/1000')
    """
    if not value >= 0:
        raise ValueError(f"Bayes factor must be nonnegative, got {value!r}")
    if value < 1e-3:
        return "<1/1000"
    if value > 1e3:
        return ">1000"
    x = value if value >= 1 else 1.0 / value
    text = _signif(x) if x < 10 else str(int(math.floor(x + 0.5)))
    return text if value >= 1 else f"1/{text}"


@dataclass(frozen=True)
class BayesFactorReport:
    """A Bayes factor with its orientation and display strings.

    ``value`` can underflow to 0 or overflow to inf for extreme data;
    ``log_value`` is always finite.
    """

    value: float
    numerator: str
    denominator: str
    formatted: str
    jeffreys_label: Optional[str]
    log_value: float = math.nan

    @property
    def orientation(self) -> str:
        return f"{self.numerator} vs {self.denominator}"

    @property
    def favoured(self) -> str:
        return self.numerator if self.value >= 1 else self.denominator

    @classmethod
    def from_log(cls, log_value: float, numerator: str, denominator: str):
        log_value = float(log_value)
        value = math.exp(log_value) if log_value < 709.0 else math.inf
        band = jeffreys_category(value)
        favoured = numerator if log_value >= 0 else denominator
        return cls(value, numerator, denominator, format_bf(value), f"{band} for {favoured}",
                   log_value)

    def to_dict(self):
        return {
            "value": self.value if math.isfinite(self.value) else None,
            "log_value": self.log_value,
            "formatted": self.formatted,
            "orientation": self.orientation,
            "jeffreys": self.jeffreys_label,
        }


def bf_dc_point(rep: StudySummary, original: StudySummary,
                vague: VagueComponent = UNIT_INFORMATION) -> BayesFactorReport:
    """BF for ``H_d: omega = 0`` against ``H_c: omega = 1``.

    Ratio of the replication's prior-predictive density under the vague
    component to that under the original-study component.
    """
    s2 = rep.variance
    log_num = normal_log_density(rep.estimate, vague.mu, s2 + vague.tau2)
    log_den = normal_log_density(rep.estimate, original.estimate, s2 + original.variance)
    return BayesFactorReport.from_log(float(log_num - log_den), "Hd: omega=0", "Hc: omega=1")


def bf_dc_beta(rep: StudySummary, original: StudySummary,
               vague: VagueComponent = UNIT_INFORMATION,
               prior: BetaWeightPrior = BetaWeightPrior(1.0, 2.0)) -> BayesFactorReport:
    """BF for ``H_d: omega ~ Beta(eta, nu)`` against ``H_c: omega = 1``."""
    log_num = marginal_likelihood_random(rep, original, vague, prior, log=True)
    log_den = marginal_likelihood_fixed(rep, original, vague, 1.0, log=True)
    return BayesFactorReport.from_log(
        log_num - log_den, f"Hd: omega~Beta({prior.eta:g},{prior.nu:g})", "Hc: omega=1"
    )


def _log_null(rep):
    return float(normal_log_density(rep.estimate, 0.0, rep.variance))


def bf_01_mixture(rep: StudySummary, original: StudySummary,
                  vague: VagueComponent = UNIT_INFORMATION,
                  prior: BetaWeightPrior = BetaWeightPrior(1.0, 1.0)) -> BayesFactorReport:
    """BF for ``H_0: theta = 0`` against the mixture prior with a Beta weight."""
    log_den = marginal_likelihood_random(rep, original, vague, prior, log=True)
    return BayesFactorReport.from_log(
        _log_null(rep) - log_den, "H0: theta=0",
        f"H1: omega~Beta({prior.eta:g},{prior.nu:g})",
    )


def bf_01_replication(rep: StudySummary, original: StudySummary) -> BayesFactorReport:
    """Replication Bayes factor: ``H_0: theta = 0`` against the original posterior."""
    log_den = normal_log_density(rep.estimate, original.estimate, rep.variance + original.variance)
    return BayesFactorReport.from_log(_log_null(rep) - float(log_den), "H0: theta=0", "H1: omega=1")


def bf_limit_small_sigma_r(rep_estimate: float, original: StudySummary,
                           vague: VagueComponent = UNIT_INFORMATION) -> float:
    """Limit of :func:`bf_dc_point` as the replication standard error goes to 0.

    Bounded for any positive original standard error and vague variance.
    """
    log_num = normal_log_density(rep_estimate, vague.mu, vague.tau2)
    log_den = normal_log_density(rep_estimate, original.estimate, original.variance)
    return math.exp(float(log_num - log_den))
