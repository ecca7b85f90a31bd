"""Mixture-prior analysis of replication studies.

The original study's posterior is mixed with a vague normal prior; the
mixture weight controls how much the replication borrows from the original.
Everything is closed form: posteriors, marginal likelihoods and Bayes
factors, with HPD regions and tipping points computed by root finding.
"""

__version__ = "0.1.0"

from .bayes_factors import (  # noqa: E402
    BayesFactorReport,
    bf_01_mixture,
    bf_01_replication,
    bf_dc_beta,
    bf_dc_point,
    bf_limit_small_sigma_r,
    format_bf,
    jeffreys_category,
)
from .mixture import (  # noqa: E402
    UNIT_INFORMATION,
    TwoComponentNormalMixture,
    VagueComponent,
    build_prior,
    empirical_bayes_weight,
    marginal_likelihood_fixed,
    posterior_fixed,
    update_fixed,
)
from .numerics import NumericError  # noqa: E402
from .random_weight import (  # noqa: E402
    BetaWeightPrior,
    WeightPosterior,
    effect_marginal_posterior,
    joint_posterior_density,
    marginal_likelihood_random,
    weight_density_from_bf,
    weight_marginal_posterior,
    weight_posterior_limit,
)
from .studies import (  # noqa: E402
    DatasetError,
    ReplicationSet,
    StudySummary,
    load_labels,
    parse_dataset,
    pool,
    serialize_dataset,
)
from .summaries import (  # noqa: E402
    DensityGrid,
    HpdiSet,
    TippingPoint,
    density_grid,
    hpdi,
    hpdi_trace,
    mixture_cdf,
    mode_count,
    posterior_quantile,
    tipping_point,
)
