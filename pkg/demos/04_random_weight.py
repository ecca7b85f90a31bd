"""Put a Beta prior on the weight and learn about it from the data."""

import numpy as np

from repmix import (
    BetaWeightPrior,
    UNIT_INFORMATION,
    effect_marginal_posterior,
    load_labels,
    posterior_fixed,
    weight_marginal_posterior,
)

data = load_labels()
w = np.linspace(0, 1, 6)

for prior in (BetaWeightPrior(1, 1), BetaWeightPrior(2, 2), BetaWeightPrior(1, 3)):
    print(f"Beta({prior.eta:g}, {prior.nu:g}) prior, mean {prior.mean:.3f}")
    for rep in data.replications:
        wp = weight_marginal_posterior(rep, data.original, UNIT_INFORMATION, prior)
        print(f"  rep {rep.label}: posterior mean of w {wp.mean():.3f},"
              f" 90% interval [{wp.quantile(0.05):.3f}, {wp.quantile(0.95):.3f}],"
              f" density on grid {np.round(wp.pdf(w), 3)}")

# integrating the weight out only uses its prior mean
rep = data.replications[1]
a = effect_marginal_posterior(rep, data.original, UNIT_INFORMATION, BetaWeightPrior(2, 6))
b = posterior_fixed(data.original, rep, UNIT_INFORMATION, 0.25)
print("\nBeta(2, 6) marginal posterior:", np.round(a.as_tuple(), 6))
print("fixed omega = 0.25 posterior: ", np.round(b.as_tuple(), 6))
