"""Limiting behaviour: tiny replication standard errors and overwhelming evidence."""

import numpy as np

from repmix import (
    BetaWeightPrior,
    StudySummary,
    UNIT_INFORMATION,
    bf_dc_point,
    bf_limit_small_sigma_r,
    load_labels,
    weight_density_from_bf,
)

data = load_labels()
o = data.original

# the weight Bayes factor stays bounded as the replication gets more precise
for se in (0.05, 0.01, 1e-3, 1e-5, 1e-8):
    bf = bf_dc_point(StudySummary("r", 0.44, se), o, UNIT_INFORMATION).value
    print(f"se_r={se:<6g}  BF_dc={bf:10.3f}")
print(f"limit          {bf_limit_small_sigma_r(0.44, o, UNIT_INFORMATION):10.3f}")

# weight posterior as BF_dc goes to 0 or infinity
prior = BetaWeightPrior(2, 3)
w = np.linspace(0.1, 0.9, 5)
for bf in (1e-12, 1.0, 1e12):
    print(f"BF_dc={bf:g}: density", np.round(weight_density_from_bf(w, prior, bf), 4))
