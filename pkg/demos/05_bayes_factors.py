"""Bayes factors for the mixture weight and for the effect size."""

from repmix import (
    BetaWeightPrior,
    UNIT_INFORMATION,
    bf_01_mixture,
    bf_01_replication,
    bf_dc_beta,
    bf_dc_point,
    load_labels,
)

data = load_labels()
rows = list(data.replications) + [data.pooled(round_digits=2)]

print("weight: discounting vs full consistency")
for rep in rows:
    a = bf_dc_point(rep, data.original, UNIT_INFORMATION)
    b = bf_dc_beta(rep, data.original, UNIT_INFORMATION, BetaWeightPrior(1, 2))
    print(f"  {rep.label:>7}  omega=0: {a.formatted:>7}   Beta(1,2): {b.formatted:>7}   {a.jeffreys_label}")

print("\neffect size: theta = 0 vs mixture alternative")
for rep in rows:
    a = bf_01_mixture(rep, data.original, UNIT_INFORMATION)
    b = bf_01_replication(rep, data.original)
    print(f"  {rep.label:>7}  Beta(1,1) weight: {a.formatted:>8}   omega=1: {b.formatted:>8}")
