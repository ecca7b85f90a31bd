"""Posterior of the effect size under a fixed mixture weight."""

import numpy as np

from repmix import UNIT_INFORMATION, hpdi, load_labels, posterior_fixed, posterior_quantile

data = load_labels()

for rep in data.replications:
    print(f"replication {rep.label}: estimate {rep.estimate}, se {rep.std_error}")
    for omega in (0.0, 0.25, 0.5, 0.75, 1.0):
        post = posterior_fixed(data.original, rep, UNIT_INFORMATION, omega)
        region = hpdi(post, 0.95)
        ints = " U ".join(f"[{a:.3f}, {b:.3f}]" for a, b in region.intervals)
        print(f"  omega={omega:.2f}  updated weight {post.weight_informative:.4f}  "
              f"median {posterior_quantile(post, 0.5):.4f}  95% HPDI {ints}")

# the updated weight drops fast when the replication disagrees with the original
rep3 = data.replications[2]
ws = np.linspace(0.05, 0.95, 10)
upd = [posterior_fixed(data.original, rep3, UNIT_INFORMATION, w).weight_informative for w in ws]
print("\nreplication 3, prior weight -> updated weight")
for w, u in zip(ws, upd):
    print(f"  {w:.2f} -> {u:.5f}")
