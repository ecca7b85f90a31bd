"""Pool three replications and look at the mixture prior they are compared against."""

import numpy as np

from repmix import UNIT_INFORMATION, build_prior, load_labels, pool

data = load_labels()
print("original:", data.original)
for rep in data.replications:
    print("replication:", rep)

# fixed-effect pooling, inverse-variance weights
pooled = pool(data.replications)
print(f"\npooled estimate {pooled.estimate:.4f}, standard error {pooled.std_error:.4f}")
print(f"rounded for display: ({pooled.estimate:.2f}, {pooled.std_error:.2f})")

# the prior puts weight omega on the original study and 1 - omega on a vague N(0, 2)
theta = np.linspace(-0.5, 1.0, 7)
for omega in (0.0, 0.5, 1.0):
    prior = build_prior(data.original, UNIT_INFORMATION, omega)
    print(f"omega={omega:.1f} prior density:", np.round(prior.pdf(theta), 3))
