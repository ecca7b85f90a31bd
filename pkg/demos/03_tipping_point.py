"""How much weight on the original study is needed before the 95% HPDI excludes zero?"""

from repmix import UNIT_INFORMATION, hpdi_trace, load_labels, tipping_point

data = load_labels()
targets = list(data.replications) + [data.pooled()]

for rep in targets:
    tp = tipping_point(data.original, rep, UNIT_INFORMATION)
    star = "none" if tp.omega_star is None else f"{tp.omega_star:.4f}"
    print(f"{rep.label:>7}: omega* = {star:>7}  ({tp.regime})")

# trace for replication 1 around its tipping point
print("\nreplication 1")
for row in hpdi_trace(data.original, data.replications[0], omegas=[0.0, 0.04, 0.05, 0.06, 0.07, 0.1, 0.2]):
    lo, hi = row.hpdi.lower, row.hpdi.upper
    print(f"  omega={row.omega:.2f}  median {row.median:.4f}  HPDI [{lo:.4f}, {hi:.4f}]"
          f"  {'includes' if row.hpdi.contains(0.0) else 'excludes'} 0")
