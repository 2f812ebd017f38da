"""The alternating indicator construction: averages oscillate between nearly
full and nearly empty along a lacunary scale sequence, so the scale variation
grows without bound while both inputs stay bounded indicator functions.

Run: python3 demos/counterexample_demo.py
"""

import numpy as np

from bivariation import counterexample_average, counterexample_variation, make_instance
from bivariation.extremal import find_growth_ratio

alpha, eps0 = find_growth_ratio(1)
print(f"growth ratio alpha = {alpha} (smallest on the 0.01 lattice), probe radius {eps0}")

n = 4
inst = make_instance(1, n, alpha, eps0)
print(f"\nannuli (alpha^(2i), alpha^(2i+1)], i = 0..{n}; partner ball radius alpha^{2*n+2}")
print(f"\n{'i':>3} {'scale':>14} {'average':>9}  threshold")
for i in range(1, 2 * n + 2):
    v = counterexample_average(inst, i, [0.0])
    thr = "> 3/4" if i % 2 == 1 else "< 1/4"
    mark = "ok" if (v > 0.75 if i % 2 == 1 else v < 0.25) else "MISS"
    print(f"{i:>3} {inst.growth_ratio**i:>14.4g} {v:>9.4f}  {thr}  {mark}")

print(f"\nvariation growth at the origin (q = 3):")
for m in range(1, 6):
    rep = counterexample_variation(make_instance(1, m, alpha, eps0), 3.0)
    print(f"  n = {m}: V_q = {rep.value:.4f} >= derived bound {rep.derived_bound:.4f}")
