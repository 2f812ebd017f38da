"""The compensated-average square function: pieces, aggregate, and how it
dominates the dyadic-scale variation.

Run: python3 demos/square_demo.py
"""

import numpy as np

from bivariation import Box, Field, ball, cond_expect, lp_norm, square_function
from bivariation.variation import vq_value_batch

rng = np.random.default_rng(4)
box = Box(1, (0,), (64,), 1.0)
f1 = Field(box, rng.normal(size=64))
f2 = Field(box, rng.normal(size=64))
body = ball(1)

sp = square_function(f1, f2, body)
print(f"pieces over levels {sp.k_range}, truncation tail max {sp.tail_max:.2e}")
for k, piece in sorted(sp.pieces.items()):
    print(f"  level {k}: ||piece||_2 = {lp_norm(piece, 2.0):.4f}")
print(f"aggregate L2 norm: {lp_norm(sp.aggregate, 2.0):.4f}")
print(f"ratio to ||f1||_inf ||f2||_2: "
      f"{lp_norm(sp.aggregate, 2.0) / (lp_norm(f1, np.inf) * lp_norm(f2, 2.0)):.4f}")

ks = sorted(sp.pieces)
prods = np.stack([cond_expect(f1, k).samples * cond_expect(f2, k).samples for k in ks])
avgs = np.stack([sp.pieces[k].samples for k in ks]) + prods
q = 3.0
lv = vq_value_batch(avgs.T, q)
mart = vq_value_batch(prods.T, q)
bound = 2.0 * sp.aggregate.samples + mart
print(f"\ndyadic-scale variation <= 2*aggregate + projection variation at every cell: "
      f"{bool(np.all(lv <= bound * (1 + 1e-9) + 1e-12))}")
print(f"  worst slack: {float((bound - lv).min()):.4f}")
