"""Stopping-time decomposition with certified constants.

Run: python3 demos/cz_demo.py
"""

import numpy as np

from bivariation import Box, Field, cz_certify, cz_decompose
from bivariation.cz import format_cz_report

rng = np.random.default_rng(3)
box = Box(1, (0,), (64,), 1.0)
f = Field(box, rng.normal(size=64) * rng.choice([0.2, 1.0, 5.0], size=64))

for p_i, alpha in [(1.0, 0.8), (2.0, 1.2)]:
    out = cz_decompose(f, p_i, alpha, 1.0)
    cert = cz_certify(out, f)
    print(f"== p_i = {p_i}, alpha = {alpha} ==")
    print(format_cz_report(out, cert))
