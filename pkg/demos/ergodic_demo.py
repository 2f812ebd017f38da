"""Rotation averages on the torus: the bilinear averages of two observables
along an irrational rotation equidistribute as the scale grows.

Run: python3 demos/ergodic_demo.py
"""

import numpy as np

from bivariation import TimeGrid, ball, ergodic_bilinear_avg
from bivariation.extremal import ergodic_avg_profile, sample_torus
from bivariation.variation import vq_value_batch

m = 64
beta = [np.sqrt(2.0)]
f1 = sample_torus(lambda x: np.cos(2 * np.pi * x) + 0.5 * np.cos(6 * np.pi * x), m, 1)
f2 = sample_torus(lambda x: np.sin(4 * np.pi * x), m, 1)
body = ball(1)

print("== sanity: the rotation by zero is the pointwise product ==")
v = ergodic_bilinear_avg([0.0], f1, f2, body, 2.0, [5 / m])
print(f"  at omega = 5/{m}: {v:+.6f} vs f1*f2 = {f1[5]*f2[5]:+.6f}")

print("\n== equidistribution: mean |average| over the torus shrinks in t ==")
for t in (2.0, 4.0, 8.0, 16.0, 32.0):
    prof = ergodic_avg_profile(beta, f1, f2, body, t)
    print(f"  t = {t:5.1f}: mean |A_t| = {np.mean(np.abs(prof)):.5f}")

print("\n== scale variation of the rotation averages ==")
rng = np.random.default_rng(5)
grid = TimeGrid.dyadic_spanning(0, 4, per_block=1, rng=rng)
mat = np.stack([ergodic_avg_profile(beta, f1, f2, body, t) for t in grid.times])
vq = vq_value_batch(mat.T, 3.0)
num = float(np.mean(vq))
den = float(np.sqrt(np.mean(f1**2)) * np.sqrt(np.mean(f2**2)))
print(f"  ||V_q||_L1(torus) = {num:.5f}, input norms product = {den:.5f}, "
      f"ratio {num/den:.5f}")
