"""Averaging operators over convex bodies: evaluation modes, sweeps, and the
sliced fast path.

Run: python3 demos/averages_demo.py
"""

import numpy as np

from bivariation import (
    AvgRequest,
    Box,
    Field,
    TimeGrid,
    avg_at,
    avg_sweep,
    ball,
    cube,
    dtt_avg,
    dtt_avg_via_body,
    enumerate_lattice,
    fast_slice_avg,
    gamma_body,
    shell,
)

box = Box(1, (-16,), (33,), 1.0)
rng = np.random.default_rng(0)
f1 = Field(box, rng.normal(size=33))
f2 = Field(box, rng.normal(size=33))
body = ball(1)

print("== lattice geometry ==")
for t in (0.5, 1.0, 2.0, np.sqrt(8.0)):
    print(f"  ball dilate t={t:.3f}: {enumerate_lattice(body, t).count} integer points")
print(f"  shell (1, sqrt(2)]: {shell(body, 1.0, np.sqrt(2.0)).as_set()}")
print(f"  cube inner radius after normalization: {cube(1).r_in:.6f}")

print("\n== one average, two modes ==")
req_c = AvgRequest(body, 3.0, f1, f2, "continuum_quadrature")
req_l = AvgRequest(body, 3.0, f1, f2, "lattice_counting")
print(f"  quadrature mode at x=0: {avg_at(req_c, [0]):+.6f}")
print(f"  counting mode at x=0:   {avg_at(req_l, [0]):+.6f}")
print(f"  sliced fast path (exact on integer data): {fast_slice_avg(req_l, 0):+.6f}")

print("\n== sweep across scales (bit-identical to pointwise evaluation) ==")
grid = TimeGrid.dyadic_spanning(-1, 3, per_block=1, rng=rng)
values = avg_sweep(body, grid, f1, f2, [0])
for t, v in zip(grid.times, values):
    anchor = "  <- dyadic" if np.log2(t).is_integer() else ""
    print(f"  t = {t:7.4f}: {v:+.6f}{anchor}")

print("\n== linear change of variables ==")
lam = np.array([[1.0, 0.4], [-0.3, 0.9]])
gb = gamma_body(1, np.linalg.inv(lam))
W = 24.0
for grid_n in (48, 96, 192):
    h = W / grid_n
    bx = Box(1, (-grid_n,), (2 * grid_n,), h)
    xs = np.arange(-grid_n, grid_n) * h
    g1 = Field(bx, np.sin(2 * np.pi * xs / W) + 0.5 * np.cos(6 * np.pi * xs / W))
    g2 = Field(bx, np.cos(2 * np.pi * xs / W + 0.7))
    a = dtt_avg(lam, 3.0, g1, g2, [1])
    b = dtt_avg_via_body(lam, 3.0, g1, g2, [1])
    print(f"  mesh {h:5.3f}: direct {a:+.6f}, via body {b:+.6f}, gap {abs(a-b):.2e}")
print("  (the two routes agree in the continuum; the gap shrinks about linearly)")
