"""Dyadic conditional expectations, martingale differences, neighbor-maximal
functions, and the Carleson-type quantities built from them.

Levels are mesh-relative: level ``j`` cubes have side ``2**j`` cells, so the
physical side is ``2**j * mesh``.  ``cond_expect(f, j)`` averages the
zero-extended field over the full cube volume, which makes ``E_j`` a true
projection whenever level-``j`` cubes tile the box.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .averages import avg_field
from .bodies import ConvexBody
from .dyadic import cell_cube_ids, level_range, single_cube_covers_box
from .fields import Field, bmo_dyadic_norm, lp_norm
from .variation import InequalityReport, vq_exact

__all__ = [
    "MeasurabilityError",
    "cond_expect",
    "mart_diff",
    "is_measurable",
    "star_maximal",
    "bilinear_maximal",
    "domination_check",
    "DominationReport",
    "paraproduct_telescope",
    "TelescopeReport",
    "carleson_tent_mass",
    "carleson_tent_ratio",
    "carleson_weighted_sum",
    "martingale_product_variation_check",
    "RatioCheck",
    "young_convolution_check",
    "measurable_field",
]


class MeasurabilityError(ValueError):
    """A field that must be constant on dyadic cubes is not; carries the cube."""

    def __init__(self, level: int, cube_coords, spread: float):
        self.level = level
        self.cube_coords = tuple(int(c) for c in cube_coords)
        self.spread = spread
        super().__init__(
            f"field is not constant on level-{level} cube at {self.cube_coords} "
            f"(value spread {spread:g})"
        )


def cond_expect(f: Field, j: int) -> Field:
    """Projection onto functions constant on level-j cubes.

    Below the box-covering level each cube average divides by the full cube
    volume (zero extension).  Once a single level-j cube contains the box the
    projection acts as the global box mean, so constants stay fixed and box
    mass is preserved at every level; martingale differences vanish there.
    """
    if j < 0:
        raise ValueError(f"level {j} is below the cell level (misaligned)")
    if j == 0:
        return f
    if single_cube_covers_box(f.box, j):
        return Field(f.box, np.full(f.box.extent, float(np.mean(f.samples))))
    ids, _, ncubes = cell_cube_ids(f.box, j)
    sums = np.bincount(ids, weights=f.samples.ravel(), minlength=ncubes)
    means = sums / float(1 << (j * f.box.dim))
    return Field(f.box, means[ids])


def mart_diff(f: Field, j: int) -> Field:
    """Difference of consecutive projections, mean zero on every level-j cube."""
    if j < 1:
        raise ValueError("martingale differences are defined for levels j >= 1")
    return Field(f.box, cond_expect(f, j - 1).samples - cond_expect(f, j).samples)


def _cube_value_grid(f: Field, level: int):
    """Dense per-cube value grid; raises MeasurabilityError on any non-constant cube."""
    box = f.box
    qlo = [box.origin[a] >> level for a in range(box.dim)]
    qhi = [(box.origin[a] + box.extent[a] - 1) >> level for a in range(box.dim)]
    shape = tuple(h - l + 1 for l, h in zip(qlo, qhi))
    ids, table, ncubes = cell_cube_ids(box, level)
    flat = f.samples.ravel()
    vmax = np.full(ncubes, -np.inf)
    vmin = np.full(ncubes, np.inf)
    np.maximum.at(vmax, ids, flat)
    np.minimum.at(vmin, ids, flat)
    spread = vmax - vmin
    bad = np.nonzero(spread > 0.0)[0]
    if bad.size:
        c = bad[0]
        raise MeasurabilityError(level, table[c], float(spread[c]))
    grid = np.zeros(shape)
    idx = tuple(table[:, a] - qlo[a] for a in range(box.dim))
    grid[idx] = vmax
    return grid, qlo


def is_measurable(f: Field, level: int) -> bool:
    try:
        _cube_value_grid(f, level)
        return True
    except MeasurabilityError:
        return False


def measurable_field(box, level: int, cube_values: np.ndarray) -> Field:
    """Build a level-measurable field from per-cube values (row-major cube order)."""
    ids, _, ncubes = cell_cube_ids(box, level)
    vals = np.asarray(cube_values, dtype=np.float64).ravel()
    if vals.size != ncubes:
        raise ValueError(f"expected {ncubes} cube values, got {vals.size}")
    return Field(box, vals[ids])


def star_maximal(h: Field, n: int) -> Field:
    """Neighbor maximum of |h| over the level-(n-1) cube containing x and the
    cubes in its 3Q neighborhood; cubes beyond the box count as zeros."""
    level = n - 1
    if level < 0:
        raise ValueError("need n >= 1")
    grid, qlo = _cube_value_grid(h, level)
    a = np.abs(grid)
    padded = np.pad(a, 1, mode="constant")
    out = np.zeros_like(a)
    d = h.box.dim
    for shift in np.ndindex(*([3] * d)):
        sl = tuple(slice(s, s + a.shape[ax]) for ax, s in enumerate(shift))
        np.maximum(out, padded[sl], out=out)
    ids, table, _ = cell_cube_ids(h.box, level)
    idx = tuple(table[:, ax] - qlo[ax] for ax in range(d))
    return Field(h.box, out[idx][ids])


def bilinear_maximal(h1: Field, h2: Field, n: int) -> Field:
    """max{ (h1* |h2|)*, (|h1| h2*)* } for level-(n-1)-measurable inputs."""
    if h1.box != h2.box:
        raise ValueError("h1 and h2 must share one box")
    a = Field(h1.box, star_maximal(h1, n).samples * np.abs(h2.samples))
    b = Field(h1.box, np.abs(h1.samples) * star_maximal(h2, n).samples)
    return Field(h1.box, np.maximum(star_maximal(a, n).samples, star_maximal(b, n).samples))


@dataclass(frozen=True)
class DominationReport:
    max_average: float
    max_excess: float
    holds: bool


def domination_check(body: ConvexBody, h1: Field, h2: Field, n: int, k: int) -> DominationReport:
    """Pointwise |average at scale 2^k| <= neighbor-maximal bound, at every cell.

    Requires k < n (the scale may not exceed the measurability side).  The
    geometric argument behind the bound needs the dilate's diameter to stay
    within one cube side, so for k = n-1 sparse adversarial inputs can beat
    the bound; see the edge-case tests.
    """
    if k >= n:
        raise ValueError(f"hypothesis violated: need k < n, got k={k}, n={n}")
    t = (2.0**k) * h1.box.mesh
    avg = avg_field(body, t, h1, h2, "continuum_quadrature")
    bound = bilinear_maximal(h1, h2, n)
    excess = np.abs(avg.samples) - bound.samples
    max_excess = float(excess.max())
    tol = 1e-12 * max(1.0, float(bound.samples.max(initial=0.0)))
    return DominationReport(float(np.abs(avg.samples).max()), max_excess, max_excess <= tol)


# ---------------------------------------------------------------------------
# Paraproduct telescoping

def _piece(f1: Field, f2: Field, body: ConvexBody, k: int) -> np.ndarray:
    t = (2.0**k) * f1.box.mesh
    a = avg_field(body, t, f1, f2, "continuum_quadrature")
    e = cond_expect(f1, k).samples * cond_expect(f2, k).samples
    return a.samples - e


@dataclass(frozen=True)
class TelescopeReport:
    residual_max: float
    fine_boundary_max: float
    coarse_boundary_max: float
    holds: bool


def paraproduct_telescope(
    f1: Field, f2: Field, body: ConvexBody, k: int, l: int, j: int, tol: float = 1e-10
) -> TelescopeReport:
    """Finite telescoping of the scale-k compensated average across levels l..j.

    Verifies, at every cell,
    ``piece(E_(l-1)f1, E_(l-1)f2) - piece(E_j f1, E_j f2)
      = sum_(n=l..j) [piece(d_(1,n), E_(n-1)f2) + piece(E_n f1, d_(2,n))]``
    and reports the two boundary magnitudes (the coarse one decays as j grows;
    the fine one stabilizes once l reaches the cell level).
    """
    if l > j:
        raise ValueError("need l <= j")
    if l < 1:
        raise ValueError("need l >= 1 so that E_(l-1) is defined")
    e1 = {m: cond_expect(f1, m) for m in range(l - 1, j + 1)}
    e2 = {m: cond_expect(f2, m) for m in range(l - 1, j + 1)}
    fine = _piece(e1[l - 1], e2[l - 1], body, k)
    coarse = _piece(e1[j], e2[j], body, k)
    lhs = fine - coarse
    rhs = np.zeros_like(lhs)
    for m in range(l, j + 1):
        d1 = Field(f1.box, e1[m - 1].samples - e1[m].samples)
        d2 = Field(f2.box, e2[m - 1].samples - e2[m].samples)
        rhs += _piece(d1, e2[m - 1], body, k)
        rhs += _piece(e1[m], d2, body, k)
    residual = float(np.abs(lhs - rhs).max())
    return TelescopeReport(
        residual_max=residual,
        fine_boundary_max=float(np.abs(fine).max()),
        coarse_boundary_max=float(np.abs(coarse).max()),
        holds=residual < tol,
    )


# ---------------------------------------------------------------------------
# Carleson quantities

def carleson_tent_mass(b: Field, cube, n: int) -> float:
    """Tent mass: sum over scales 2^k <= side(Q) of the Q-integral of the
    squared shifted martingale differences |E_(k+1-n)b - E_(k-n)b|^2."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    j_q = cube.level
    box = b.box
    sl = []
    for o, e, c in zip(box.origin, box.extent, cube.coords):
        a0 = max(c << j_q, o)
        b0 = min((c + 1) << j_q, o + e)
        if a0 >= b0:
            return 0.0
        sl.append(slice(a0 - o, b0 - o))
    total = 0.0
    for k in range(n, j_q + 1):
        diff = mart_diff(b, k + 1 - n).samples[tuple(sl)]
        total += float(np.sum(diff * diff))
    return total * box.cell_volume


def carleson_tent_ratio(b: Field, n: int) -> float:
    """sup over dyadic cubes meeting the box of tent mass / (|Q| * bmo(b)^2)."""
    bmo = bmo_dyadic_norm(b)
    if bmo == 0.0:
        return 0.0
    box = b.box
    _, top = level_range(box)
    best = 0.0
    diffs = {}
    for j in range(1, top + 1):
        ids, _, ncubes = cell_cube_ids(box, j)
        mu = np.zeros(ncubes)
        for k in range(n, j + 1):
            lev = k + 1 - n
            if lev not in diffs:
                d = mart_diff(b, lev).samples.ravel()
                diffs[lev] = d * d
            mu += np.bincount(ids, weights=diffs[lev], minlength=ncubes)
        mu *= box.cell_volume
        vol_q = (float(1 << j) * box.mesh) ** box.dim
        best = max(best, float(mu.max()) / (vol_q * bmo * bmo))
    return best


def _zeta_kernel(box, level: int, eps: float, pad: int):
    """Quadrature matrix of the level-scaled decay kernel (1+|x|)^(-d-eps).

    Rows are padded output lattice points, columns the in-box cells; entries
    below 1e-12 of the on-diagonal peak are dropped.
    """
    d = box.dim
    s = (2.0**level) * box.mesh
    axes_in = box.lattice_axes()
    axes_out = [np.arange(o - pad, o + e + pad, dtype=np.int64) for o, e in zip(box.origin, box.extent)]
    grids_in = np.meshgrid(*axes_in, indexing="ij")
    grids_out = np.meshgrid(*axes_out, indexing="ij")
    pin = np.stack([g.ravel() for g in grids_in], axis=-1).astype(np.float64) * box.mesh
    pout = np.stack([g.ravel() for g in grids_out], axis=-1).astype(np.float64) * box.mesh
    dist = np.linalg.norm(pout[:, None, :] - pin[None, :, :], axis=-1)
    kern = (1.0 + dist / s) ** (-(d + eps)) * (s**-d) * box.cell_volume
    kern[kern < 1e-12 * (s**-d) * box.cell_volume] = 0.0
    return kern


def carleson_weighted_sum(
    f: Field, b: Field, l: float, eps: float, n: int, pad_factor: float = 1.0
) -> float:
    """Level sum of integrals of (zeta_k * |f|^l)^(2/l) (zeta_k * |diff_k|^l)^(2/l).

    The spatial integral runs over the box padded by ``pad_factor`` box-widths
    per side; the integrand decays like |x|^(-2(d+eps)/l), so the omitted tail
    is small at desk scale.
    """
    if not (1.0 < l < 2.0):
        raise ValueError(f"l must lie in (1, 2), got {l}")
    if not eps > 0:
        raise ValueError("eps must be positive")
    if f.box != b.box:
        raise ValueError("f and b must share one box")
    box = f.box
    _, top = level_range(box)
    pad = max(1, int(round(pad_factor * max(box.extent))))
    fl = np.abs(f.samples.ravel()) ** l
    total = 0.0
    for k in range(n, top + n + 1):
        kern = _zeta_kernel(box, k, eps, pad)
        dl = np.abs(mart_diff(b, k + 1 - n).samples.ravel()) ** l
        cf = (kern @ fl) ** (2.0 / l)
        cd = (kern @ dl) ** (2.0 / l)
        total += float(np.sum(cf * cd)) * box.cell_volume
    return total


# ---------------------------------------------------------------------------
# Sequence-level checks

@dataclass(frozen=True)
class RatioCheck:
    lhs: float
    rhs: float
    ratio: float


def martingale_product_variation_check(f1: Field, f2: Field, q: float) -> RatioCheck:
    """L2 norm of the levelwise variation of E_j f1 * E_j f2 against
    min(||f1||_2 ||f2||_inf, ||f1||_inf ||f2||_2)."""
    if f1.box != f2.box:
        raise ValueError("fields must share one box")
    _, top = level_range(f1.box)
    prods = [cond_expect(f1, j).samples * cond_expect(f2, j).samples for j in range(0, top + 2)]
    stack = np.stack([p.ravel() for p in prods], axis=1)
    vq = np.array([vq_exact(row, q).value for row in stack])
    lhs = lp_norm(Field(f1.box, vq.reshape(f1.box.extent)), 2.0)
    rhs = min(
        lp_norm(f1, 2.0) * lp_norm(f2, np.inf),
        lp_norm(f1, np.inf) * lp_norm(f2, 2.0),
    )
    ratio = 0.0 if lhs == 0.0 else (np.inf if rhs == 0.0 else lhs / rhs)
    return RatioCheck(lhs, rhs, ratio)


def young_convolution_check(a, sigma) -> InequalityReport:
    """||sigma * a||_2 <= ||sigma||_1 ||a||_2 for finite nonnegative sequences."""
    a = np.asarray(a, dtype=np.float64).ravel()
    sigma = np.asarray(sigma, dtype=np.float64).ravel()
    if np.any(a < 0) or np.any(sigma < 0):
        raise ValueError("sequences must be nonnegative")
    if a.size == 0 or sigma.size == 0:
        return InequalityReport(0.0, 0.0, True)
    lhs = float(np.linalg.norm(np.convolve(sigma, a)))
    rhs = float(np.sum(sigma) * np.linalg.norm(a))
    return InequalityReport(lhs, rhs, lhs <= rhs * (1.0 + 1e-12))
