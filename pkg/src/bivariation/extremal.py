"""Unboundedness construction for indicator inputs, the restricted-weak-type
interpolation geometry, and the torus-rotation transference demo.

The construction pairs a lacunary union of annuli with a large ball; averages
over the ball dilates alternate between nearly full and nearly empty as the
scale walks the powers of the growth ratio, so the scale-family variation at
the origin grows without bound in the number of annuli.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .bodies import ConvexBody
from .fields import Field
from .variation import vq_exact

__all__ = [
    "CounterexampleInstance",
    "find_growth_ratio",
    "make_instance",
    "counterexample_average",
    "counterexample_variation",
    "VariationBoundReport",
    "InterpPoint",
    "interp_weights",
    "HullError",
    "ergodic_bilinear_avg",
    "ergodic_avg_profile",
    "default_rotation_mesh",
    "sample_torus",
]

VOLUME_FRACTION_CENTER = 4.0 / 5.0
VOLUME_FRACTION_PROBE = 3.0 / 4.0
UPPER_THRESHOLD = 3.0 / 4.0
LOWER_THRESHOLD = 1.0 / 4.0


# ---------------------------------------------------------------------------
# Geometry of the ball-minus-strip volume condition

def _even_ball_volume(r: float, dim: int) -> float:
    # dim is even here (2d); V_{2k}(r) = pi^k r^(2k) / k!
    k = dim // 2
    return (np.pi**k) * r**dim / math.factorial(k)


def _strip_volume(alpha: float, x, d: int, nodes: int = 4001) -> float:
    """Volume of {|y - (x,x)| <= alpha, |y1| <= 1} in R^(2d) by slice quadrature."""
    x = np.zeros(d) if x is None else np.asarray(x, dtype=np.float64).reshape(d)
    if d == 1:
        u = np.linspace(-1.0, 1.0, nodes)
        chord = 2.0 * np.sqrt(np.maximum(alpha**2 - (u - x[0]) ** 2, 0.0))
        w = np.full(nodes, 2.0)
        w[0] = w[-1] = 1.0
        w[1:-1:2] = 4.0  # composite Simpson
        return float(np.sum(w * chord) * (u[1] - u[0]) / 3.0)
    if d == 2:
        m = 401
        g = (np.arange(m) + 0.5) / m * 2.0 - 1.0
        u1, u2 = np.meshgrid(g, g, indexing="ij")
        inside = u1**2 + u2**2 <= 1.0
        r2 = (u1 - x[0]) ** 2 + (u2 - x[1]) ** 2
        disk_area = np.pi * np.maximum(alpha**2 - r2, 0.0)
        cell = (2.0 / m) ** 2
        return float(np.sum(disk_area[inside]) * cell)
    raise ValueError("growth-ratio search supports d in {1, 2}")


def _outside_fraction(alpha: float, x, d: int) -> float:
    """Fraction of the alpha-ball around (x,x) whose first block leaves the unit ball."""
    return 1.0 - _strip_volume(alpha, x, d) / _even_ball_volume(alpha, 2 * d)


def find_growth_ratio(d: int, step: float = 0.01, cap: float = 1000.0) -> tuple[float, float]:
    """Smallest lattice ratio passing the 4/5 center condition, with a probe
    radius certified for the 3/4 condition by sampling.

    Returns ``(alpha, eps0)``.
    """
    if d not in (1, 2):
        raise ValueError("d must be 1 or 2")
    alpha = 1.0
    while True:
        alpha = round(alpha + step, 10)
        if alpha > cap:
            raise RuntimeError(f"no ratio below {cap} satisfies the volume condition")
        if _outside_fraction(alpha, None, d) > VOLUME_FRACTION_CENTER:
            break
    eps0 = alpha / 10.0
    for _ in range(40):
        if _probe_condition_holds(alpha, eps0, d):
            return alpha, eps0
        eps0 /= 2.0
    raise RuntimeError("could not certify a probe radius")


def _probe_points(eps0: float, d: int) -> np.ndarray:
    if d == 1:
        return np.linspace(-eps0, eps0, 9).reshape(-1, 1)
    ang = np.linspace(0.0, 2 * np.pi, 8, endpoint=False)
    pts = [np.zeros(2)] + [eps0 * np.array([np.cos(a), np.sin(a)]) for a in ang]
    return np.asarray(pts)


def _probe_condition_holds(alpha: float, eps0: float, d: int) -> bool:
    for r in (eps0, eps0 / 2.0):
        for x in _probe_points(r, d):
            if not _outside_fraction(alpha, x, d) > VOLUME_FRACTION_PROBE:
                return False
    return True


# ---------------------------------------------------------------------------
# The alternating construction

@dataclass(frozen=True)
class CounterexampleInstance:
    """Indicator pair: annuli radii (ratio^(2i), ratio^(2i+1)], i = 0..n, against
    the ball of radius ratio^(2n+2); probes live in the eps0-ball."""

    d: int
    growth_ratio: float
    n: int
    eps0: float

    def __post_init__(self):
        if self.growth_ratio <= 1.0:
            raise ValueError("growth ratio must exceed 1")
        if self.n < 0:
            raise ValueError("n must be nonnegative")

    @property
    def powers(self) -> np.ndarray:
        return self.growth_ratio ** np.arange(0, 2 * self.n + 3, dtype=np.float64)

    def in_annuli(self, points: np.ndarray) -> np.ndarray:
        """Membership in the union of annuli (radii in (a^(2i), a^(2i+1)])."""
        r = np.linalg.norm(np.atleast_2d(points), axis=1)
        idx = np.searchsorted(self.powers, r, side="left") - 1
        return (r > 1.0) & (idx >= 0) & (idx <= 2 * self.n) & (idx % 2 == 0)

    def in_ball(self, points: np.ndarray) -> np.ndarray:
        r = np.linalg.norm(np.atleast_2d(points), axis=1)
        return r <= self.powers[2 * self.n + 2]


def make_instance(d: int, n: int, growth_ratio: float | None = None,
                  eps0: float | None = None) -> CounterexampleInstance:
    if growth_ratio is None or eps0 is None:
        growth_ratio, eps0 = find_growth_ratio(d)
    return CounterexampleInstance(d=d, growth_ratio=growth_ratio, n=n, eps0=eps0)


_NODE_CACHE: dict[tuple[int, int], np.ndarray] = {}


def _unit_ball_nodes(dim: int, refine: int) -> np.ndarray:
    key = (dim, refine)
    if key not in _NODE_CACHE:
        g = (np.arange(refine) + 0.5) / refine * 2.0 - 1.0
        grids = np.meshgrid(*([g] * dim), indexing="ij")
        pts = np.stack([a.ravel() for a in grids], axis=-1)
        if len(_NODE_CACHE) > 8:
            _NODE_CACHE.clear()
        _NODE_CACHE[key] = pts[np.einsum("ij,ij->i", pts, pts) <= 1.0]
    return _NODE_CACHE[key]


def counterexample_average(inst: CounterexampleInstance, i: int, x,
                           refine: int | None = None, max_refine: int | None = None) -> float:
    """Average of the indicator pair over the ball dilate at scale ratio^i.

    Quadrature over the unit ball in scaled coordinates; the mesh doubles
    until the value moves by less than 0.005, so the 3/4 / 1/4 margins are
    resolved well beyond quadrature error.
    """
    if not (1 <= i <= 2 * inst.n + 2):
        raise ValueError("scale index outside the construction window")
    if refine is None:
        refine = 192 if inst.d == 1 else 24
    if max_refine is None:
        max_refine = 1536 if inst.d == 1 else 96
    t = inst.growth_ratio ** i
    x = np.asarray(x, dtype=np.float64).reshape(inst.d)
    prev = None
    r = refine
    while True:
        z = _unit_ball_nodes(2 * inst.d, r)
        y1 = x[None, :] + t * z[:, : inst.d]
        y2 = x[None, :] + t * z[:, inst.d :]
        val = float(np.mean(inst.in_annuli(y1) & inst.in_ball(y2)))
        if prev is not None and abs(val - prev) < 5e-3:
            return val
        if r >= max_refine:
            return val
        prev = val
        r *= 2


@dataclass(frozen=True)
class VariationBoundReport:
    q: float
    value: float
    derived_bound: float   # (n 2^(1-q))^(1/q), from 2n jumps of size > 1/2
    literal_bound: float   # the quoted 2^(1-q) n level, reported alongside
    averages: tuple[float, ...]


def counterexample_variation(inst: CounterexampleInstance, q: float) -> VariationBoundReport:
    """Variation of the averages at scales ratio^1 .. ratio^(2n+1) at x = 0."""
    x = np.zeros(inst.d)
    avgs = [counterexample_average(inst, i, x) for i in range(1, 2 * inst.n + 2)]
    value = vq_exact(avgs, q).value
    derived = (inst.n * 2.0 ** (1.0 - q)) ** (1.0 / q) if inst.n else 0.0
    return VariationBoundReport(
        q=q,
        value=value,
        derived_bound=derived,
        literal_bound=inst.n * 2.0 ** (1.0 - q),
        averages=tuple(avgs),
    )


# ---------------------------------------------------------------------------
# Interpolation geometry

VERTICES = ((1.0, 0.0), (0.0, 1.0), (1.0, 1.0))  # plus the two s-dependent ones


class HullError(ValueError):
    """Target exponents outside the restricted-weak-type hull; names the facet."""


@dataclass(frozen=True)
class InterpPoint:
    recip: tuple[float, float]
    weights: tuple[float, float, float, float, float]
    q_out_recip: float

    def reconstruction(self, s: float) -> tuple[float, float]:
        vs = _vertices(s)
        x = sum(w * v[0] for w, v in zip(self.weights, vs))
        y = sum(w * v[1] for w, v in zip(self.weights, vs))
        return (x, y)


def _vertices(s: float):
    return VERTICES + ((0.0, 1.0 / s), (1.0 / s, 0.0))


_Q_RECIPS = (1.0, 1.0, 2.0, None, None)  # None -> 1/s, filled per call


def interp_weights(p1: float, p2: float, s: float) -> InterpPoint:
    """Convex weights over the five endpoint types reproducing (1/p1, 1/p2).

    Tries vertex matches first, then the ten vertex triangles in lexicographic
    order, accepting the first whose barycentric coordinates are nonnegative.
    Points outside the hull raise :class:`HullError` naming the violated facet.
    """
    if not s > 2:
        raise ValueError("s must exceed 2")
    x, y = 1.0 / p1, 1.0 / p2
    for facet, ok in (
        ("1/p1 <= 1", x <= 1.0 + 1e-15),
        ("1/p2 <= 1", y <= 1.0 + 1e-15),
        ("1/p1 >= 0", x >= -1e-15),
        ("1/p2 >= 0", y >= -1e-15),
        ("1/p1 + 1/p2 >= 1/s", x + y >= 1.0 / s - 1e-15),
    ):
        if not ok:
            raise HullError(f"target ({x:.6g}, {y:.6g}) violates facet {facet}")
    verts = _vertices(s)
    qrecip = [1.0, 1.0, 2.0, 1.0 / s, 1.0 / s]
    weights = [0.0] * 5
    for k, v in enumerate(verts):
        if abs(v[0] - x) < 1e-14 and abs(v[1] - y) < 1e-14:
            weights[k] = 1.0
            return InterpPoint((x, y), tuple(weights), qrecip[k])
    for tri in itertools.combinations(range(5), 3):
        m = np.array(
            [[verts[k][0] for k in tri], [verts[k][1] for k in tri], [1.0, 1.0, 1.0]]
        )
        try:
            eta = np.linalg.solve(m, np.array([x, y, 1.0]))
        except np.linalg.LinAlgError:
            continue
        if np.all(eta >= -1e-12):
            eta = np.clip(eta, 0.0, None)
            eta /= eta.sum()
            for k, w in zip(tri, eta):
                weights[k] = float(w)
            qr = float(sum(w * qrecip[k] for k, w in zip(tri, eta)))
            return InterpPoint((x, y), tuple(weights), qr)
    raise HullError(f"no containing vertex triangle for ({x:.6g}, {y:.6g})")


# ---------------------------------------------------------------------------
# Torus rotation demo

def sample_torus(fn, m: int, d: int) -> np.ndarray:
    """Sample a function of [0,1)^d on the uniform m^d grid."""
    g = np.arange(m) / m
    grids = np.meshgrid(*([g] * d), indexing="ij")
    return np.asarray(fn(*grids), dtype=np.float64)


def _rotation_nodes(body: ConvexBody, t: float, h: float, d: int) -> np.ndarray:
    T = t / h
    R = int(np.ceil(T * body.r_out))
    axes = [np.arange(-R, R + 1, dtype=np.int64)] * (2 * d)
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 2 * d)
    keep = body.contains_dilated(grid.astype(np.float64), T)
    return grid[keep].astype(np.float64)


def default_rotation_mesh(t: float, scale: int = 32) -> float:
    """Power-of-two mesh ~ t/scale, clipped to divide 1."""
    j = int(np.floor(np.log2(max(t, 1e-12)))) - int(np.log2(scale))
    return float(2.0 ** min(j, 0))


def ergodic_avg_profile(
    beta, f1: np.ndarray, f2: np.ndarray, body: ConvexBody, t: float,
    quad_mesh: float | None = None,
) -> np.ndarray:
    """Rotation average at every torus grid node at once (d = 1).

    Because torus nodes are equally spaced, each quadrature point shifts the
    whole profile by a fixed number of grid cells, so the average is a mean of
    rolled sample products.
    """
    f1 = np.asarray(f1, dtype=np.float64).ravel()
    f2 = np.asarray(f2, dtype=np.float64).ravel()
    if f1.shape != f2.shape:
        raise ValueError("torus sample arrays must share a shape")
    m = f1.size
    h = default_rotation_mesh(t) if quad_mesh is None else float(quad_mesh)
    beta = float(np.asarray(beta, dtype=np.float64).reshape(1)[0])
    pts = _rotation_nodes(body, t, h, 1)
    if len(pts) == 0:
        raise ValueError(f"no quadrature nodes at t={t}")
    s1 = np.mod(np.rint(beta * h * pts[:, 0] * m).astype(np.int64), m)
    s2 = np.mod(np.rint(beta * h * pts[:, 1] * m).astype(np.int64), m)
    base = np.arange(m)
    acc = np.zeros(m)
    for a, b in zip(s1, s2):
        acc += f1[(base + a) % m] * f2[(base + b) % m]
    return acc / len(pts)


def ergodic_bilinear_avg(
    beta, f1: np.ndarray, f2: np.ndarray, body: ConvexBody, t: float, omega,
    quad_mesh: float | None = None,
) -> float:
    """Self-normalized average of f1(omega + beta x) f2(omega + beta y) over
    the body dilate, for the rotation action on the torus.

    ``f1, f2`` are samples on the uniform m^d torus grid (nearest-node
    evaluation); the quadrature mesh defaults to the torus mesh 1/m.
    """
    f1 = np.asarray(f1, dtype=np.float64)
    f2 = np.asarray(f2, dtype=np.float64)
    if f1.shape != f2.shape:
        raise ValueError("torus sample arrays must share a shape")
    d = f1.ndim
    if body.d != d:
        raise ValueError("body dimension does not match the torus")
    m = f1.shape[0]
    h = 1.0 / m if quad_mesh is None else float(quad_mesh)
    if h <= 0 or abs(round(1.0 / h) - 1.0 / h) > 1e-9:
        raise ValueError("quadrature mesh must divide 1")
    beta = np.asarray(beta, dtype=np.float64).reshape(d)
    omega = np.asarray(omega, dtype=np.float64).reshape(d)
    pts = _rotation_nodes(body, t, h, d)
    if len(pts) == 0:
        raise ValueError(f"no quadrature nodes at t={t}")

    def lookup(f, shifts):
        theta = np.mod(omega[None, :] + shifts, 1.0)
        idx = np.mod(np.rint(theta * m).astype(np.int64), m)
        return f[tuple(idx.T)]

    v1 = lookup(f1, beta[None, :] * (h * pts[:, :d]))
    v2 = lookup(f2, beta[None, :] * (h * pts[:, d:]))
    return float(np.mean(v1 * v2))
