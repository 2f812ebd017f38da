"""The bilinear square function built from compensated dyadic-scale averages."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .averages import avg_field
from .bodies import ConvexBody
from .dyadic import level_range
from .fields import Field
from .martingale import cond_expect

__all__ = ["SquarePieces", "square_piece", "square_function", "default_k_range"]


@dataclass(frozen=True)
class SquarePieces:
    k_range: tuple[int, int]
    pieces: dict[int, Field]
    aggregate: Field
    tail_max: float


def square_piece(f1: Field, f2: Field, body: ConvexBody, k: int) -> Field:
    """Average at scale 2^k minus the product of the level-k projections."""
    if f1.box != f2.box:
        raise ValueError("fields must share one box")
    t = (2.0**k) * f1.box.mesh
    a = avg_field(body, t, f1, f2, "continuum_quadrature")
    e = cond_expect(f1, k).samples * cond_expect(f2, k).samples
    return Field(f1.box, a.samples - e)


def default_k_range(f: Field) -> tuple[int, int]:
    """Finest aligned level up to one above the box-covering cube."""
    return level_range(f.box)


def square_function(
    f1: Field, f2: Field, body: ConvexBody, k_range: tuple[int, int] | None = None
) -> SquarePieces:
    """All pieces over k_range plus the l2 aggregate across scales.

    The scale just above k_range is evaluated as a truncation diagnostic
    (its max magnitude is reported, not silently dropped).
    """
    if k_range is None:
        k_range = default_k_range(f1)
    k_lo, k_hi = k_range
    if k_lo > k_hi:
        raise ValueError("empty k_range")
    pieces = {k: square_piece(f1, f2, body, k) for k in range(k_lo, k_hi + 1)}
    sq = np.zeros(f1.box.extent)
    for p in pieces.values():
        sq += p.samples * p.samples
    tail = square_piece(f1, f2, body, k_hi + 1)
    return SquarePieces(
        k_range=(k_lo, k_hi),
        pieces=pieces,
        aggregate=Field(f1.box, np.sqrt(sq)),
        tail_max=float(np.abs(tail.samples).max()),
    )
