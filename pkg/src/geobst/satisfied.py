"""Satisfiedness checking for classified point sets.

A valid point set is satisfied when every non-aligned active pair's closed
rectangle holds a qualifying third point (no delete on the bottom row, no
insert on the top row) and every update point with both neighbors present
touches one of them on its own row.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels, model
from .errors import ModelViolationError, PreconditionError
from .model import Point, PointKind, PointSet


@dataclass(frozen=True)
class Witness:
    """Names the first defect: an unsatisfied pair or a lonely update point."""

    pair: Optional[tuple[Point, Point]] = None
    update_point: Optional[Point] = None

    def __str__(self):
        if self.pair is not None:
            p, q = self.pair
            return (f"unsatisfied pair ({p.x},{p.t})-({q.x},{q.t})")
        u = self.update_point
        return f"update point ({u.x},{u.t}) touches neither neighbor"


def _point(P: PointSet, x: int, t: int) -> Point:
    p = P.point_at(x, t)
    return p if p is not None else Point(x, t, None)


def is_satisfied(P: PointSet) -> tuple[bool, Witness | None]:
    """Check both satisfiedness conditions over all active pairs.

    Returns (True, None) or (False, witness) where the witness pair is the
    lexicographically smallest violation by (p_t, p_x, q_t, q_x).  Raises
    ModelViolationError when P itself is malformed (invalid cell, or not
    exactly one input point per row).
    """
    seq = P.to_sequence()
    seq.validate()
    live0 = seq.start_live_mask().astype(np.int8)
    out = _kernels.checker_core(P.universe, P.horizon,
                                P.ts, P.xs, P.ks, live0)
    status = int(out[0])
    if status == 2:
        raise ModelViolationError(
            f"invalid point at cell ({int(out[9])}, {int(out[10])})")
    if status == 3:
        raise ModelViolationError(
            f"row {int(out[9])} does not hold exactly one input point")
    if out[1]:
        p_t, p_x, q_t, q_x = (int(out[2]), int(out[3]), int(out[4]), int(out[5]))
        return False, Witness(pair=(_point(P, p_x, p_t), _point(P, q_x, q_t)))
    if out[6]:
        return False, Witness(update_point=_point(P, int(out[8]), int(out[7])))
    return True, None


def side_witnesses(P: PointSet, p: Point, q: Point) -> tuple[Point, Point]:
    """For an active pair of a satisfied set, return one point on a side of
    the spanned rectangle incident to each endpoint.

    The witness at the lower point p is a non-delete point or the corner
    above p; the witness at the upper point q is a non-insert point or the
    corner below q.  Raises PreconditionError for aligned pairs, inactive
    pairs or unsatisfied sets.
    """
    if p.t >= q.t:
        raise PreconditionError("expected p strictly below q")
    if p.x == q.x or p.t == q.t:
        raise PreconditionError("aligned pairs span no rectangle")
    if not model.active_pair(P, p, q):
        raise PreconditionError("points are not an active pair")
    ok, _ = is_satisfied(P)
    if not ok:
        raise PreconditionError("point set is not satisfied")
    lo_x, hi_x = min(p.x, q.x), max(p.x, q.x)

    p_side = None
    q_side = None
    for r in P:
        if (r.x, r.t) in ((p.x, p.t), (q.x, q.t)):
            continue
        if not (lo_x <= r.x <= hi_x and p.t <= r.t <= q.t):
            continue
        on_p = r.t == p.t or r.x == p.x
        on_q = r.t == q.t or r.x == q.x
        if on_p and p_side is None:
            if r.kind != PointKind.DELETE or (r.x, r.t) == (p.x, q.t):
                p_side = r
        if on_q and q_side is None:
            if r.kind != PointKind.INSERT or (r.x, r.t) == (q.x, p.t):
                q_side = r
    if p_side is None or q_side is None:
        raise ModelViolationError(
            f"satisfied set lacks a side witness for ({p.x},{p.t})-({q.x},{q.t})")
    return p_side, q_side
