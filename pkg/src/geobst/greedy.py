"""Online greedy touching for update sequences in the grid view.

At each timestep the algorithm commits one row: the input point's stair, and
for an insert or delete strictly between two live keys also the stair of one
row-neighbor (whichever union is smaller, predecessor side on ties).  The
committed rows keep the growing point set satisfied, row by row.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels, model
from .errors import ModelViolationError, PreconditionError, SequenceError
from .model import OpKind, Point, PointKind, PointSet, UpdateSequence


@dataclass(frozen=True)
class Stair:
    owner: Point
    members: frozenset[Point]

    def __post_init__(self):
        if self.owner not in self.members:
            raise ModelViolationError("stair owner missing from members")

    def columns(self) -> set[int]:
        return {p.x for p in self.members}

    def __len__(self) -> int:
        return len(self.members)


def _column_state(P: PointSet, t: int):
    """Per-column last touch strictly below row t, plus in-row blockers."""
    n = P.universe
    last_row = np.zeros(n + 1, dtype=np.int64)
    last_kind = np.zeros(n + 1, dtype=np.int8)
    row_cols: list[tuple[int, int]] = []
    for p in P:
        if p.t < t:
            if p.t > last_row[p.x]:
                last_row[p.x] = p.t
                last_kind[p.x] = int(p.kind)
        elif p.t == t:
            row_cols.append((p.x, int(p.kind)))
    row_cols.sort()
    return last_row, last_kind, row_cols


def stair(P: PointSet, x: int, t: int) -> Stair:
    """Stair of cell (x, t) against P: the cell plus every strictly-earlier
    active-pair partner whose closed rectangle with it holds no qualifying
    third point of P."""
    iv = model.column_interval(P, x, t)  # raises if the cell is invalid
    a_ins = iv.t_ins
    last_row, last_kind, row_cols = _column_state(P, t)

    lo_lim, hi_lim = 1, P.universe
    for c, k in row_cols:
        if c == x or k == PointKind.INSERT:
            continue
        if c < x and c + 1 > lo_lim:
            lo_lim = c + 1
        if c > x and c - 1 < hi_lim:
            hi_lim = c - 1

    owner = P.point_at(x, t) or Point(x, t, None)
    members = [owner]
    for step in (-1, 1):
        best = int(last_row[x])
        onlydel = best > 0 and last_kind[x] == PointKind.DELETE
        c = x + step
        while (c >= lo_lim) if step < 0 else (c <= hi_lim):
            r = int(last_row[c])
            if r > 0:
                eligible = r > best or (r == best and onlydel)
                kk = int(last_kind[c])
                if eligible and kk != PointKind.DELETE and a_ins <= r:
                    members.append(Point(c, r, PointKind(kk)))
                if r > best:
                    best, onlydel = r, kk == PointKind.DELETE
                elif r == best and kk != PointKind.DELETE:
                    onlydel = False
            c += step
    return Stair(owner, frozenset(members))


def _live_before(P: PointSet, t: int, start_live: np.ndarray | None) -> np.ndarray:
    if start_live is None:
        if P.source is not None:
            start_live = P.source.start_live_mask()
        else:
            start_live = np.ones(P.universe + 1, dtype=bool)
            start_live[0] = False
            for x, ups in P.updates_by_column().items():
                if ups and ups[0][1] == PointKind.INSERT:
                    start_live[x] = False
    live = start_live.copy()
    for x, ups in P.updates_by_column().items():
        for (r, k) in ups:
            if r < t:
                live[x] = k == PointKind.INSERT
    return live


def greedy_step(P: PointSet, op: tuple[int, OpKind], t: int,
                start_live: np.ndarray | None = None) -> set[Point]:
    """Touched points of row t given the finalized rows below it.

    ``start_live`` marks the columns of the initial tree; without it the mask
    is derived from P's own update points (columns never updated count as
    initially present).
    """
    x0, k0 = int(op[0]), OpKind(int(op[1]))
    if len(P) and int(P.ts.max()) >= t:
        raise PreconditionError(f"rows >= {t} are already present")
    live = _live_before(P, t, start_live)
    if k0 == OpKind.INSERT:
        if live[x0]:
            raise SequenceError(f"t={t}: insert of {x0} while present")
    elif not live[x0]:
        raise SequenceError(f"t={t}: {k0.name.lower()} of {x0} while absent")

    horizon = max(P.horizon, t)
    ambient = PointSet(np.concatenate([P.ts, [t]]),
                       np.concatenate([P.xs, [x0]]),
                       np.concatenate([P.ks, [np.int8(int(k0))]]),
                       P.universe, horizon, source=None)

    stairs = [stair(ambient, x0, t)]
    if k0 != OpKind.ACCESS:
        pred = next((c for c in range(x0 - 1, 0, -1) if live[c]), None)
        succ = next((c for c in range(x0 + 1, P.universe + 1) if live[c]), None)
        if pred is not None and succ is not None:
            with_pred = stairs[0].columns() | stair(ambient, pred, t).columns()
            with_succ = stairs[0].columns() | stair(ambient, succ, t).columns()
            cols = with_pred if len(with_pred) <= len(with_succ) else with_succ
        else:
            cols = stairs[0].columns()
    else:
        cols = stairs[0].columns()
    return {Point(c, t, PointKind(int(k0)) if c == x0 else PointKind.TOUCHED)
            for c in cols}


def greedy_execute(S: UpdateSequence) -> tuple[PointSet, int]:
    """Run greedy over the whole sequence; cost is the number of touched
    points, exactly the size of the returned set."""
    S.validate()
    live0 = S.start_live_mask().astype(np.int8)
    ts, xs, ks, cnt, err, err_row = _kernels.greedy_core(
        S.universe, S.keys, S.kinds, live0)
    if err == 1:
        raise SequenceError(f"t={err_row}: insert of a present key")
    if err == 2:
        raise SequenceError(f"t={err_row}: access/delete of an absent key")
    P = PointSet(ts[:cnt].copy(), xs[:cnt].copy(), ks[:cnt].copy(),
                 S.universe, S.length, source=S)
    return P, int(cnt)
