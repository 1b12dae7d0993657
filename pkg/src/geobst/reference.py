"""Brute-force reference implementations used to cross-check the fast paths.

Everything here is written straight from the definitions with no shared
machinery: rectangle checks enumerate the whole point set, the access-only
greedy recomputes emptiness per candidate, pattern containment enumerates row
and column subsets.  Intended for small inputs in tests and acceptance runs.
"""

from __future__ import annotations

import itertools

from . import model
from .model import OpKind, Point, PointKind, PointSet, UpdateSequence


def brute_violations(P: PointSet, timeline: PointSet | None = None):
    """All defects of the two satisfiedness conditions, by full enumeration.

    Returns (pair_violations, neighbor_violations) where pairs are
    ((p_t, p_x, q_t, q_x)) tuples with p the lower point and neighbor
    violations are update Points.  Raises if some point sits on an invalid
    cell.

    ``timeline`` supplies the column update timelines used for validity,
    activity and row-neighbor queries.  It defaults to P itself; pass the
    full execution's point set when P is a row prefix, so that columns
    first inserted after the prefix are not mistaken for initially-present
    ones.
    """
    tl = timeline if timeline is not None else P
    pts = list(P)
    for p in pts:
        if not model.is_valid_point(tl, p.x, p.t):
            raise model.ModelViolationError(
                f"invalid point at cell ({p.x}, {p.t})")
    pair_bad = []
    for p, q in itertools.combinations(pts, 2):
        if p.t > q.t or (p.t == q.t and p.x > q.x):
            p, q = q, p
        if p.x == q.x or p.t == q.t:
            continue
        if not model.active_pair(tl, p, q):
            continue
        lo_x, hi_x = min(p.x, q.x), max(p.x, q.x)
        ok = False
        for r in pts:
            if r is p or r is q:
                continue
            if lo_x <= r.x <= hi_x and p.t <= r.t <= q.t:
                if model.qualifies_as_witness(r, p.t, q.t):
                    ok = True
                    break
        if not ok:
            pair_bad.append((p.t, p.x, q.t, q.x))
    nb_bad = []
    for p in pts:
        if p.kind not in (PointKind.INSERT, PointKind.DELETE):
            continue
        pre = model.pred_point(tl, p)
        suc = model.succ_point(tl, p)
        if pre is None or suc is None:
            continue
        if P.point_at(pre.x, p.t) is None and P.point_at(suc.x, p.t) is None:
            nb_bad.append(p)
    return sorted(pair_bad), nb_bad


def brute_is_satisfied(P: PointSet):
    """(ok, witness) by exhaustive enumeration; see brute_violations."""
    pair_bad, nb_bad = brute_violations(P)
    if not pair_bad and not nb_bad:
        return True, None
    return False, (pair_bad[0] if pair_bad else None,
                   nb_bad[0] if nb_bad else None)


def classic_satisfied_access_only(P: PointSet) -> bool:
    """Update-free satisfiedness: every non-aligned pair's closed rectangle
    holds a third point.  Kinds and activity play no role."""
    pts = [(p.x, p.t) for p in P]
    cells = set(pts)
    for (px, pt), (qx, qt) in itertools.combinations(pts, 2):
        if px == qx or pt == qt:
            continue
        lo_x, hi_x = min(px, qx), max(px, qx)
        lo_t, hi_t = min(pt, qt), max(pt, qt)
        if not any(c for c in cells
                   if c != (px, pt) and c != (qx, qt)
                   and lo_x <= c[0] <= hi_x and lo_t <= c[1] <= hi_t):
            return False
    return True


def classic_greedy_access_only(S: UpdateSequence) -> PointSet:
    """Reference greedy for access-only sequences, recomputing rectangle
    emptiness per candidate from scratch."""
    if any(int(k) != OpKind.ACCESS for k in S.kinds):
        raise ValueError("sequence must be access-only")
    touched: set[tuple[int, int]] = set()
    points: list[Point] = []
    for t in range(1, S.length + 1):
        x0 = int(S.keys[t - 1])
        row = {x0}
        for (cx, ct) in touched:
            if cx == x0:
                continue
            lo_x, hi_x = min(cx, x0), max(cx, x0)
            empty = not any(o for o in touched
                            if o != (cx, ct)
                            and lo_x <= o[0] <= hi_x and ct <= o[1] <= t)
            # only the latest touch of a column can span an empty rectangle
            if empty:
                row.add(cx)
        for c in sorted(row):
            points.append(Point(c, t, PointKind.ACCESS if c == x0
                                else PointKind.TOUCHED))
            touched.add((c, t))
    return PointSet.from_points(points, S.universe, S.length, source=S)


def brute_stair(P: PointSet, x: int, t: int) -> set[Point]:
    """Definitional stair of cell (x, t) against the whole of P."""
    anchor_iv = model.column_interval(P, x, t)
    members = {Point(x, t, P.point_at(x, t).kind if P.point_at(x, t) else None)}
    for q in P:
        if q.t >= t or q.x == x:
            continue
        if not anchor_iv.covers(q.t, t):
            continue
        if not model.column_interval(P, q.x, q.t).covers(q.t, t):
            continue
        lo_x, hi_x = min(q.x, x), max(q.x, x)
        blocked = False
        for r in P:
            if (r.x, r.t) in ((q.x, q.t), (x, t)):
                continue
            if lo_x <= r.x <= hi_x and q.t <= r.t <= t:
                if model.qualifies_as_witness(r, q.t, t):
                    blocked = True
                    break
        if not blocked:
            members.add(q)
    return members


def brute_contains_pattern(dense_m, dense_p):
    """Pattern containment by enumerating all row and column subsets.

    Operates on dense 0/1 arrays (rows x cols); returns (found, rows, cols)
    with 1-based indices.
    """
    mu, mv = len(dense_m), len(dense_m[0]) if len(dense_m) else 0
    pu, pv = len(dense_p), len(dense_p[0])
    if pu > mu or pv > mv:
        return False, None, None
    pat_ones = [(i, j) for i in range(pu) for j in range(pv) if dense_p[i][j]]
    for rows in itertools.combinations(range(mu), pu):
        for cols in itertools.combinations(range(mv), pv):
            if all(dense_m[rows[i]][cols[j]] for i, j in pat_ones):
                return (True, tuple(r + 1 for r in rows),
                        tuple(c + 1 for c in cols))
    return False, None, None
