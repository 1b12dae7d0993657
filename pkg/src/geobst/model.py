"""Core grid model: update sequences, classified point sets, validity and
active intervals on the [keys] x [timesteps] integer grid.

Rows are 1-based timesteps increasing upward (later = higher t), columns are
1-based keys.  A cell may hold at most one point.  Update points (inserts and
deletes) partition each column's timeline into alternating live/dead stretches;
a cell is *valid* exactly when a tree execution would be allowed to touch it.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable, Iterator, NamedTuple, Optional, Sequence

import numpy as np

from .errors import GridRangeError, ModelViolationError, SequenceError


class OpKind(IntEnum):
    ACCESS = 0
    INSERT = 1
    DELETE = 2


class PointKind(IntEnum):
    ACCESS = 0
    INSERT = 1
    DELETE = 2
    TOUCHED = 3


_KIND_LETTER = {PointKind.ACCESS: "A", PointKind.INSERT: "I",
                PointKind.DELETE: "D", PointKind.TOUCHED: "T"}
_LETTER_KIND = {v: k for k, v in _KIND_LETTER.items()}


def kind_letter(kind: PointKind | OpKind) -> str:
    return _KIND_LETTER[PointKind(int(kind))]


def kind_from_letter(letter: str) -> PointKind:
    try:
        return _LETTER_KIND[letter]
    except KeyError:
        raise ValueError(f"unknown point kind letter {letter!r}") from None


class Point(NamedTuple):
    x: int
    t: int
    kind: Optional[PointKind]

    def cell(self) -> tuple[int, int]:
        return (self.x, self.t)


@dataclass(frozen=True)
class ActiveInterval:
    """Maximal run of valid timesteps around a point's row in its column."""

    t_ins: int
    t_del: int
    from_start: bool = False
    to_horizon: bool = False

    def __post_init__(self):
        if self.t_ins > self.t_del:
            raise ModelViolationError(
                f"active interval [{self.t_ins}, {self.t_del}] is empty")

    def contains(self, t: int) -> bool:
        return self.t_ins <= t <= self.t_del

    def covers(self, lo: int, hi: int) -> bool:
        return self.t_ins <= lo and hi <= self.t_del


@dataclass(frozen=True)
class UpdateSequence:
    """Ordered access/insert/delete operations over keys [1..universe].

    Keys whose first operation is an access or a delete are implicitly present
    in the initial tree.  Inserts require the key to be absent, accesses and
    deletes require it to be present, which makes inserts and deletes on one
    key alternate.
    """

    keys: np.ndarray
    kinds: np.ndarray
    universe: int

    def __post_init__(self):
        object.__setattr__(self, "keys", np.asarray(self.keys, dtype=np.int64))
        object.__setattr__(self, "kinds", np.asarray(self.kinds, dtype=np.int8))
        if self.keys.shape != self.kinds.shape or self.keys.ndim != 1:
            raise SequenceError("keys and kinds must be 1-d arrays of equal length")

    @classmethod
    def from_ops(cls, ops: Iterable[tuple[int, OpKind]], universe: int) -> "UpdateSequence":
        pairs = list(ops)
        keys = np.array([k for k, _ in pairs], dtype=np.int64)
        kinds = np.array([int(op) for _, op in pairs], dtype=np.int8)
        return cls(keys, kinds, universe)

    @property
    def length(self) -> int:
        return int(self.keys.shape[0])

    def __len__(self) -> int:
        return self.length

    @property
    def ops(self) -> list[tuple[int, OpKind]]:
        return [(int(k), OpKind(int(op))) for k, op in zip(self.keys, self.kinds)]

    def op_at(self, t: int) -> tuple[int, OpKind]:
        if not 1 <= t <= self.length:
            raise GridRangeError(f"timestep {t} outside [1, {self.length}]")
        return int(self.keys[t - 1]), OpKind(int(self.kinds[t - 1]))

    def validate(self, strict: bool = False) -> list[int]:
        """Check presence/alternation rules; return keys that never appear.

        Raises SequenceError on a hard violation.  With ``strict`` the
        every-key-appears rule is enforced too; by default missing keys are
        only reported, which suits synthetic workloads.
        """
        n, m = self.universe, self.length
        if n < 1:
            raise SequenceError("universe must be at least 1")
        if m and (self.keys.min() < 1 or self.keys.max() > n):
            raise SequenceError("operation key outside the universe")
        seen = np.zeros(n + 1, dtype=bool)
        present = np.zeros(n + 1, dtype=np.int8)  # 0 unknown, 1 present, -1 absent
        for t in range(1, m + 1):
            x = int(self.keys[t - 1])
            op = int(self.kinds[t - 1])
            seen[x] = True
            state = present[x]
            if op == OpKind.INSERT:
                if state == 1:
                    raise SequenceError(f"t={t}: insert of {x} while present")
                present[x] = 1
            elif op == OpKind.DELETE:
                if state == -1:
                    raise SequenceError(f"t={t}: delete of {x} while absent")
                present[x] = -1
            else:
                if state == -1:
                    raise SequenceError(f"t={t}: access of {x} while absent")
                present[x] = 1
        missing = [x for x in range(1, n + 1) if not seen[x]]
        if strict and missing:
            raise SequenceError(f"keys never touched: {missing[:10]}"
                                + ("..." if len(missing) > 10 else ""))
        return missing

    def start_live_mask(self) -> np.ndarray:
        """Columns valid before their first update (index 0 unused).

        A column whose first update is an insert is dead until that insert;
        every other column (first update a delete, or no update at all) is
        implicitly in the initial tree.
        """
        mask = np.ones(self.universe + 1, dtype=bool)
        decided = np.zeros(self.universe + 1, dtype=bool)
        for x, op in zip(self.keys, self.kinds):
            if not decided[x] and op != OpKind.ACCESS:
                decided[x] = True
                if op == OpKind.INSERT:
                    mask[x] = False
        mask[0] = False
        return mask

    def points(self) -> list[Point]:
        return [Point(int(x), t + 1, PointKind(int(op)))
                for t, (x, op) in enumerate(zip(self.keys, self.kinds))]


class PointSet:
    """Classified points on the grid, ordered by (t, x).

    Holds both the input points of its update sequence and any extra touched
    cells an execution adds; at most one point per cell.
    """

    __slots__ = ("ts", "xs", "ks", "universe", "horizon", "source",
                 "_index", "_row_starts", "_col_rows")

    def __init__(self, ts, xs, ks, universe: int, horizon: int,
                 source: UpdateSequence | None = None):
        ts = np.asarray(ts, dtype=np.int64)
        xs = np.asarray(xs, dtype=np.int64)
        ks = np.asarray(ks, dtype=np.int8)
        order = np.lexsort((xs, ts))
        self.ts = ts[order]
        self.xs = xs[order]
        self.ks = ks[order]
        self.universe = int(universe)
        self.horizon = int(horizon)
        self.source = source
        self._index: dict[tuple[int, int], int] | None = None
        self._row_starts: np.ndarray | None = None
        self._col_rows: dict[int, list[tuple[int, int]]] | None = None
        if len(self.ts):
            if self.ts.min() < 1 or self.ts.max() > self.horizon:
                raise GridRangeError("point row outside [1, horizon]")
            if self.xs.min() < 1 or self.xs.max() > self.universe:
                raise GridRangeError("point column outside [1, universe]")
            same = (np.diff(self.ts) == 0) & (np.diff(self.xs) == 0)
            if same.any():
                i = int(np.argmax(same))
                raise ModelViolationError(
                    f"duplicate point at cell ({int(self.xs[i])}, {int(self.ts[i])})")

    @classmethod
    def from_points(cls, points: Iterable[Point], universe: int, horizon: int,
                    source: UpdateSequence | None = None) -> "PointSet":
        pts = list(points)
        return cls(np.array([p.t for p in pts], dtype=np.int64),
                   np.array([p.x for p in pts], dtype=np.int64),
                   np.array([int(p.kind) for p in pts], dtype=np.int8),
                   universe, horizon, source)

    @classmethod
    def from_sequence(cls, seq: UpdateSequence) -> "PointSet":
        return cls(np.arange(1, seq.length + 1, dtype=np.int64),
                   seq.keys.copy(), seq.kinds.copy(),
                   seq.universe, seq.length, source=seq)

    def __len__(self) -> int:
        return int(self.ts.shape[0])

    def __iter__(self) -> Iterator[Point]:
        for t, x, k in zip(self.ts, self.xs, self.ks):
            yield Point(int(x), int(t), PointKind(int(k)))

    def _build_index(self) -> dict[tuple[int, int], int]:
        if self._index is None:
            self._index = {(int(x), int(t)): i
                           for i, (x, t) in enumerate(zip(self.xs, self.ts))}
        return self._index

    def __contains__(self, item) -> bool:
        if isinstance(item, Point):
            item = (item.x, item.t)
        return tuple(item) in self._build_index()

    def point_at(self, x: int, t: int) -> Point | None:
        i = self._build_index().get((x, t))
        if i is None:
            return None
        return Point(int(self.xs[i]), int(self.ts[i]), PointKind(int(self.ks[i])))

    def row_bounds(self, t: int) -> tuple[int, int]:
        if self._row_starts is None:
            self._row_starts = np.searchsorted(self.ts, np.arange(1, self.horizon + 2))
        return int(self._row_starts[t - 1]), int(self._row_starts[t])

    def row_points(self, t: int) -> list[Point]:
        i0, i1 = self.row_bounds(t)
        return [Point(int(self.xs[i]), int(self.ts[i]), PointKind(int(self.ks[i])))
                for i in range(i0, i1)]

    def column_points(self, x: int) -> list[tuple[int, int]]:
        """Rows touched in column x as sorted (t, kind) pairs."""
        if self._col_rows is None:
            cols: dict[int, list[tuple[int, int]]] = {}
            for t, cx, k in zip(self.ts, self.xs, self.ks):
                cols.setdefault(int(cx), []).append((int(t), int(k)))
            self._col_rows = cols
        return self._col_rows.get(x, [])

    def updates_by_column(self) -> dict[int, list[tuple[int, int]]]:
        """Per column, sorted (row, kind) of insert/delete points only."""
        out: dict[int, list[tuple[int, int]]] = {}
        for t, x, k in zip(self.ts, self.xs, self.ks):
            if k == PointKind.INSERT or k == PointKind.DELETE:
                out.setdefault(int(x), []).append((int(t), int(k)))
        return out

    def input_points(self) -> list[Point]:
        """Non-touched points, i.e. the update sequence's own cells."""
        return [p for p in self if p.kind != PointKind.TOUCHED]

    def to_sequence(self) -> UpdateSequence:
        """Recover the update sequence: exactly one input point per row."""
        if self.source is not None and self.source.length == self.horizon:
            return self.source
        inputs = self.input_points()
        if len(inputs) != self.horizon:
            raise ModelViolationError(
                f"expected one input point per row, got {len(inputs)} "
                f"for horizon {self.horizon}")
        rows = [0] * (self.horizon + 1)
        keys = np.zeros(self.horizon, dtype=np.int64)
        kinds = np.zeros(self.horizon, dtype=np.int8)
        for p in inputs:
            if rows[p.t]:
                raise ModelViolationError(f"two input points in row {p.t}")
            rows[p.t] = 1
            keys[p.t - 1] = p.x
            kinds[p.t - 1] = int(p.kind)
        return UpdateSequence(keys, kinds, self.universe)

    def same_points(self, other: "PointSet") -> bool:
        return (self.universe == other.universe
                and self.horizon == other.horizon
                and np.array_equal(self.ts, other.ts)
                and np.array_equal(self.xs, other.xs)
                and np.array_equal(self.ks, other.ks))


# --- column timeline helpers -------------------------------------------------

def _column_updates(P: PointSet, x: int) -> tuple[list[int], list[int]]:
    ups = P.updates_by_column().get(x, [])
    return [t for t, _ in ups], [k for _, k in ups]


def _check_range(P: PointSet, x: int, t: int) -> None:
    if not 1 <= x <= P.universe:
        raise GridRangeError(f"column {x} outside [1, {P.universe}]")
    if not 1 <= t <= P.horizon:
        raise GridRangeError(f"row {t} outside [1, {P.horizon}]")


def is_valid_point(P: PointSet, x: int, t: int) -> bool:
    """Whether cell (x, t) may be touched, per the nearest-update rule.

    For a non-update cell the nearest update below must be an insert (or
    absent) and the nearest above a delete (or absent); update cells need the
    opposite kind on both sides (or absence).
    """
    _check_range(P, x, t)
    rows, kinds = _column_updates(P, x)
    i = bisect.bisect_left(rows, t)
    here = None
    if i < len(rows) and rows[i] == t:
        here = kinds[i]
    below = kinds[i - 1] if i > 0 else None
    j = i + 1 if here is not None else i
    above = kinds[j] if j < len(rows) else None
    if here is None:
        return ((below is None or below == PointKind.INSERT)
                and (above is None or above == PointKind.DELETE))
    if here == PointKind.INSERT:
        return ((below is None or below == PointKind.DELETE)
                and (above is None or above == PointKind.DELETE))
    return ((below is None or below == PointKind.INSERT)
            and (above is None or above == PointKind.INSERT))


def column_interval(P: PointSet, x: int, t: int) -> ActiveInterval:
    """Maximal valid run of column x containing row t (cell need not be in P)."""
    _check_range(P, x, t)
    if not is_valid_point(P, x, t):
        raise ModelViolationError(f"cell ({x}, {t}) is not valid")
    rows, kinds = _column_updates(P, x)
    i = bisect.bisect_left(rows, t)
    here = kinds[i] if i < len(rows) and rows[i] == t else None

    if here == PointKind.INSERT:
        lo, from_start = t, False
    else:
        j = i - 1
        if j >= 0 and kinds[j] == PointKind.INSERT:
            lo, from_start = rows[j], False
        else:
            lo, from_start = 1, True
    if here == PointKind.DELETE:
        hi, to_horizon = t, False
    else:
        j = i + 1 if here is not None else i
        if j < len(rows) and kinds[j] == PointKind.DELETE:
            hi, to_horizon = rows[j], False
        else:
            hi, to_horizon = P.horizon, True
    return ActiveInterval(lo, hi, from_start, to_horizon)


def active_interval(P: PointSet, p: Point) -> ActiveInterval:
    """Active time of a point of P."""
    if p not in P:
        raise ModelViolationError(f"point ({p.x}, {p.t}) not in the set")
    return column_interval(P, p.x, p.t)


def pred_point(P: PointSet, p: Point | tuple[int, int]) -> Point | None:
    """Nearest valid cell strictly left of p in p's row, or None."""
    x, t = (p.x, p.t) if isinstance(p, Point) else p
    _check_range(P, x, t)
    for c in range(x - 1, 0, -1):
        if is_valid_point(P, c, t):
            q = P.point_at(c, t)
            return q if q is not None else Point(c, t, None)
    return None


def succ_point(P: PointSet, p: Point | tuple[int, int]) -> Point | None:
    """Nearest valid cell strictly right of p in p's row, or None."""
    x, t = (p.x, p.t) if isinstance(p, Point) else p
    _check_range(P, x, t)
    for c in range(x + 1, P.universe + 1):
        if is_valid_point(P, c, t):
            q = P.point_at(c, t)
            return q if q is not None else Point(c, t, None)
    return None


def is_valid_set(P: PointSet) -> bool:
    """Every point of P sits on a valid cell."""
    return all(is_valid_point(P, p.x, p.t) for p in P)


def active_pair(P: PointSet, p: Point, q: Point) -> bool:
    """Both points valid throughout the rows spanned by the pair."""
    lo, hi = min(p.t, q.t), max(p.t, q.t)
    return (column_interval(P, p.x, p.t).covers(lo, hi)
            and column_interval(P, q.x, q.t).covers(lo, hi))


def qualifies_as_witness(r: Point, low_row: int, high_row: int) -> bool:
    """Whether r may satisfy a rectangle spanning rows [low_row, high_row].

    A delete point on the bottom row or an insert point on the top row does
    not count.
    """
    if r.t == low_row and r.kind == PointKind.DELETE:
        return False
    if r.t == high_row and r.kind == PointKind.INSERT:
        return False
    return True
