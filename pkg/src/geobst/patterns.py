"""Forbidden-submatrix engine: binary matrices from executions, pattern
containment, the two distinguished patterns, and extremal-bound reporting.

A matrix contains a pattern when some submatrix (rows and columns picked in
increasing order) has ones wherever the pattern does; pattern zeros are
don't-cares.  Touched-point matrices put time on rows (row 1 = first step)
and keys on columns.
"""

from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from . import _kernels
from .errors import GridRangeError, ShapeError
from .model import PointSet


@dataclass(frozen=True)
class BinaryMatrix:
    """Sparse 0/1 matrix with 1-based (row, col) ones."""

    u: int
    v: int
    ones: frozenset[tuple[int, int]]

    def __post_init__(self):
        for (r, c) in self.ones:
            if not (1 <= r <= self.u and 1 <= c <= self.v):
                raise GridRangeError(f"entry ({r}, {c}) outside {self.u}x{self.v}")

    @classmethod
    def from_ones(cls, u: int, v: int, ones: Iterable[tuple[int, int]]) -> "BinaryMatrix":
        return cls(u, v, frozenset((int(r), int(c)) for r, c in ones))

    def dense(self) -> np.ndarray:
        d = np.zeros((self.u, self.v), dtype=np.uint8)
        for (r, c) in self.ones:
            d[r - 1, c - 1] = 1
        return d

    def count(self) -> int:
        return len(self.ones)

    def flip_vertical(self) -> "BinaryMatrix":
        return BinaryMatrix.from_ones(
            self.u, self.v, ((self.u + 1 - r, c) for r, c in self.ones))

    def flip_horizontal(self) -> "BinaryMatrix":
        return BinaryMatrix.from_ones(
            self.u, self.v, ((r, self.v + 1 - c) for r, c in self.ones))


@dataclass(frozen=True)
class Pattern:
    name: str
    matrix: BinaryMatrix

    def __post_init__(self):
        if not self.matrix.ones:
            raise ShapeError("patterns must be nonempty")


# Rows are timesteps ascending: row 1 is the earliest.  Displayed pictures of
# these patterns put time upward, so the shipped constants are the vertical
# flips of the usual printed form; greedy executions on concentrated deque
# workloads contain the printed orientation, only this one is avoided.

# Two-row zigzag: two ones on the earlier row interleaving three on the later.
P5 = Pattern("p5", BinaryMatrix.from_ones(
    2, 5, [(2, 1), (1, 2), (2, 3), (1, 4), (2, 5)]))

# Four ones on four distinct rows, columns visiting rows 4, 2, 3, 1.
P4 = Pattern("p4", BinaryMatrix.from_ones(
    4, 4, [(4, 1), (2, 2), (3, 3), (1, 4)]))

# printed orientations, used by the dedicated scans after a vertical flip
_P5_SCAN_FORM = P5.matrix.flip_vertical().ones
_P4_SCAN_FORM = P4.matrix.flip_vertical().ones


def matrix_from_pointset(P: PointSet) -> BinaryMatrix:
    """Touched points as ones; u = horizon rows, v = universe columns."""
    return BinaryMatrix.from_ones(
        P.horizon, P.universe,
        ((int(t), int(x)) for t, x in zip(P.ts, P.xs)))


def _contains_general(M: BinaryMatrix, P: BinaryMatrix):
    """Backtracking over row subsets with greedy column matching."""
    pu, pv = P.u, P.v
    if pu > M.u or pv > M.v:
        return False, None
    rows_ones: dict[int, list[int]] = {}
    for (r, c) in M.ones:
        rows_ones.setdefault(r, []).append(c)
    for r in rows_ones:
        rows_ones[r].sort()
    pat_cols: list[list[int]] = [[] for _ in range(pv)]
    for (r, c) in P.ones:
        pat_cols[c - 1].append(r)
    rows_needed = sorted({r for r, _ in P.ones})
    usable = sorted(rows_ones)
    if len(usable) < len(rows_needed):
        return False, None

    def greedy_cols(assign: dict[int, int]):
        # earliest strictly-increasing columns covering each pattern column
        cols = []
        c_prev = 0
        for j in range(pv):
            need = [assign[pr] for pr in pat_cols[j]]
            c = c_prev + 1
            while True:
                cand = c
                for mr in need:
                    ones = rows_ones.get(mr, [])
                    k = bisect.bisect_left(ones, cand)
                    if k == len(ones):
                        return None
                    if ones[k] > cand:
                        cand = ones[k]
                if all(_has_one(rows_ones, mr, cand) for mr in need):
                    cols.append(cand)
                    c_prev = cand
                    break
                c = cand + 1
        return cols

    for combo in itertools.combinations(usable, pu):
        # pattern row i -> matrix row combo[i]; unused pattern rows just
        # need any matrix row slot, so only rows with ones are enumerated
        assign = {i + 1: combo[i] for i in range(pu)}
        cols = greedy_cols(assign)
        if cols is not None:
            return True, (tuple(combo), tuple(cols))
    return False, None


def _has_one(rows_ones: dict[int, list[int]], r: int, c: int) -> bool:
    ones = rows_ones.get(r, [])
    k = bisect.bisect_left(ones, c)
    return k < len(ones) and ones[k] == c


def _flip_rows(M: BinaryMatrix):
    rs = np.fromiter((M.u + 1 - r for r, _ in M.ones), dtype=np.int64,
                     count=len(M.ones))
    cs = np.fromiter((c for _, c in M.ones), dtype=np.int64, count=len(M.ones))
    return rs, cs


def contains_pattern(M: BinaryMatrix, P: Pattern | BinaryMatrix):
    """(found, witness) where witness = (row indices, column indices).

    Both orientations of the two shipped patterns ride dedicated scans
    (containment of a flipped pattern equals containment of the pattern in
    the row-flipped matrix); other patterns go through the generic
    backtracking search.
    """
    pm = P.matrix if isinstance(P, Pattern) else P
    if not isinstance(M, BinaryMatrix):
        raise ShapeError("expected a BinaryMatrix")

    def run_p5(rs, cs, flipped):
        order = np.lexsort((cs, rs))
        res = _kernels.p5_scan(M.u, M.v, rs[order], cs[order])
        if not res[0]:
            return False, None
        r1, r2 = int(res[1]), int(res[2])
        if flipped:
            r1, r2 = M.u + 1 - r2, M.u + 1 - r1
        return True, ((r1, r2), tuple(int(c) for c in res[3:8]))

    def run_p4(rs, cs, flipped):
        order = np.lexsort((rs, cs))
        res = _kernels.p4_scan(M.u, M.v, rs[order], cs[order])
        if not res[0]:
            return False, None
        rows = [int(r) for r in res[1:5]]
        if flipped:
            rows = sorted(M.u + 1 - r for r in rows)
        return True, (tuple(rows), tuple(int(c) for c in res[5:9]))

    if (pm.u, pm.v) == (2, 5):
        if pm.ones == _P5_SCAN_FORM:
            rs = np.fromiter((r for r, _ in M.ones), dtype=np.int64,
                             count=len(M.ones))
            cs = np.fromiter((c for _, c in M.ones), dtype=np.int64,
                             count=len(M.ones))
            return run_p5(rs, cs, flipped=False)
        if pm.ones == P5.matrix.ones:
            rs, cs = _flip_rows(M)
            return run_p5(rs, cs, flipped=True)
    if (pm.u, pm.v) == (4, 4):
        if pm.ones == _P4_SCAN_FORM:
            rs = np.fromiter((r for r, _ in M.ones), dtype=np.int64,
                             count=len(M.ones))
            cs = np.fromiter((c for _, c in M.ones), dtype=np.int64,
                             count=len(M.ones))
            return run_p4(rs, cs, flipped=False)
        if pm.ones == P4.matrix.ones:
            rs, cs = _flip_rows(M)
            return run_p4(rs, cs, flipped=True)
    return _contains_general(M, pm)


# --- inverse Ackermann ----------------------------------------------------------

_ACK_CAP = 1 << 48


def _ack_level(k: int, j: int, memo: dict) -> int:
    """Level function of the doubling hierarchy, capped at _ACK_CAP.

    Level 1 doubles; each next level iterates the previous one starting
    from 1 (so level 2 is the power of two, level 3 a tower, ...).
    """
    if k == 1:
        return min(2 * j, _ACK_CAP)
    if j == 1:
        return 2
    key = (k, j)
    got = memo.get(key)
    if got is not None:
        return got
    inner = _ack_level(k, j - 1, memo)
    val = _ACK_CAP if inner >= _ACK_CAP else _ack_level(k - 1, inner, memo)
    memo[key] = val
    return val


def inverse_ackermann(u: int, v: int) -> int:
    """Two-parameter inverse of the doubling hierarchy.

    alpha(u, v) = min{ k >= 1 : A_k(max(3, v // u)) > log2(max(u, 2)) } with
    A_1(j) = 2j, A_k(1) = 2 and A_k(j) = A_{k-1}(A_k(j-1)).  The argument
    clamp keeps the hierarchy strictly growing in k, so the minimum exists;
    the value is non-increasing in v for fixed u and is at most 4 for all
    practical sizes.
    """
    if u < 1 or v < 1:
        raise GridRangeError("need u, v >= 1")
    arg = max(3, v // u)
    threshold = math.log2(max(u, 2))
    memo: dict = {}
    k = 1
    while True:
        if _ack_level(k, arg, memo) > threshold:
            return k
        k += 1


# --- bound reporting -------------------------------------------------------------

@dataclass(frozen=True)
class BoundReport:
    """One matrix checked against an extremal ones-count bound."""

    which: str
    u: int
    v: int
    ones: int
    bound: float
    ratio: float
    passed: Optional[bool]
    alpha: Optional[int] = None

    def as_dict(self) -> dict:
        return {"which": self.which, "u": self.u, "v": self.v,
                "ones": self.ones, "bound": self.bound, "ratio": self.ratio,
                "passed": self.passed, "alpha": self.alpha}


def bound_report(M: BinaryMatrix, which: str) -> BoundReport:
    """Compare a touched-point matrix against the published extremal bounds.

    ``p4-linear``: matrices avoiding the four-row pattern carry fewer than
    12(u+v) ones; reported with an absolute pass/fail.  ``p5-quasilinear``:
    the two-row zigzag bound is u * 2^alpha(u, v) + v up to an unspecified
    constant, so only the ratio is reported.
    """
    ones = M.count()
    if which == "p4-linear":
        bound = 12.0 * (M.u + M.v)
        return BoundReport(which, M.u, M.v, ones, bound,
                           ones / bound if bound else 0.0, ones < bound)
    if which == "p5-quasilinear":
        a = inverse_ackermann(M.u, M.v)
        bound = float(M.u * (2 ** a) + M.v)
        return BoundReport(which, M.u, M.v, ones, bound,
                           ones / bound if bound else 0.0, None, a)
    raise ShapeError(f"unknown bound kind {which!r}")
