"""Workload construction: deque sequences, the fresh-key concentration
rewrite, sequential access as minimum-deletions, and permutation accesses.

All generators take a 64-bit seed fed to numpy's PCG64 so runs reproduce
exactly.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ShapeError
from .model import OpKind, UpdateSequence


class Side(Enum):
    MIN = "min"
    MAX = "max"


@dataclass(frozen=True)
class DequeOp:
    """One end operation: insert or delete at the current minimum/maximum."""

    side: Side
    kind: OpKind

    def __post_init__(self):
        if self.kind == OpKind.ACCESS:
            raise ShapeError("deque operations are inserts and deletes only")


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def gen_deque(n: int, m: int, seed: int, restricted: bool = False,
              insert_bias: float = 0.6, min_bias: float = 0.5) -> UpdateSequence:
    """Random deque sequence of length m over keys [1..n].

    Starts from an empty structure; inserts pick a uniform free key strictly
    below the current minimum or above the current maximum, deletes pop an
    end.  With ``restricted`` deletes happen at the minimum only.  Blocked
    choices (no room on the chosen side, delete on empty) are re-rolled, so
    the emitted schedule is always feasible.
    """
    if m < 1 or n < 1:
        raise ShapeError("need n >= 1 and m >= 1")
    rng = _rng(seed)
    live: deque[int] = deque()
    keys = np.zeros(m, dtype=np.int64)
    kinds = np.zeros(m, dtype=np.int8)
    for t in range(m):
        while True:
            do_insert = not live or rng.random() < insert_bias
            at_min = True if restricted and not do_insert else rng.random() < min_bias
            if do_insert:
                if not live:
                    key = int(rng.integers(1, n + 1))
                elif at_min:
                    if live[0] <= 1:
                        if live[-1] >= n:
                            continue  # no room on either side; roll again
                        at_min = False
                        key = int(rng.integers(live[-1] + 1, n + 1))
                    else:
                        key = int(rng.integers(1, live[0]))
                else:
                    if live[-1] >= n:
                        if live[0] <= 1:
                            continue
                        at_min = True
                        key = int(rng.integers(1, live[0]))
                    else:
                        key = int(rng.integers(live[-1] + 1, n + 1))
                if at_min or not live:
                    live.appendleft(key)
                else:
                    live.append(key)
                keys[t], kinds[t] = key, OpKind.INSERT
            else:
                key = live.popleft() if at_min else live.pop()
                keys[t], kinds[t] = key, OpKind.DELETE
            break
    # compress to the used keys: a key of [1..n] that never appears would sit
    # in the initial tree and could straddle the inserts, breaking dequeness
    used = np.unique(keys)
    keys = np.searchsorted(used, keys) + 1
    return UpdateSequence(keys.astype(np.int64), kinds, int(used.shape[0]))


def deque_schedule(S: UpdateSequence) -> list[DequeOp]:
    """Recover the (side, kind) schedule of a deque sequence.

    Raises ShapeError when S is not a deque sequence: an access, an insert
    that is not a new extreme, or a delete not at an end.
    """
    dq = deque(_start_members(S))
    out = []
    for t, (x, k) in enumerate(S.ops, start=1):
        if k == OpKind.ACCESS:
            raise ShapeError(f"t={t}: access in a deque sequence")
        if k == OpKind.INSERT:
            if dq and x > dq[0] and x < dq[-1]:
                raise ShapeError(f"t={t}: insert of {x} is not a new extreme")
            if dq and x < dq[0]:
                side = Side.MIN
                dq.appendleft(x)
            elif dq and x > dq[-1]:
                side = Side.MAX
                dq.append(x)
            elif dq:
                raise ShapeError(f"t={t}: insert of a present key {x}")
            else:
                side = Side.MIN
                dq.append(x)
        else:
            if not dq or (x != dq[0] and x != dq[-1]):
                raise ShapeError(f"t={t}: delete of {x} is not at an end")
            if x == dq[0]:
                side = Side.MIN
                dq.popleft()
            else:
                side = Side.MAX
                dq.pop()
        out.append(DequeOp(side, OpKind(int(k))))
    return out


def is_concentrated(S: UpdateSequence) -> tuple[bool, int | None]:
    """Whether every insert clears the already-deleted territory.

    Keys deleted while they were the structure minimum accumulate below every
    later minimum-insert; keys deleted otherwise accumulate above every later
    maximum-insert.  Returns (True, None) or (False, first_violation_row).
    """
    deque_schedule(S)  # shape check
    dq: deque[int] = deque(_start_members(S))
    max_low = None   # largest key retired from the minimum side
    min_high = None  # smallest key retired from the other side
    for t, (x, k) in enumerate(S.ops, start=1):
        if k == OpKind.INSERT:
            is_min = not dq or x < dq[0]
            is_max = not dq or x > dq[-1]
            if is_min and max_low is not None and not (max_low < x):
                return False, t
            if is_max and min_high is not None and not (x < min_high):
                return False, t
            if is_min:
                dq.appendleft(x)
            else:
                dq.append(x)
        else:
            if x == dq[0]:
                dq.popleft()
                if max_low is None or x > max_low:
                    max_low = x
            else:
                dq.pop()
                if min_high is None or x < min_high:
                    min_high = x
    return True, None


def _first_kinds(S: UpdateSequence) -> dict[int, int]:
    first: dict[int, int] = {}
    for x, k in zip(S.keys, S.kinds):
        first.setdefault(int(x), int(k))
    return first


def _start_members(S: UpdateSequence) -> list[int]:
    """Keys in the tree before the first row: first op a delete, or never
    operated at all (such columns are valid from the start)."""
    first = _first_kinds(S)
    return sorted(x for x in range(1, S.universe + 1)
                  if first.get(x, OpKind.DELETE) != OpKind.INSERT)


def concentrate(S: UpdateSequence) -> UpdateSequence:
    """Rewrite a deque sequence so no insert re-enters retired territory.

    Each occurrence of a key gets a fresh identity; minimum-retired identities
    stack up below the occupied band in retirement order, the others stack up
    above it in reverse retirement order, and the final left-to-right ranking
    of all identities yields the new keys.  Every key is then inserted and
    deleted at most once, the relative order of the live keys matches S at
    every prefix, and the (side, kind) schedule is unchanged, so an
    end-restricted input stays end-restricted.  Keys are compressed to
    [1..K], K <= n + m.
    """
    deque_schedule(S)  # shape check
    start_vals = _start_members(S)
    next_id = 0
    low_zone: list[int] = []
    high_zone: list[int] = []
    live_vals: deque[int] = deque(start_vals)
    live_ids: deque[int] = deque()
    for _ in start_vals:
        live_ids.append(next_id)
        next_id += 1
    op_ids = np.zeros(S.length, dtype=np.int64)
    for t, (x, k) in enumerate(S.ops):
        if k == OpKind.INSERT:
            nid = next_id
            next_id += 1
            if not live_vals or x < live_vals[0]:
                live_vals.appendleft(x)
                live_ids.appendleft(nid)
            else:
                live_vals.append(x)
                live_ids.append(nid)
            op_ids[t] = nid
        else:
            if x == live_vals[0]:
                live_vals.popleft()
                nid = live_ids.popleft()
                low_zone.append(nid)
            else:
                live_vals.pop()
                nid = live_ids.pop()
                high_zone.append(nid)
            op_ids[t] = nid
    order = low_zone + list(live_ids) + list(reversed(high_zone))
    rank = {nid: i + 1 for i, nid in enumerate(order)}
    keys = np.array([rank[nid] for nid in op_ids], dtype=np.int64)
    return UpdateSequence(keys, S.kinds.copy(), len(order))


def sequential_as_deletions(n: int) -> UpdateSequence:
    """Visit 1..n in order by deleting the current minimum each step."""
    if n < 1:
        raise ShapeError("need n >= 1")
    return UpdateSequence(np.arange(1, n + 1, dtype=np.int64),
                          np.full(n, OpKind.DELETE, dtype=np.int8), n)


def random_permutation_access(n: int, seed: int) -> UpdateSequence:
    """Access a uniformly random permutation of [1..n]."""
    if n < 1:
        raise ShapeError("need n >= 1")
    keys = _rng(seed).permutation(np.arange(1, n + 1)).astype(np.int64)
    return UpdateSequence(keys, np.full(n, OpKind.ACCESS, dtype=np.int8), n)


def random_update_sequence(n: int, m: int, seed: int,
                           weights: tuple[float, float, float] = (0.5, 0.25, 0.25)
                           ) -> UpdateSequence:
    """Random mixed access/insert/delete sequence respecting presence rules.

    A random subset of keys starts in the tree; unavailable op kinds are
    re-rolled.  Not every key need appear (relaxed workloads).
    """
    if m < 1 or n < 1:
        raise ShapeError("need n >= 1 and m >= 1")
    rng = _rng(seed)
    present = sorted(int(x) for x in
                     rng.choice(np.arange(1, n + 1),
                                size=int(rng.integers(0, n + 1)), replace=False))
    absent = sorted(set(range(1, n + 1)) - set(present))
    keys = np.zeros(m, dtype=np.int64)
    kinds = np.zeros(m, dtype=np.int8)
    w = np.array(weights, dtype=float)
    for t in range(m):
        while True:
            k = int(rng.choice(3, p=w / w.sum()))
            if k == OpKind.ACCESS and present:
                x = present[int(rng.integers(0, len(present)))]
            elif k == OpKind.INSERT and absent:
                i = int(rng.integers(0, len(absent)))
                x = absent.pop(i)
                _insort(present, x)
            elif k == OpKind.DELETE and present:
                i = int(rng.integers(0, len(present)))
                x = present.pop(i)
                _insort(absent, x)
            else:
                continue
            keys[t], kinds[t] = x, k
            break
    return UpdateSequence(keys, kinds, n)


def _insort(lst: list[int], x: int) -> None:
    import bisect
    bisect.insort(lst, x)
