"""Tree view: explicit binary search trees, root-subtree replacement steps,
executions of update sequences, and the recording of touched cells.

A step replaces a root-containing connected subtree tau by a replacement tree
tau' over the same keys plus or минус the updated one; subtrees hanging below
tau keep their internal pointers and are re-linked under tau' by key range.
Step cost is max(|tau|, |tau'|); the touched cells are tau union tau'.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

import numpy as np

from .errors import (DisconnectedTauError, GridRangeError, NeighborMissingError,
                     PendantLinkError, ReconfigurationError, RootNotInTauError,
                     SequenceError, SetRelationError)
from .model import OpKind, Point, PointKind, PointSet, UpdateSequence

_NEG_INF = float("-inf")
_POS_INF = float("inf")


class BSTree:
    """Mutable binary search tree over integer keys, stored as child maps."""

    __slots__ = ("root", "left", "right")

    def __init__(self, root: Optional[int] = None,
                 left: Optional[dict] = None, right: Optional[dict] = None):
        self.root = root
        self.left: dict[int, Optional[int]] = left if left is not None else {}
        self.right: dict[int, Optional[int]] = right if right is not None else {}
        if root is not None and root not in self.left:
            self.left[root] = None
            self.right[root] = None

    # -- construction ----------------------------------------------------

    @classmethod
    def from_insert_order(cls, keys: Iterable[int]) -> "BSTree":
        t = cls()
        for k in keys:
            t.insert_leaf(int(k))
        return t

    @classmethod
    def random_shape(cls, keys: list[int], rng: np.random.Generator) -> "BSTree":
        t = cls()
        keys = sorted(keys)

        def build(lo: int, hi: int) -> Optional[int]:
            if lo > hi:
                return None
            i = lo + int(rng.integers(0, hi - lo + 1))
            k = keys[i]
            t.left[k] = build(lo, i - 1)
            t.right[k] = build(i + 1, hi)
            return k

        t.root = build(0, len(keys) - 1)
        return t

    def insert_leaf(self, k: int) -> None:
        if k in self.left:
            raise SequenceError(f"key {k} already in tree")
        self.left[k] = None
        self.right[k] = None
        if self.root is None:
            self.root = k
            return
        cur = self.root
        while True:
            if k < cur:
                nxt = self.left[cur]
                if nxt is None:
                    self.left[cur] = k
                    return
            else:
                nxt = self.right[cur]
                if nxt is None:
                    self.right[cur] = k
                    return
            cur = nxt

    # -- queries -----------------------------------------------------------

    @property
    def nodes(self) -> set[int]:
        return set(self.left.keys())

    def __len__(self) -> int:
        return len(self.left)

    def __contains__(self, k: int) -> bool:
        return k in self.left

    def inorder(self) -> list[int]:
        out: list[int] = []
        stack: list[int] = []
        cur = self.root
        while stack or cur is not None:
            while cur is not None:
                stack.append(cur)
                cur = self.left[cur]
            cur = stack.pop()
            out.append(cur)
            cur = self.right[cur]
        return out

    def is_search_ordered(self) -> bool:
        seq = self.inorder()
        return len(seq) == len(self.left) and all(
            a < b for a, b in zip(seq, seq[1:]))

    def parent_map(self) -> dict[int, Optional[int]]:
        par: dict[int, Optional[int]] = {k: None for k in self.left}
        for k in self.left:
            for ch in (self.left[k], self.right[k]):
                if ch is not None:
                    par[ch] = k
        return par

    def depth_of(self, k: int) -> int:
        cur = self.root
        d = 0
        while cur is not None and cur != k:
            cur = self.left[cur] if k < cur else self.right[cur]
            d += 1
        if cur is None:
            raise GridRangeError(f"key {k} not in tree")
        return d

    def path_to(self, k: int) -> list[int]:
        cur = self.root
        path = []
        while cur is not None:
            path.append(cur)
            if cur == k:
                return path
            cur = self.left[cur] if k < cur else self.right[cur]
        raise GridRangeError(f"key {k} not in tree")

    def pred_in(self, k: int) -> Optional[int]:
        best = None
        cur = self.root
        while cur is not None:
            if cur < k:
                best = cur
                cur = self.right[cur]
            else:
                cur = self.left[cur]
        return best

    def succ_in(self, k: int) -> Optional[int]:
        best = None
        cur = self.root
        while cur is not None:
            if cur > k:
                best = cur
                cur = self.left[cur]
            else:
                cur = self.right[cur]
        return best

    def subtree_keys(self, k: int) -> set[int]:
        out = set()
        stack = [k]
        while stack:
            c = stack.pop()
            out.add(c)
            for ch in (self.left[c], self.right[c]):
                if ch is not None:
                    stack.append(ch)
        return out

    def copy(self) -> "BSTree":
        return BSTree(self.root, dict(self.left), dict(self.right))

    def __eq__(self, other) -> bool:
        return (isinstance(other, BSTree) and self.root == other.root
                and self.left == other.left and self.right == other.right)

    def __hash__(self):
        raise TypeError("unhashable")

    def __repr__(self):
        return f"BSTree({to_paren(self)})"


def to_paren(tree: BSTree) -> str:
    """Compact parenthesized form: '(' left ',' key ',' right ')' with '.'
    for an empty child; whole empty tree is '.'."""

    def rec(k: Optional[int]) -> str:
        if k is None:
            return "."
        return f"({rec(tree.left[k])},{k},{rec(tree.right[k])})"

    return rec(tree.root)


def from_paren(text: str) -> BSTree:
    pos = 0

    def parse() -> Optional[int]:
        nonlocal pos
        if text[pos] == ".":
            pos += 1
            return None
        if text[pos] != "(":
            raise ValueError(f"bad tree text at {pos}")
        pos += 1
        lk = parse()
        assert text[pos] == ","
        pos += 1
        j = pos
        while text[j] in "-0123456789":
            j += 1
        key = int(text[pos:j])
        pos = j
        assert text[pos] == ","
        pos += 1
        rk = parse()
        assert text[pos] == ")"
        pos += 1
        t.left[key] = lk
        t.right[key] = rk
        return key

    t = BSTree()
    text = text.strip()
    t.root = parse()
    if pos != len(text):
        raise ValueError("trailing tree text")
    if not t.is_search_ordered():
        raise ValueError("parsed tree is not search-ordered")
    return t


@dataclass(frozen=True)
class Reconfiguration:
    """One step: replace root subtree tau by the tree tau_prime."""

    tau: frozenset[int]
    tau_prime: BSTree
    key: int
    kind: OpKind

    @property
    def touched(self) -> set[int]:
        return set(self.tau) | self.tau_prime.nodes

    @property
    def cost(self) -> int:
        return max(len(self.tau), len(self.tau_prime))


@dataclass
class Execution:
    """Initial tree plus the per-step subtree replacements."""

    initial: BSTree
    steps: list[Reconfiguration] = field(default_factory=list)
    final_tree: Optional[BSTree] = None

    @property
    def cost(self) -> int:
        return sum(s.cost for s in self.steps)

    @property
    def touched_cost(self) -> int:
        return sum(len(s.touched) for s in self.steps)

    def sequence(self, universe: Optional[int] = None) -> UpdateSequence:
        keys = np.array([s.key for s in self.steps], dtype=np.int64)
        kinds = np.array([int(s.kind) for s in self.steps], dtype=np.int8)
        if universe is None:
            hi = [int(keys.max())] if len(keys) else []
            hi += [max(self.initial.nodes)] if self.initial.nodes else []
            universe = max(hi) if hi else 1
        return UpdateSequence(keys, kinds, universe)


def _pendants(T: BSTree, tau: set[int]):
    """Hanging subtree roots below tau, with their actual key ranges."""
    out = []
    for k in tau:
        for ch in (T.left[k], T.right[k]):
            if ch is not None and ch not in tau:
                keys = T.subtree_keys(ch)
                out.append((ch, min(keys), max(keys)))
    return out


def _free_slots(shape: BSTree):
    """Empty child slots of a replacement tree as (node, side, lo, hi)."""
    slots = []
    if shape.root is None:
        slots.append((None, "root", _NEG_INF, _POS_INF))
        return slots
    stack = [(shape.root, _NEG_INF, _POS_INF)]
    while stack:
        k, lo, hi = stack.pop()
        if shape.left[k] is None:
            slots.append((k, "left", lo, k))
        else:
            stack.append((shape.left[k], lo, k))
        if shape.right[k] is None:
            slots.append((k, "right", k, hi))
        else:
            stack.append((shape.right[k], k, hi))
    return slots


def validate_reconfiguration(T: BSTree, r: Reconfiguration) -> tuple[BSTree, int]:
    """Check a step against the current tree and apply it.

    Returns (new tree, step cost).  Raises a distinctly-named error when tau
    misses the root, is disconnected, the node sets mismatch the operation, or
    some hanging subtree cannot be re-linked under tau_prime.
    """
    tau = set(r.tau)
    shape = r.tau_prime
    new_keys = shape.nodes
    s, kind = r.key, r.kind

    if not tau <= T.nodes:
        raise SetRelationError(f"tau contains keys missing from the tree: "
                               f"{sorted(tau - T.nodes)[:5]}")
    if not shape.is_search_ordered():
        raise SetRelationError("replacement tree is not search-ordered")
    if kind == OpKind.ACCESS:
        if s not in tau:
            raise SetRelationError(f"access of {s} outside tau")
        if new_keys != tau:
            raise SetRelationError("access must keep the key set")
    elif kind == OpKind.INSERT:
        if s in T.nodes:
            raise SetRelationError(f"insert of {s} already in the tree")
        if new_keys != tau | {s}:
            raise SetRelationError("insert must add exactly the new key")
    else:
        if s not in tau:
            raise SetRelationError(f"delete of {s} outside tau")
        if new_keys != tau - {s}:
            raise SetRelationError("delete must drop exactly the key")

    if tau:
        if T.root not in tau:
            raise RootNotInTauError(f"tau misses the root {T.root}")
        reach = set()
        stack = [T.root]
        while stack:
            k = stack.pop()
            reach.add(k)
            for ch in (T.left[k], T.right[k]):
                if ch is not None and ch in tau and ch not in reach:
                    stack.append(ch)
        if reach != tau:
            raise DisconnectedTauError(
                f"tau not connected: unreachable {sorted(tau - reach)[:5]}")
        pend = _pendants(T, tau)
    elif kind != OpKind.INSERT:
        raise RootNotInTauError("only an insert may replace an empty tau")
    else:
        pend = ([(T.root, min(T.nodes), max(T.nodes))]
                if T.root is not None else [])

    slots = _free_slots(shape)
    taken: dict[int, tuple] = {}
    assign = []
    for (root_k, lo, hi) in pend:
        fit = [i for i, (_, _, slo, shi) in enumerate(slots)
               if slo < lo and hi < shi]
        if not fit:
            raise PendantLinkError(
                f"hanging subtree with keys [{lo}, {hi}] fits no slot")
        if len(fit) > 1:
            raise PendantLinkError(
                f"hanging subtree with keys [{lo}, {hi}] fits {len(fit)} slots")
        i = fit[0]
        if i in taken:
            raise PendantLinkError(
                f"two hanging subtrees compete for the slot under "
                f"{slots[i][0]}")
        taken[i] = (root_k,)
        assign.append((i, root_k))

    out = T.copy()
    for k in tau:
        del out.left[k]
        del out.right[k]
    for k in new_keys:
        out.left[k] = shape.left[k]
        out.right[k] = shape.right[k]
    for i, root_k in assign:
        node, side, _, _ = slots[i]
        if side == "root":
            pass  # pendант becomes the whole tree below
        elif side == "left":
            out.left[node] = root_k
        else:
            out.right[node] = root_k
    if shape.root is not None:
        out.root = shape.root
    else:
        out.root = assign[0][1] if assign else None
    return out, max(len(tau), len(new_keys))


def _restricted_shape(T: BSTree, tau: set[int]) -> BSTree:
    """Shape induced on a root-connected tau by dropping non-members."""
    shape = BSTree()
    for k in tau:
        shape.left[k] = T.left[k] if T.left[k] in tau else None
        shape.right[k] = T.right[k] if T.right[k] in tau else None
    shape.root = T.root if T.root in tau else None
    return shape


def _rotate_up(shape: BSTree, k: int) -> None:
    """Rotate k one level toward the root of the shape."""
    par = shape.parent_map()
    p = par[k]
    if p is None:
        return
    if shape.left[p] == k:
        shape.left[p] = shape.right[k]
        shape.right[k] = p
    else:
        shape.right[p] = shape.left[k]
        shape.left[k] = p
    g = par[p]
    if g is None:
        shape.root = k
    elif shape.left[g] == p:
        shape.left[g] = k
    else:
        shape.right[g] = k


def insert_via_neighbor(T: BSTree, tau: Iterable[int], y: int,
                        target: Optional[BSTree] = None) -> Reconfiguration:
    """Insert step splicing y next to its tree neighbor inside tau.

    Requires y's tree predecessor or successor in tau, or y outside the
    current key range.  y is attached as the neighbor's inner child and
    rotated to the replacement's root unless an explicit target shape is
    given.
    """
    tau = set(tau)
    if y in T.nodes:
        raise SequenceError(f"insert of {y} already in the tree")
    pre, suc = T.pred_in(y), T.succ_in(y)
    extreme = pre is None or suc is None
    if not extreme and pre not in tau and suc not in tau:
        raise NeighborMissingError(
            f"neither neighbor of {y} ({pre}, {suc}) is in tau")
    if target is not None:
        shape = target.copy()
    else:
        shape = _restricted_shape(T, tau)
        if pre is not None and pre in tau:
            shape.left[y] = None
            shape.right[y] = shape.right[pre]
            shape.right[pre] = y
        elif suc is not None and suc in tau:
            shape.right[y] = None
            shape.left[y] = shape.left[suc]
            shape.left[suc] = y
        else:
            # new extreme: start y at the top
            shape.left[y] = None
            shape.right[y] = None
            if shape.root is not None:
                if shape.root < y:
                    shape.left[y] = shape.root
                else:
                    shape.right[y] = shape.root
            shape.root = y
        while shape.root != y:
            _rotate_up(shape, y)
    return Reconfiguration(frozenset(tau), shape, y, OpKind.INSERT)


def delete_via_neighbor(T: BSTree, tau: Iterable[int], y: int,
                        target: Optional[BSTree] = None) -> Reconfiguration:
    """Delete step rotating y down to its tau neighbor and splicing it out.

    Requires y in tau and (for a non-extreme y) a tree neighbor in tau.  When
    y is already its predecessor's right child with no left child, the splice
    is the single pointer change moving y's right child up.
    """
    tau = set(tau)
    if y not in tau or y not in T.nodes:
        raise SequenceError(f"delete of {y} outside tau or tree")
    pre, suc = T.pred_in(y), T.succ_in(y)
    extreme = pre is None or suc is None
    if not extreme and pre not in tau and suc not in tau:
        raise NeighborMissingError(
            f"neither neighbor of {y} ({pre}, {suc}) is in tau")
    if target is not None:
        shape = target.copy()
    else:
        shape = _restricted_shape(T, tau)
        # rotate a child of y up until y holds at most one child in-shape
        while shape.left[y] is not None and shape.right[y] is not None:
            _rotate_up(shape, shape.left[y])
        child = shape.left[y] if shape.left[y] is not None else shape.right[y]
        par = shape.parent_map()[y]
        if par is None:
            shape.root = child
        elif shape.left[par] == y:
            shape.left[par] = child
        else:
            shape.right[par] = child
        del shape.left[y]
        del shape.right[y]
    return Reconfiguration(frozenset(tau), shape, y, OpKind.DELETE)


def tree_to_geometry(E: Execution, universe: Optional[int] = None) -> PointSet:
    """Replay an execution, validating every step, and record which key is
    touched at which time."""
    T = E.initial.copy()
    if not T.is_search_ordered():
        raise SetRelationError("initial tree is not search-ordered")
    seq = E.sequence(universe)
    pts: list[Point] = []
    for t, step in enumerate(E.steps, start=1):
        try:
            T, _ = validate_reconfiguration(T, step)
        except ReconfigurationError as e:
            raise type(e)(f"step {t}: {e}") from None
        for x in sorted(step.touched):
            pts.append(Point(x, t, PointKind(int(step.kind))
                             if x == step.key else PointKind.TOUCHED))
    E.final_tree = T
    return PointSet.from_points(pts, seq.universe, len(E.steps), source=seq)
