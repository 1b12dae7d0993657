"""Hot inner loops: greedy row stepping, satisfiedness sweep, pattern scans.

Every kernel is written once against the numpy array subset numba understands.
When numba is importable and ``GEOBST_DISABLE_NUMBA`` is unset, the functions
below are replaced by their ``@njit`` versions at import time; otherwise the
plain-Python/numpy path runs.  ``BACKEND`` reports which one is active and
``benchmarks/kernel_bench.py`` compares the two.
"""

from __future__ import annotations

import os

import numpy as np

K_ACCESS = 0
K_INSERT = 1
K_DELETE = 2
K_TOUCH = 3

_BIG = np.int64(1) << np.int64(60)

_env = os.environ.get("GEOBST_DISABLE_NUMBA", "").strip().lower()
_DISABLED = _env not in ("", "0", "false", "no")
try:
    from numba import njit  # noqa: F401
    _HAVE_NUMBA = True
except ImportError:
    _HAVE_NUMBA = False

JIT_ENABLED = _HAVE_NUMBA and not _DISABLED
BACKEND = "numba" if JIT_ENABLED else "python"


# --- max segment tree over columns 1..n --------------------------------------

def _seg_size(n):
    sz = 1
    while sz < n + 2:
        sz *= 2
    return sz


def _seg_build(leaves, sz):
    tree = np.zeros(2 * sz, dtype=np.int64)
    tree[sz:sz + leaves.shape[0]] = leaves
    for i in range(sz - 1, 0, -1):
        a = tree[2 * i]
        b = tree[2 * i + 1]
        tree[i] = a if a >= b else b
    return tree


def _seg_set(tree, sz, i, v):
    pos = sz + i
    tree[pos] = v
    pos //= 2
    while pos >= 1:
        a = tree[2 * pos]
        b = tree[2 * pos + 1]
        m = a if a >= b else b
        if tree[pos] == m:
            break
        tree[pos] = m
        pos //= 2


def _seg_prev_ge(tree, sz, i, thresh):
    """Largest index j <= i with value >= thresh, or 0."""
    if i < 1:
        return 0
    if i >= sz:
        i = sz - 1
    pos = sz + i
    if tree[pos] >= thresh:
        return i
    while pos > 1:
        if pos & 1:
            if tree[pos - 1] >= thresh:
                pos -= 1
                while pos < sz:
                    if tree[2 * pos + 1] >= thresh:
                        pos = 2 * pos + 1
                    else:
                        pos = 2 * pos
                return pos - sz
        pos //= 2
    return 0


def _seg_next_ge(tree, sz, i, thresh):
    """Smallest index j >= i with value >= thresh, or 0."""
    if i < 1:
        i = 1
    if i >= sz:
        return 0
    pos = sz + i
    if tree[pos] >= thresh:
        return i
    while pos > 1:
        if (pos & 1) == 0:
            if tree[pos + 1] >= thresh:
                pos += 1
                while pos < sz:
                    if tree[2 * pos] >= thresh:
                        pos = 2 * pos
                    else:
                        pos = 2 * pos + 1
                return pos - sz
        pos //= 2
    return 0


# --- stair scan ---------------------------------------------------------------

def _stair_scan(touch_tree, sz, last_row, last_kind, ins_row,
                n, anchor, t, x0, k0, anchor_is_input, buf):
    """Fill buf with the columns of the stair of cell (anchor, t).

    The stair holds the anchor plus every strictly-earlier partner point whose
    closed rectangle with the anchor contains no qualifying third point and
    whose column stays valid up to row t while the anchor's column was already
    valid at the partner's row.  The input point of the current row blocks a
    rectangle unless it is an insert; a delete point lying exactly on a
    partner's row does not block that partner.
    """
    if anchor_is_input and k0 == K_INSERT:
        buf[0] = anchor
        return 1
    a_ins = ins_row[anchor]
    cnt = 0
    buf[cnt] = anchor
    cnt += 1
    lo_lim = 1
    hi_lim = n
    if (not anchor_is_input) and k0 != K_INSERT:
        if anchor < x0:
            hi_lim = x0 - 1
        else:
            lo_lim = x0 + 1
    for direction in range(2):
        best = last_row[anchor]
        onlydel = best > 0 and last_kind[anchor] == K_DELETE
        cur = anchor
        while True:
            thresh = best if (onlydel and best > 0) else best + 1
            if thresh < 1:
                thresh = 1
            if direction == 0:
                if cur <= lo_lim:
                    break
                nxt = _seg_prev_ge(touch_tree, sz, cur - 1, thresh)
                if nxt == 0 or nxt < lo_lim:
                    break
            else:
                if cur >= hi_lim:
                    break
                nxt = _seg_next_ge(touch_tree, sz, cur + 1, thresh)
                if nxt == 0 or nxt > hi_lim:
                    break
            r = last_row[nxt]
            kk = last_kind[nxt]
            if kk != K_DELETE and a_ins <= r:
                buf[cnt] = nxt
                cnt += 1
            if r > best:
                best = r
                onlydel = kk == K_DELETE
            elif r == best and kk != K_DELETE:
                onlydel = False
            cur = nxt
    return cnt


# --- greedy execution ---------------------------------------------------------

def greedy_core(n, keys, kinds, live0):
    """Run the online greedy toucher over the whole sequence.

    Returns (ts, xs, ks, count, err, err_row); err 0 means success, 1 insert
    of a present key, 2 access/delete of an absent key.
    """
    m = keys.shape[0]
    sz = _seg_size(n)
    touch_tree = np.zeros(2 * sz, dtype=np.int64)
    live_leaves = np.zeros(sz, dtype=np.int64)
    for c in range(1, n + 1):
        if live0[c]:
            live_leaves[c] = 1
    live_tree = _seg_build(live_leaves, sz)
    live = live0.copy()
    last_row = np.zeros(n + 1, dtype=np.int64)
    last_kind = np.zeros(n + 1, dtype=np.int8)
    ins_row = np.zeros(n + 1, dtype=np.int64)
    stamp = np.zeros(n + 1, dtype=np.int64)
    buf0 = np.empty(n + 2, dtype=np.int64)
    bufp = np.empty(n + 2, dtype=np.int64)
    bufs = np.empty(n + 2, dtype=np.int64)
    merged = np.empty(n + 2, dtype=np.int64)

    cap = 4 * m + 16
    out_t = np.empty(cap, dtype=np.int64)
    out_x = np.empty(cap, dtype=np.int64)
    out_k = np.empty(cap, dtype=np.int8)
    cnt = 0

    for t in range(1, m + 1):
        x0 = keys[t - 1]
        k0 = kinds[t - 1]
        if k0 == K_INSERT:
            if live[x0]:
                return out_t, out_x, out_k, cnt, 1, t
        else:
            if not live[x0]:
                return out_t, out_x, out_k, cnt, 2, t

        n0 = _stair_scan(touch_tree, sz, last_row, last_kind, ins_row,
                         n, x0, t, x0, k0, True, buf0)
        take_p = 0
        take_s = 0
        np_cnt = 0
        ns_cnt = 0
        if k0 != K_ACCESS:
            pred = _seg_prev_ge(live_tree, sz, x0 - 1, 1)
            succ = _seg_next_ge(live_tree, sz, x0 + 1, 1)
            if succ > n:
                succ = 0
            if pred > 0 and succ > 0:
                np_cnt = _stair_scan(touch_tree, sz, last_row, last_kind,
                                     ins_row, n, pred, t, x0, k0, False, bufp)
                ns_cnt = _stair_scan(touch_tree, sz, last_row, last_kind,
                                     ins_row, n, succ, t, x0, k0, False, bufs)
                for i in range(n0):
                    stamp[buf0[i]] = t
                extra_p = 0
                for i in range(np_cnt):
                    if stamp[bufp[i]] != t:
                        extra_p += 1
                extra_s = 0
                for i in range(ns_cnt):
                    if stamp[bufs[i]] != t:
                        extra_s += 1
                if extra_p <= extra_s:
                    take_p = 1
                else:
                    take_s = 1

        w = 0
        for i in range(n0):
            merged[w] = buf0[i]
            stamp[buf0[i]] = t
            w += 1
        if take_p == 1:
            for i in range(np_cnt):
                c = bufp[i]
                if stamp[c] != t:
                    stamp[c] = t
                    merged[w] = c
                    w += 1
        elif take_s == 1:
            for i in range(ns_cnt):
                c = bufs[i]
                if stamp[c] != t:
                    stamp[c] = t
                    merged[w] = c
                    w += 1
        row = np.sort(merged[:w])

        if cnt + w > cap:
            new_cap = cap * 2 + w
            nt = np.empty(new_cap, dtype=np.int64)
            nx = np.empty(new_cap, dtype=np.int64)
            nk = np.empty(new_cap, dtype=np.int8)
            nt[:cnt] = out_t[:cnt]
            nx[:cnt] = out_x[:cnt]
            nk[:cnt] = out_k[:cnt]
            out_t, out_x, out_k, cap = nt, nx, nk, new_cap

        for i in range(w):
            c = row[i]
            out_t[cnt] = t
            out_x[cnt] = c
            out_k[cnt] = k0 if c == x0 else K_TOUCH
            cnt += 1
            last_row[c] = t
            last_kind[c] = k0 if c == x0 else K_TOUCH
            _seg_set(touch_tree, sz, c, t)
        if k0 == K_INSERT:
            live[x0] = 1
            ins_row[x0] = t
            _seg_set(live_tree, sz, x0, 1)
        elif k0 == K_DELETE:
            live[x0] = 0
            _seg_set(live_tree, sz, x0, 0)

    return out_t, out_x, out_k, cnt, 0, 0


# --- satisfiedness checker ------------------------------------------------------

def checker_core(n, m, pts_t, pts_x, pts_k, live0):
    """Sweep a point set and report the first defects found.

    Output layout (int64[12]):
      [0] status: 0 ok/violations-reported, 2 invalid cell, 3 malformed row
      [1] pair violation found (0/1); [2..5] lex-min (p_t, p_x, q_t, q_x)
      [6] neighbor-condition violation found (0/1); [7..8] (u_t, u_x)
      [9..11] error detail (cell x, cell t / row) for statuses 2-3
    """
    out = np.zeros(12, dtype=np.int64)
    N = pts_t.shape[0]
    sz = _seg_size(n)
    touch_tree = np.zeros(2 * sz, dtype=np.int64)
    live_leaves = np.zeros(sz, dtype=np.int64)
    for c in range(1, n + 1):
        if live0[c]:
            live_leaves[c] = 1
    live_tree = _seg_build(live_leaves, sz)
    live = live0.copy()
    last_row = np.zeros(n + 1, dtype=np.int64)
    last_kind = np.zeros(n + 1, dtype=np.int8)
    ins_row = np.zeros(n + 1, dtype=np.int64)

    best_pair_t = _BIG
    best_pair = (np.int64(0), np.int64(0), np.int64(0), np.int64(0))
    have_pair = 0
    best_u = (np.int64(0), np.int64(0))
    have_u = 0

    i0 = 0
    for t in range(1, m + 1):
        i1 = i0
        while i1 < N and pts_t[i1] == t:
            i1 += 1
        # locate the row's single input point
        x0 = np.int64(-1)
        k0 = np.int64(K_TOUCH)
        inputs = 0
        for j in range(i0, i1):
            if pts_k[j] != K_TOUCH:
                inputs += 1
                x0 = pts_x[j]
                k0 = np.int64(pts_k[j])
        if inputs != 1:
            out[0] = 3
            out[9] = t
            return out
        # presence / validity of each cell
        for j in range(i0, i1):
            c = pts_x[j]
            kk = pts_k[j]
            bad = False
            if kk == K_INSERT:
                bad = live[c] != 0
            else:
                bad = live[c] == 0
            if bad:
                out[0] = 2
                out[9] = c
                out[10] = t
                return out
        # update points not at the live extremes must touch a neighbor
        if k0 == K_INSERT or k0 == K_DELETE:
            pred = _seg_prev_ge(live_tree, sz, x0 - 1, 1)
            succ = _seg_next_ge(live_tree, sz, x0 + 1, 1)
            if succ > n:
                succ = 0
            if pred > 0 and succ > 0:
                got = False
                for j in range(i0, i1):
                    if pts_x[j] == pred or pts_x[j] == succ:
                        got = True
                        break
                if not got and have_u == 0:
                    have_u = 1
                    best_u = (np.int64(t), x0)
        # pair condition: every point's stair below must be empty
        for j in range(i0, i1):
            c = pts_x[j]
            if c == x0 and k0 == K_INSERT:
                continue
            a_ins = ins_row[c]
            lo_lim = np.int64(1)
            hi_lim = np.int64(n)
            jj = j - 1
            if jj >= i0 and pts_x[jj] == x0 and k0 == K_INSERT:
                jj -= 1
            if jj >= i0:
                lo_lim = pts_x[jj] + 1
            jj = j + 1
            if jj < i1 and pts_x[jj] == x0 and k0 == K_INSERT:
                jj += 1
            if jj < i1:
                hi_lim = pts_x[jj] - 1
            for direction in range(2):
                best = last_row[c]
                onlydel = best > 0 and last_kind[c] == K_DELETE
                cur = c
                while True:
                    thresh = best if (onlydel and best > 0) else best + 1
                    if thresh < 1:
                        thresh = 1
                    if direction == 0:
                        if cur <= lo_lim:
                            break
                        nxt = _seg_prev_ge(touch_tree, sz, cur - 1, thresh)
                        if nxt == 0 or nxt < lo_lim:
                            break
                    else:
                        if cur >= hi_lim:
                            break
                        nxt = _seg_next_ge(touch_tree, sz, cur + 1, thresh)
                        if nxt == 0 or nxt > hi_lim:
                            break
                    r = last_row[nxt]
                    kk = last_kind[nxt]
                    if kk != K_DELETE and a_ins <= r:
                        have_pair = 1
                        cand = (r, nxt, np.int64(t), c)
                        if (cand[0] < best_pair[0]
                                or (cand[0] == best_pair[0]
                                    and (cand[1] < best_pair[1]
                                         or (cand[1] == best_pair[1]
                                             and (cand[2] < best_pair[2]
                                                  or (cand[2] == best_pair[2]
                                                      and cand[3] < best_pair[3])))))
                                or best_pair_t == _BIG):
                            best_pair = cand
                            best_pair_t = cand[0]
                    if r > best:
                        best = r
                        onlydel = kk == K_DELETE
                    elif r == best and kk != K_DELETE:
                        onlydel = False
                    cur = nxt
        # commit the row
        for j in range(i0, i1):
            c = pts_x[j]
            last_row[c] = t
            last_kind[c] = pts_k[j]
            _seg_set(touch_tree, sz, c, t)
        if k0 == K_INSERT:
            live[x0] = 1
            ins_row[x0] = t
            _seg_set(live_tree, sz, x0, 1)
        elif k0 == K_DELETE:
            live[x0] = 0
            _seg_set(live_tree, sz, x0, 0)
        i0 = i1

    out[0] = 0
    out[1] = have_pair
    if have_pair:
        out[2] = best_pair[0]
        out[3] = best_pair[1]
        out[4] = best_pair[2]
        out[5] = best_pair[3]
    out[6] = have_u
    if have_u:
        out[7] = best_u[0]
        out[8] = best_u[1]
    return out


# --- pattern scans --------------------------------------------------------------

def p5_scan(u, v, ones_r, ones_c):
    """Five-column zigzag over two rows: ones at row pattern 1,2,1,2,1.

    Returns (found, r1, r2, c1, c2, c3, c4, c5).
    """
    nxt = np.zeros((u + 1, v + 2), dtype=np.int32)
    has_row = np.zeros(u + 1, dtype=np.uint8)
    for i in range(ones_r.shape[0]):
        nxt[ones_r[i], ones_c[i]] = ones_c[i]
        has_row[ones_r[i]] = 1
    for r in range(1, u + 1):
        if has_row[r]:
            for c in range(v, 0, -1):
                if nxt[r, c] == 0:
                    nxt[r, c] = nxt[r, c + 1]
    z = np.int64(0)
    for r1 in range(1, u + 1):
        if not has_row[r1]:
            continue
        c1 = nxt[r1, 1]
        if c1 == 0:
            continue
        for r2 in range(r1 + 1, u + 1):
            if not has_row[r2]:
                continue
            c2 = nxt[r2, c1 + 1]
            if c2 == 0:
                continue
            c3 = nxt[r1, c2 + 1]
            if c3 == 0:
                continue
            c4 = nxt[r2, c3 + 1]
            if c4 == 0:
                continue
            c5 = nxt[r1, c4 + 1]
            if c5 == 0:
                continue
            return (np.int64(1), np.int64(r1), np.int64(r2), np.int64(c1),
                    np.int64(c2), np.int64(c3), np.int64(c4), np.int64(c5))
    return (z, z, z, z, z, z, z, z)


def p4_scan(u, v, ones_r, ones_c):
    """Four ones on four distinct rows with column order row1,row3,row2,row4.

    ``ones_r``/``ones_c`` must be sorted by (column, row).  Returns
    (found, rho1, rho2, rho3, rho4, c1, c2, c3, c4).
    """
    BIG = _BIG
    m1 = BIG
    m1c = np.int64(0)
    pair2 = np.full(u + 2, BIG, dtype=np.int64)
    pair2_c1 = np.zeros(u + 2, dtype=np.int64)
    pair2_c2 = np.zeros(u + 2, dtype=np.int64)
    m3 = BIG
    m3_rho1 = np.int64(0)
    m3_rc = np.int64(0)
    m3_c1 = np.int64(0)
    m3_c2 = np.int64(0)
    m3_c3 = np.int64(0)
    z = np.int64(0)
    N = ones_r.shape[0]
    i = 0
    while i < N:
        c = ones_c[i]
        j = i
        while j < N and ones_c[j] == c:
            j += 1
        # match against state from strictly earlier columns
        new_m3 = m3
        new_rho1, new_rc = m3_rho1, m3_rc
        new_c1, new_c2, new_c3 = m3_c1, m3_c2, m3_c3
        for k in range(i, j):
            r = ones_r[k]
            if m3 < r:
                return (np.int64(1), m3_rho1, m3_rc, m3, np.int64(r),
                        m3_c1, m3_c2, m3_c3, np.int64(c))
            for rb in range(r + 1, u + 1):
                if pair2[rb] < r:
                    if rb < new_m3:
                        new_m3 = np.int64(rb)
                        new_rho1 = pair2[rb]
                        new_rc = np.int64(r)
                        new_c1 = pair2_c1[rb]
                        new_c2 = pair2_c2[rb]
                        new_c3 = np.int64(c)
                    break
        # fold this column into the state
        col_min = BIG
        for k in range(i, j):
            r = ones_r[k]
            if m1 < r and m1 < pair2[r]:
                pair2[r] = m1
                pair2_c1[r] = m1c
                pair2_c2[r] = c
            if r < col_min:
                col_min = np.int64(r)
        if col_min < m1:
            m1 = col_min
            m1c = np.int64(c)
        m3 = new_m3
        m3_rho1, m3_rc = new_rho1, new_rc
        m3_c1, m3_c2, m3_c3 = new_c1, new_c2, new_c3
        i = j
    return (z, z, z, z, z, z, z, z, z)


_KERNEL_NAMES = ["_seg_size", "_seg_build", "_seg_set", "_seg_prev_ge", "_seg_next_ge",
                 "_stair_scan", "greedy_core", "checker_core",
                 "p5_scan", "p4_scan"]

if JIT_ENABLED:
    _dec = njit(cache=True)
    for _name in _KERNEL_NAMES:
        globals()[_name] = _dec(globals()[_name])
