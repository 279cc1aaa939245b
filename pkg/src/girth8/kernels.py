"""Inner loops for cycle detection in Gamma_F(f2, f3).

Every kernel receives the graph through three q x q int tables:
``F2[x, y] = f2(x, y)``, ``F3[x, y] = f3(x, y)`` and ``sub[a, b] = a - b``
(``add`` where needed), all on canonical element encodings.  Each search has
a numba implementation (``*_nb``) and a vectorized numpy one (``*_np``); the
public wrappers dispatch on :data:`girth8._accel.USE_NUMBA`.

Return conventions:

* ``bfs_cycle``: int64[7] ``[length, a1, a2, r1, a3, r3, r2]`` for length 6 or
  ``[4, a1, a2, r1, r2, 0, 0]``; length 0 when nothing <= cap exists.
* ``delta2``/``delta3``/``delta4``: int64 seed ``(a_1..a_k, r_1..r_k)`` or an
  empty array.
"""

from __future__ import annotations

import numpy as np

from . import _accel
from ._accel import njit

# ---------------------------------------------------------------------------
# orbit-reduced truncated BFS from the points (a, 0, 0)
# ---------------------------------------------------------------------------


@njit
def bfs_cycle_nb(F2, F3, sub, cap):
    q = F2.shape[0]
    q2 = q * q
    n = q2 * q
    out = np.zeros(7, np.int64)
    seen = np.full(n, -1, np.int32)
    par = np.zeros(n, np.int32)
    # depth 2 from every root: a repeated point closes a 4-cycle
    for a in range(q):
        for r in range(q):
            s = F2[a, r]
            t = F3[a, r]
            for x in range(q):
                if x == a:
                    continue
                pid = x * q2 + sub[F2[x, r], s] * q + sub[F3[x, r], t]
                if seen[pid] == a:
                    out[0] = 4
                    out[1] = a
                    out[2] = x
                    out[3] = par[pid]
                    out[4] = r
                    return out
                seen[pid] = a
                par[pid] = r
    if cap < 6:
        return out
    seen[:] = -1
    # depth 3: a repeated line closes a 6-cycle (no 4-cycles remain)
    for a in range(q):
        for r in range(q):
            s = F2[a, r]
            t = F3[a, r]
            for x in range(q):
                if x == a:
                    continue
                b = sub[F2[x, r], s]
                c = sub[F3[x, r], t]
                for r2 in range(q):
                    if r2 == r:
                        continue
                    lid = r2 * q2 + sub[F2[x, r2], b] * q + sub[F3[x, r2], c]
                    if seen[lid] == a:
                        prev = par[lid]
                        out[0] = 6
                        out[1] = a
                        out[2] = prev // q
                        out[3] = prev % q
                        out[4] = x
                        out[5] = r
                        out[6] = r2
                        return out
                    seen[lid] = a
                    par[lid] = x * q + r
    return out


def bfs_cycle_np(F2, F3, sub, cap):
    q = F2.shape[0]
    q2 = q * q
    out = np.zeros(7, np.int64)
    r = np.arange(q)
    for a in range(q):
        xs = np.array([x for x in range(q) if x != a])
        s = F2[a, r]
        t = F3[a, r]
        # rows: parent line r, columns: x
        pid = xs[None, :] * q2 + sub[F2[xs[None, :], r[:, None]], s[:, None]] * q \
            + sub[F3[xs[None, :], r[:, None]], t[:, None]]
        flat = pid.ravel()
        _, first, counts = np.unique(flat, return_index=True, return_counts=True)
        if np.any(counts > 1):
            # earliest second occurrence in scan order (r major, x minor)
            order = np.argsort(flat, kind="stable")
            sf = flat[order]
            dup = np.flatnonzero(sf[1:] == sf[:-1]) + 1
            hit = int(order[dup].min())
            r_hit, xi = divmod(hit, len(xs))
            x = int(xs[xi])
            prev = int(np.flatnonzero(flat == flat[hit])[0]) // len(xs)
            out[:5] = (4, a, x, prev, r_hit)
            return out
    if cap < 6:
        return out
    for a in range(q):
        xs = np.array([x for x in range(q) if x != a])
        s = F2[a, r]
        t = F3[a, r]
        R, X = np.meshgrid(r, xs, indexing="ij")
        R, X = R.ravel(), X.ravel()
        B = sub[F2[X, R], s[R]]
        C = sub[F3[X, R], t[R]]
        R2 = np.broadcast_to(r[None, :], (len(R), q))
        lid = R2 * q2 + sub[F2[X[:, None], R2], B[:, None]] * q + sub[F3[X[:, None], R2], C[:, None]]
        mask = R2 != R[:, None]
        flat = np.where(mask, lid, -1).ravel()
        valid = flat >= 0
        vals = flat[valid]
        if len(np.unique(vals)) < len(vals):
            idx = np.flatnonzero(valid)
            order = np.argsort(vals, kind="stable")
            sv = vals[order]
            dup = np.flatnonzero(sv[1:] == sv[:-1]) + 1
            hit = int(idx[order[dup]].min())
            first = int(idx[np.flatnonzero(vals == flat[hit])[0]])
            row_hit, r2 = divmod(hit, q)
            row_prev = first // q
            out[:] = (6, a, X[row_prev], R[row_prev], X[row_hit], R[row_hit], r2)
            return out
    return out


def bfs_cycle(F2, F3, sub, cap):
    fn = bfs_cycle_nb if _accel.USE_NUMBA else bfs_cycle_np
    return fn(F2, F3, sub, cap)


# ---------------------------------------------------------------------------
# unrestricted BFS over an explicit adjacency list (reference oracle)
# ---------------------------------------------------------------------------


@njit
def full_bfs_girth_nb(indptr, indices, cap):
    nv = indptr.shape[0] - 1
    dist = np.full(nv, -1, np.int32)
    parent = np.full(nv, -1, np.int32)
    stamp = np.full(nv, -1, np.int32)
    queue = np.empty(nv, np.int32)
    best = 0
    maxd = cap // 2
    for root in range(nv):
        head = 0
        tail = 0
        queue[tail] = root
        tail += 1
        stamp[root] = root
        dist[root] = 0
        parent[root] = -1
        while head < tail:
            u = queue[head]
            head += 1
            if dist[u] >= maxd:
                continue
            for e in range(indptr[u], indptr[u + 1]):
                w = indices[e]
                if stamp[w] != root:
                    stamp[w] = root
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    queue[tail] = w
                    tail += 1
                elif w != parent[u]:
                    length = dist[u] + dist[w] + 1
                    if length <= cap and (best == 0 or length < best):
                        best = length
    return best


def full_bfs_girth_np(indptr, indices, cap):
    nv = len(indptr) - 1
    best = 0
    maxd = cap // 2
    for root in range(nv):
        dist = {root: 0}
        parent = {root: -1}
        frontier = [root]
        for d in range(maxd):
            nxt = []
            for u in frontier:
                for w in indices[indptr[u]:indptr[u + 1]]:
                    w = int(w)
                    if w not in dist:
                        dist[w] = d + 1
                        parent[w] = u
                        nxt.append(w)
                    elif w != parent[u]:
                        length = dist[u] + dist[w] + 1
                        if length <= cap and (best == 0 or length < best):
                            best = length
            frontier = nxt
    return best


def full_bfs_girth(indptr, indices, cap):
    fn = full_bfs_girth_nb if _accel.USE_NUMBA else full_bfs_girth_np
    return fn(indptr, indices, cap)


# ---------------------------------------------------------------------------
# Delta-functional seed searches
# ---------------------------------------------------------------------------


@njit
def delta2_nb(F2, F3, sub):
    q = F2.shape[0]
    nk = q * q
    first = np.full(nk, -1, np.int64)
    second = np.full(nk, -1, np.int64)
    keys = np.empty(q, np.int64)
    for a in range(q):
        for b in range(q):
            if b == a:
                continue
            for c in range(q):
                k = sub[F2[a, c], F2[b, c]] * q + sub[F3[a, c], F3[b, c]]
                keys[c] = k
                if first[k] < 0:
                    first[k] = c
                elif second[k] < 0:
                    second[k] = c
            found = -1
            for c in range(q):
                k = keys[c]
                if first[k] == c and second[k] >= 0:
                    found = c
                    break
            if found >= 0:
                d = second[keys[found]]
                return np.array([a, b, found, d], np.int64)
            for c in range(q):
                first[keys[c]] = -1
                second[keys[c]] = -1
    return np.empty(0, np.int64)


def delta2_np(F2, F3, sub):
    q = F2.shape[0]
    for a in range(q):
        for b in range(q):
            if b == a:
                continue
            keys = sub[F2[a], F2[b]] * q + sub[F3[a], F3[b]]
            _, inv, counts = np.unique(keys, return_inverse=True, return_counts=True)
            rep = counts[inv] > 1
            if rep.any():
                c = int(np.flatnonzero(rep)[0])
                d = int(np.flatnonzero(keys == keys[c])[1])
                return np.array([a, b, c, d], np.int64)
    return np.empty(0, np.int64)


def delta2(F2, F3, sub):
    fn = delta2_nb if _accel.USE_NUMBA else delta2_np
    return fn(F2, F3, sub)


@njit
def delta3_nb(F2, F3, sub, add):
    q = F2.shape[0]
    nk = q * q
    slots = np.full((nk, 3), -1, np.int64)
    keys = np.empty(q, np.int64)
    for a1 in range(q):
        for a2 in range(q):
            if a2 == a1:
                continue
            for a3 in range(q):
                if a3 == a1 or a3 == a2:
                    continue
                for r3 in range(q):
                    k = sub[F2[a3, r3], F2[a1, r3]] * q + sub[F3[a3, r3], F3[a1, r3]]
                    keys[r3] = k
                    for e in range(3):
                        if slots[k, e] < 0:
                            slots[k, e] = r3
                            break
                for r1 in range(q):
                    u2 = sub[F2[a1, r1], F2[a2, r1]]
                    u3 = sub[F3[a1, r1], F3[a2, r1]]
                    for r2 in range(q):
                        if r2 == r1:
                            continue
                        t2 = add[u2, sub[F2[a2, r2], F2[a3, r2]]]
                        t3 = add[u3, sub[F3[a2, r2], F3[a3, r2]]]
                        k = sub[0, t2] * q + sub[0, t3]
                        for e in range(3):
                            r3 = slots[k, e]
                            if r3 < 0:
                                break
                            if r3 != r1 and r3 != r2:
                                return np.array([a1, a2, a3, r1, r2, r3], np.int64)
                for r3 in range(q):
                    slots[keys[r3], 0] = -1
                    slots[keys[r3], 1] = -1
                    slots[keys[r3], 2] = -1
    return np.empty(0, np.int64)


def delta3_np(F2, F3, sub, add):
    q = F2.shape[0]
    neg = sub[0]
    r = np.arange(q)
    for a1 in range(q):
        for a2 in range(q):
            if a2 == a1:
                continue
            w2_12 = sub[F2[a1], F2[a2]]
            w3_12 = sub[F3[a1], F3[a2]]
            for a3 in range(q):
                if a3 == a1 or a3 == a2:
                    continue
                key3 = sub[F2[a3], F2[a1]] * q + sub[F3[a3], F3[a1]]
                t2 = add[w2_12[:, None], sub[F2[a2], F2[a3]][None, :]]
                t3 = add[w3_12[:, None], sub[F3[a2], F3[a3]][None, :]]
                need = neg[t2] * q + neg[t3]          # [r1, r2]
                # match[r1, r2, r3]
                match = need[:, :, None] == key3[None, None, :]
                match &= (r[:, None, None] != r[None, :, None])
                match &= (r[None, None, :] != r[:, None, None]) & (r[None, None, :] != r[None, :, None])
                hits = np.argwhere(match)
                if len(hits):
                    r1, r2, r3 = hits[0]
                    return np.array([a1, a2, a3, r1, r2, r3], np.int64)
    return np.empty(0, np.int64)


def delta3(F2, F3, sub, add):
    fn = delta3_nb if _accel.USE_NUMBA else delta3_np
    return fn(F2, F3, sub, add)


@njit
def delta4_nb(F2, F3, sub, add):
    q = F2.shape[0]
    nk = q * q
    npairs = q * q
    counts = np.zeros(nk + 1, np.int64)
    pair_key = np.empty(npairs, np.int64)
    bucket = np.empty(npairs, np.int64)
    fill = np.zeros(nk, np.int64)
    for a1 in range(q):
        for a2 in range(q):
            if a2 == a1:
                continue
            for a3 in range(q):
                if a3 == a2:
                    continue
                for a4 in range(q):
                    if a4 == a3 or a4 == a1:
                        continue
                    counts[:] = 0
                    for r3 in range(q):
                        w2 = sub[F2[a3, r3], F2[a4, r3]]
                        w3 = sub[F3[a3, r3], F3[a4, r3]]
                        for r4 in range(q):
                            idx = r3 * q + r4
                            if r4 == r3:
                                pair_key[idx] = -1
                                continue
                            k = add[w2, sub[F2[a4, r4], F2[a1, r4]]] * q \
                                + add[w3, sub[F3[a4, r4], F3[a1, r4]]]
                            pair_key[idx] = k
                            counts[k + 1] += 1
                    for k in range(nk):
                        counts[k + 1] += counts[k]
                    fill[:] = 0
                    for idx in range(npairs):
                        k = pair_key[idx]
                        if k >= 0:
                            bucket[counts[k] + fill[k]] = idx
                            fill[k] += 1
                    for r1 in range(q):
                        u2 = sub[F2[a1, r1], F2[a2, r1]]
                        u3 = sub[F3[a1, r1], F3[a2, r1]]
                        for r2 in range(q):
                            if r2 == r1:
                                continue
                            t2 = add[u2, sub[F2[a2, r2], F2[a3, r2]]]
                            t3 = add[u3, sub[F3[a2, r2], F3[a3, r2]]]
                            k = sub[0, t2] * q + sub[0, t3]
                            for e in range(counts[k], counts[k + 1]):
                                idx = bucket[e]
                                r3 = idx // q
                                r4 = idx % q
                                if r3 != r2 and r4 != r1:
                                    return np.array([a1, a2, a3, a4, r1, r2, r3, r4], np.int64)
    return np.empty(0, np.int64)


def delta4_np(F2, F3, sub, add):
    q = F2.shape[0]
    neg = sub[0]
    r = np.arange(q)
    for a1 in range(q):
        for a2 in range(q):
            if a2 == a1:
                continue
            u2 = sub[F2[a1], F2[a2]]
            u3 = sub[F3[a1], F3[a2]]
            for a3 in range(q):
                if a3 == a2:
                    continue
                left = neg[add[u2[:, None], sub[F2[a2], F2[a3]][None, :]]] * q \
                    + neg[add[u3[:, None], sub[F3[a2], F3[a3]][None, :]]]   # [r1, r2]
                for a4 in range(q):
                    if a4 == a3 or a4 == a1:
                        continue
                    right = add[sub[F2[a3], F2[a4]][:, None], sub[F2[a4], F2[a1]][None, :]] * q \
                        + add[sub[F3[a3], F3[a4]][:, None], sub[F3[a4], F3[a1]][None, :]]  # [r3, r4]
                    right = np.where(r[:, None] != r[None, :], right, -1)
                    rk = right.ravel()
                    order = np.argsort(rk, kind="stable")
                    srt = rk[order]
                    lo = np.searchsorted(srt, left.ravel(), "left")
                    hi = np.searchsorted(srt, left.ravel(), "right")
                    cand = np.flatnonzero((hi > lo) & (r[:, None] != r[None, :]).ravel())
                    for li in cand:
                        r1, r2 = divmod(int(li), q)
                        for e in range(lo[li], hi[li]):
                            r3, r4 = divmod(int(order[e]), q)
                            if r3 != r2 and r4 != r1:
                                return np.array([a1, a2, a3, a4, r1, r2, r3, r4], np.int64)
    return np.empty(0, np.int64)


def delta4(F2, F3, sub, add):
    fn = delta4_nb if _accel.USE_NUMBA else delta4_np
    return fn(F2, F3, sub, add)
