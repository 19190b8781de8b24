"""Numba kernels for the hot community-state and tracker loops.

All state lives in flat numpy arrays owned by the Python-level classes; the
kernels mutate them in place and return evaluation counts so the callers can
decide whether a scan is counted (algorithm queries) or not (audits).

Layout: per-vertex community-adjacency entries for vertex u occupy
eta_comm/eta_w/eta_cnt[adj_start[u] : adj_start[u] + eta_len[u]] (capacity
d_u, sorted by community id, communities != labels[u] only). The
own-community sums live in own_s/own_cnt. eta_cnt counts neighbors per
community, so entry removal is exact integer arithmetic even with float
weights.
"""

from __future__ import annotations

import numpy as np
from numba import njit

JIT = dict(cache=True, nogil=True)


@njit(**JIT)
def _eta_find(eta_comm, lo, length, comm):
    """Binary-search a sorted eta slice; returns local index or -1."""
    a, b = 0, length
    while a < b:
        mid = (a + b) // 2
        c = eta_comm[lo + mid]
        if c == comm:
            return mid
        if c < comm:
            a = mid + 1
        else:
            b = mid
    return -1


@njit(**JIT)
def delta_value(
    adj_start, strength, W, labels, sigma, own_s, eta_comm, eta_w, eta_len, u, alpha
):
    """Modularity gain of moving u into community alpha (0 for its own)."""
    lu = labels[u]
    if alpha == lu:
        return 0.0
    lo = adj_start[u]
    pos = _eta_find(eta_comm, lo, eta_len[u], alpha)
    s_ua = eta_w[lo + pos] if pos >= 0 else 0.0
    su = strength[u]
    return (s_ua - own_s[u]) / W - su * (sigma[alpha] - sigma[lu] + su) / (2.0 * W * W)


@njit(**JIT)
def is_good(
    adj_start, strength, W, labels, sigma, own_s, own_cnt,
    eta_comm, eta_w, eta_len, u,
):
    """Early-exit scan of u's neighboring communities in ascending id order.

    Returns (found_positive, evaluations). The own community participates in
    the scan (gain 0) whenever a neighbor shares it.
    """
    lu = labels[u]
    lo = adj_start[u]
    length = eta_len[u]
    su = strength[u]
    sig_lu = sigma[lu]
    own = own_s[u]
    own_pending = own_cnt[u] > 0
    evals = 0
    for i in range(length):
        a = eta_comm[lo + i]
        if own_pending and lu < a:
            evals += 1
            own_pending = False
        evals += 1
        d = (eta_w[lo + i] - own) / W - su * (sigma[a] - sig_lu + su) / (2.0 * W * W)
        if d > 0.0:
            return True, evals
    if own_pending:
        evals += 1
    return False, evals


@njit(**JIT)
def best_move(
    adj_start, strength, W, labels, sigma, own_s, own_cnt,
    eta_comm, eta_w, eta_len, u,
):
    """Full scan over u's neighboring communities.

    Returns (best_comm, best_delta, evaluations); best_comm is -1 when u has
    no neighboring community. Ties break toward the smallest community id
    because the scan is ascending and requires a strict improvement.
    """
    lu = labels[u]
    lo = adj_start[u]
    length = eta_len[u]
    su = strength[u]
    sig_lu = sigma[lu]
    own = own_s[u]
    own_pending = own_cnt[u] > 0
    evals = 0
    best_a = np.int64(-1)
    best_d = -np.inf
    for i in range(length):
        a = eta_comm[lo + i]
        if own_pending and lu < a:
            evals += 1
            if 0.0 > best_d:
                best_d = 0.0
                best_a = lu
            own_pending = False
        evals += 1
        d = (eta_w[lo + i] - own) / W - su * (sigma[a] - sig_lu + su) / (2.0 * W * W)
        if d > best_d:
            best_d = d
            best_a = a
    if own_pending:
        evals += 1
        if 0.0 > best_d:
            best_d = 0.0
            best_a = lu
    if best_a < 0:
        return np.int64(-1), 0.0, evals
    return best_a, best_d, evals


@njit(**JIT)
def apply_move(
    adj_start, adj_v, adj_w, strength, labels, sigma, own_s, own_cnt,
    eta_comm, eta_w, eta_cnt, eta_len, cnt_buckets, u, beta, cur_max,
    track_max,
):
    """Move u into community beta, updating sigma and all affected eta rows.

    cnt_buckets[c] holds how many vertices currently have candidate count c;
    only u and its neighbors can change, so their buckets are adjusted in
    place. Returns the new exact maximum candidate count. track_max=False
    skips the bucket accounting for callers that never read the maximum.
    """
    alpha = labels[u]
    su = strength[u]
    sigma[alpha] -= su
    sigma[beta] += su
    m = cur_max
    pre_u = eta_len[u] + (1 if own_cnt[u] > 0 else 0)

    lo = adj_start[u]
    length = eta_len[u]
    pos = _eta_find(eta_comm, lo, length, beta)
    new_own_s = eta_w[lo + pos]
    new_own_cnt = eta_cnt[lo + pos]
    for i in range(lo + pos, lo + length - 1):
        eta_comm[i] = eta_comm[i + 1]
        eta_w[i] = eta_w[i + 1]
        eta_cnt[i] = eta_cnt[i + 1]
    length -= 1
    if own_cnt[u] > 0:
        ins = 0
        while ins < length and eta_comm[lo + ins] < alpha:
            ins += 1
        for i in range(lo + length, lo + ins, -1):
            eta_comm[i] = eta_comm[i - 1]
            eta_w[i] = eta_w[i - 1]
            eta_cnt[i] = eta_cnt[i - 1]
        eta_comm[lo + ins] = alpha
        eta_w[lo + ins] = own_s[u]
        eta_cnt[lo + ins] = own_cnt[u]
        length += 1
    eta_len[u] = length
    own_s[u] = new_own_s
    own_cnt[u] = new_own_cnt
    labels[u] = beta
    if track_max:
        post_u = length + (1 if new_own_cnt > 0 else 0)
        if post_u != pre_u:
            cnt_buckets[pre_u] -= 1
            cnt_buckets[post_u] += 1
            if post_u > m:
                m = post_u

    for k in range(adj_start[u], adj_start[u + 1]):
        v = adj_v[k]
        w = adj_w[k]
        lv = labels[v]
        vlo = adj_start[v]
        vlen = eta_len[v]
        pre_v = vlen + (1 if own_cnt[v] > 0 else 0)
        # u left alpha: S_v^alpha loses w.
        if lv == alpha:
            own_cnt[v] -= 1
            own_s[v] = own_s[v] - w if own_cnt[v] > 0 else 0.0
        else:
            p = _eta_find(eta_comm, vlo, vlen, alpha)
            eta_cnt[vlo + p] -= 1
            if eta_cnt[vlo + p] == 0:
                for i in range(vlo + p, vlo + vlen - 1):
                    eta_comm[i] = eta_comm[i + 1]
                    eta_w[i] = eta_w[i + 1]
                    eta_cnt[i] = eta_cnt[i + 1]
                vlen -= 1
            else:
                eta_w[vlo + p] -= w
        # u joined beta: S_v^beta gains w.
        if lv == beta:
            own_cnt[v] += 1
            own_s[v] += w
        else:
            p = _eta_find(eta_comm, vlo, vlen, beta)
            if p >= 0:
                eta_w[vlo + p] += w
                eta_cnt[vlo + p] += 1
            else:
                ins = 0
                while ins < vlen and eta_comm[vlo + ins] < beta:
                    ins += 1
                for i in range(vlo + vlen, vlo + ins, -1):
                    eta_comm[i] = eta_comm[i - 1]
                    eta_w[i] = eta_w[i - 1]
                    eta_cnt[i] = eta_cnt[i - 1]
                eta_comm[vlo + ins] = beta
                eta_w[vlo + ins] = w
                eta_cnt[vlo + ins] = 1
                vlen += 1
        eta_len[v] = vlen
        if track_max:
            post_v = vlen + (1 if own_cnt[v] > 0 else 0)
            if post_v != pre_v:
                cnt_buckets[pre_v] -= 1
                cnt_buckets[post_v] += 1
                if post_v > m:
                    m = post_v

    if track_max:
        while m > 0 and cnt_buckets[m] == 0:
            m -= 1
    return m


@njit(**JIT)
def scan_for_move(
    adj_start, strength, W, labels, sigma, own_s, own_cnt,
    eta_comm, eta_w, eta_len, order, start,
):
    """Walk order[start:], full best_move scan per vertex, stop at the first
    strictly improving one.

    Returns (position in order or -1, target community, gain, g_delta count
    over all scanned vertices).
    """
    evals = 0
    for i in range(start, order.shape[0]):
        u = order[i]
        a, d, e = best_move(
            adj_start, strength, W, labels, sigma, own_s, own_cnt,
            eta_comm, eta_w, eta_len, u,
        )
        evals += e
        if d > 0.0:
            return i, a, d, evals
    return np.int64(-1), np.int64(-1), 0.0, evals


@njit(**JIT)
def goodness_range(
    adj_start, strength, W, labels, sigma, own_s, own_cnt,
    eta_comm, eta_w, eta_len, order, start, stop, good_out, evals_out,
):
    """Early-exit goodness audit of order[start:stop] (uncounted)."""
    for i in range(start, stop):
        u = order[i]
        g, e = is_good(
            adj_start, strength, W, labels, sigma, own_s, own_cnt,
            eta_comm, eta_w, eta_len, u,
        )
        good_out[i - start] = 1 if g else 0
        evals_out[i - start] = e


@njit(**JIT)
def best_move_uncached(
    adj_start, adj_v, adj_w, strength, W, labels, sigma,
    comm_buf, weight_buf, u,
):
    """best_move without the eta structure: gather neighbor communities per
    visit into scratch buffers (insertion into a sorted run list)."""
    lu = labels[u]
    su = strength[u]
    cnt = 0
    own = 0.0
    for k in range(adj_start[u], adj_start[u + 1]):
        c = labels[adj_v[k]]
        w = adj_w[k]
        if c == lu:
            own += w
            continue
        ins = 0
        while ins < cnt and comm_buf[ins] < c:
            ins += 1
        if ins < cnt and comm_buf[ins] == c:
            weight_buf[ins] += w
        else:
            for i in range(cnt, ins, -1):
                comm_buf[i] = comm_buf[i - 1]
                weight_buf[i] = weight_buf[i - 1]
            comm_buf[ins] = c
            weight_buf[ins] = w
            cnt += 1
    own_present = own > 0.0
    sig_lu = sigma[lu]
    evals = 0
    best_a = np.int64(-1)
    best_d = -np.inf
    own_pending = own_present
    for i in range(cnt):
        a = comm_buf[i]
        if own_pending and lu < a:
            evals += 1
            if 0.0 > best_d:
                best_d = 0.0
                best_a = lu
            own_pending = False
        evals += 1
        d = (weight_buf[i] - own) / W - su * (sigma[a] - sig_lu + su) / (2.0 * W * W)
        if d > best_d:
            best_d = d
            best_a = a
    if own_pending:
        evals += 1
        if 0.0 > best_d:
            best_d = 0.0
            best_a = lu
    if best_a < 0:
        return np.int64(-1), 0.0, evals
    return best_a, best_d, evals


@njit(**JIT)
def scan_for_move_uncached(
    adj_start, adj_v, adj_w, strength, W, labels, sigma,
    comm_buf, weight_buf, order, start,
):
    """scan_for_move without the eta structure (wall-time benchmark mode)."""
    evals = 0
    for i in range(start, order.shape[0]):
        u = order[i]
        a, d, e = best_move_uncached(
            adj_start, adj_v, adj_w, strength, W, labels, sigma,
            comm_buf, weight_buf, u,
        )
        evals += e
        if d > 0.0:
            return i, a, d, evals
    return np.int64(-1), np.int64(-1), 0.0, evals


@njit(**JIT)
def apply_move_uncached(adj_start, strength, labels, sigma, u, beta):
    """Move u into beta maintaining only labels and sigma."""
    sigma[labels[u]] -= strength[u]
    sigma[beta] += strength[u]
    labels[u] = beta


@njit(**JIT)
def ol_pass(
    adj_start, adj_v, adj_w, strength, W, labels, sigma, own_s, own_cnt,
    eta_comm, eta_w, eta_cnt, eta_len, cnt_buckets, order, cur_max,
    out_pos, out_u, out_target, out_evals, out_gain,
):
    """One full sequential pass: repeat scan_for_move + apply_move until the
    scan runs off the end. Move k is recorded in the out_* slots; returns
    (move count, failed-scan evals, failed-scan start or n, new max candidate
    count). A failed-scan start of n means the pass ended on a move at the
    final position, so no trailing scan happened."""
    n_moves = 0
    pos = np.int64(0)
    length = order.shape[0]
    while pos < length:
        fp, target, gain, evals = scan_for_move(
            adj_start, strength, W, labels, sigma, own_s, own_cnt,
            eta_comm, eta_w, eta_len, order, pos,
        )
        if fp < 0:
            return n_moves, evals, pos, cur_max
        u = order[fp]
        cur_max = apply_move(
            adj_start, adj_v, adj_w, strength, labels, sigma, own_s, own_cnt,
            eta_comm, eta_w, eta_cnt, eta_len, cnt_buckets, u, target, cur_max,
            False,
        )
        out_pos[n_moves] = pos
        out_u[n_moves] = u
        out_target[n_moves] = target
        out_evals[n_moves] = evals
        out_gain[n_moves] = gain
        n_moves += 1
        pos = fp + 1
    return n_moves, np.int64(0), length, cur_max


@njit(**JIT)
def ol_pass_uncached(
    adj_start, adj_v, adj_w, strength, W, labels, sigma,
    comm_buf, weight_buf, order,
    out_pos, out_u, out_target, out_evals, out_gain,
):
    """ol_pass without the eta structure (wall-time benchmark mode)."""
    n_moves = 0
    pos = np.int64(0)
    length = order.shape[0]
    while pos < length:
        fp, target, gain, evals = scan_for_move_uncached(
            adj_start, adj_v, adj_w, strength, W, labels, sigma,
            comm_buf, weight_buf, order, pos,
        )
        if fp < 0:
            return n_moves, evals, pos
        u = order[fp]
        apply_move_uncached(adj_start, strength, labels, sigma, u, target)
        out_pos[n_moves] = pos
        out_u[n_moves] = u
        out_target[n_moves] = target
        out_evals[n_moves] = evals
        out_gain[n_moves] = gain
        n_moves += 1
        pos = fp + 1
    return n_moves, np.int64(0), pos


# -- marked-set tracking ------------------------------------------------------


@njit(**JIT)
def build_member_lists(labels, comm_head, nxt, prv):
    """Rebuild per-community doubly-linked member lists from labels."""
    comm_head[:] = -1
    for u in range(labels.shape[0] - 1, -1, -1):
        c = labels[u]
        h = comm_head[c]
        nxt[u] = h
        prv[u] = -1
        if h >= 0:
            prv[h] = u
        comm_head[c] = u


@njit(**JIT)
def _relink_member(comm_head, nxt, prv, u, alpha, beta):
    p = prv[u]
    nx = nxt[u]
    if p >= 0:
        nxt[p] = nx
    else:
        comm_head[alpha] = nx
    if nx >= 0:
        prv[nx] = p
    h = comm_head[beta]
    nxt[u] = h
    prv[u] = -1
    if h >= 0:
        prv[h] = u
    comm_head[beta] = u


@njit(**JIT)
def _collect_changeable(
    adj_start, adj_v, comm_head, nxt, stamp, stamp_val, buf, u, alpha, beta
):
    """Fill buf with the moved vertex, all members of its old and new
    communities, and every neighbor of those; returns the count."""
    k = 0
    x = comm_head[alpha]
    while x >= 0:
        if stamp[x] != stamp_val:
            stamp[x] = stamp_val
            buf[k] = x
            k += 1
        x = nxt[x]
    x = comm_head[beta]
    while x >= 0:
        if stamp[x] != stamp_val:
            stamp[x] = stamp_val
            buf[k] = x
            k += 1
        x = nxt[x]
    if stamp[u] != stamp_val:
        stamp[u] = stamp_val
        buf[k] = u
        k += 1
    core = k
    for i in range(core):
        x = buf[i]
        for e in range(adj_start[x], adj_start[x + 1]):
            y = adj_v[e]
            if stamp[y] != stamp_val:
                stamp[y] = stamp_val
                buf[k] = y
                k += 1
    return k


@njit(**JIT)
def _swapset_put(marked_pos, marked_list, t, x, good):
    if good:
        if marked_pos[x] < 0:
            marked_pos[x] = t
            marked_list[t] = x
            t += 1
    else:
        if marked_pos[x] >= 0:
            p = marked_pos[x]
            last = marked_list[t - 1]
            marked_list[p] = last
            marked_pos[last] = p
            marked_pos[x] = -1
            t -= 1
    return t


@njit(**JIT)
def vertex_tracker_build(
    adj_start, strength, W, labels, sigma, own_s, own_cnt,
    eta_comm, eta_w, eta_len, marked_pos, marked_list,
):
    t = 0
    for u in range(labels.shape[0]):
        g, _ = is_good(
            adj_start, strength, W, labels, sigma, own_s, own_cnt,
            eta_comm, eta_w, eta_len, u,
        )
        if g:
            marked_pos[u] = t
            marked_list[t] = u
            t += 1
        else:
            marked_pos[u] = -1
    return t


@njit(**JIT)
def vertex_tracker_update(
    adj_start, adj_v, strength, W, labels, sigma, own_s, own_cnt,
    eta_comm, eta_w, eta_len,
    comm_head, nxt, prv, stamp, stamp_val, buf,
    marked_pos, marked_list, t, u, alpha, beta,
):
    """Re-audit goodness over the changeable set after u moved alpha->beta.

    Call after the state move was applied; returns the new marked count."""
    _relink_member(comm_head, nxt, prv, u, alpha, beta)
    k = _collect_changeable(
        adj_start, adj_v, comm_head, nxt, stamp, stamp_val, buf, u, alpha, beta
    )
    for i in range(k):
        x = buf[i]
        g, _ = is_good(
            adj_start, strength, W, labels, sigma, own_s, own_cnt,
            eta_comm, eta_w, eta_len, x,
        )
        t = _swapset_put(marked_pos, marked_list, t, x, g)
    return t


@njit(**JIT)
def edge_tracker_build(
    adj_start, adj_v, strength, W, labels, sigma, own_s,
    eta_comm, eta_w, eta_len, marked_pos, marked_list,
):
    """Audit every directed adjacency slot; slot e = (owner -> adj_v[e]) is
    marked when moving the owner into the head's community strictly gains."""
    t = 0
    for x in range(labels.shape[0]):
        for e in range(adj_start[x], adj_start[x + 1]):
            d = delta_value(
                adj_start, strength, W, labels, sigma, own_s,
                eta_comm, eta_w, eta_len, x, labels[adj_v[e]],
            )
            if d > 0.0:
                marked_pos[e] = t
                marked_list[t] = e
                t += 1
            else:
                marked_pos[e] = -1
    return t


@njit(**JIT)
def edge_tracker_update(
    adj_start, adj_v, strength, W, labels, sigma, own_s,
    eta_comm, eta_w, eta_len,
    comm_head, nxt, prv, stamp, stamp_val, buf,
    marked_pos, marked_list, t, u, alpha, beta,
):
    """Re-audit all out-edges of the changeable set after u moved
    alpha->beta; in-edges from outside that set cannot have flipped."""
    _relink_member(comm_head, nxt, prv, u, alpha, beta)
    k = _collect_changeable(
        adj_start, adj_v, comm_head, nxt, stamp, stamp_val, buf, u, alpha, beta
    )
    for i in range(k):
        x = buf[i]
        for e in range(adj_start[x], adj_start[x + 1]):
            d = delta_value(
                adj_start, strength, W, labels, sigma, own_s,
                eta_comm, eta_w, eta_len, x, labels[adj_v[e]],
            )
            t = _swapset_put(marked_pos, marked_list, t, e, d > 0.0)
    return t
