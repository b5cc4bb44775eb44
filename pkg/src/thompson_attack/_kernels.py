"""Array kernels for normal-form arithmetic and the greedy search.

A normal form is carried as two ascending int64 arrays ``(pos, neg)``
spelling ``x_{pos[0]} ... x_{pos[-1]} x_{neg[-1]}^-1 ... x_{neg[0]}^-1``.
Everything here is linear in the total length of the operands.
"""

import numpy as np
from numba import njit

DIST_DB = 0
DIST_DB_WEIGHTED = 1
DIST_DA = 2
DIST_DA_WEIGHTED = 3
DIST_DA_MAX = 4


@njit(cache=True, nogil=True)
def _neg_times_pos(neg, pos):
    # Rewrites neg^-1 * pos into seminormal form P' N'^-1 (rules R2, R3, R5).
    # Positive letters are pushed left through the negative block one at a
    # time; each one passes a prefix of the block that only grows, so a
    # single forward pointer and a lazy suffix increment suffice.
    out_p = np.empty(pos.shape[0], dtype=np.int64)
    out_n = np.empty(neg.shape[0], dtype=np.int64)
    cp = 0
    cn = 0
    k = 0
    inc = 0
    m = neg.shape[0]
    for q in range(pos.shape[0]):
        v = pos[q] + cn
        while True:
            if k == m:
                out_p[cp] = v
                cp += 1
                break
            a = neg[k] + inc
            if a < v:
                out_n[cn] = a
                cn += 1
                k += 1
                v += 1
            elif a == v:
                k += 1
                break
            else:
                inc += 1
                out_p[cp] = v
                cp += 1
                break
    while k < m:
        out_n[cn] = neg[k] + inc
        cn += 1
        k += 1
    return out_p[:cp], out_n[:cn]


@njit(cache=True, nogil=True)
def _pos_times_pos(left, right):
    # Product of two ascending positive words (rule R1). Letters of the
    # right factor keep their index; a left letter x_p moves right past
    # every right letter it exceeds and gains one per letter passed.
    nl = left.shape[0]
    nr = right.shape[0]
    out = np.empty(nl + nr, dtype=np.int64)
    c = 0
    o = 0
    r = 0
    for q in range(nl):
        p = left[q]
        while c < nr and right[c] - c < p:
            c += 1
        val = p + c
        while r < c:
            out[o] = right[r]
            o += 1
            r += 1
        out[o] = val
        o += 1
    while r < nr:
        out[o] = right[r]
        o += 1
        r += 1
    return out


@njit(cache=True, nogil=True)
def _reduce_nf2(pos, neg):
    # Removes (NF2)-violating pairs from a seminormal form, scanning index
    # levels from the positive/negative boundary downward. Each
    # cancellation lowers every letter already scanned by one; that is
    # tracked with a stamp per kept letter instead of rewriting them.
    np_ = pos.shape[0]
    nn = neg.shape[0]
    kp_val = np.empty(np_, dtype=np.int64)
    kp_stamp = np.empty(np_, dtype=np.int64)
    kn_val = np.empty(nn, dtype=np.int64)
    kn_stamp = np.empty(nn, dtype=np.int64)
    cp_out = 0
    cn_out = 0
    ip = np_ - 1
    ineg = nn - 1
    dec = 0
    has_last = False
    last_val = 0
    last_stamp = 0
    while ip >= 0 or ineg >= 0:
        if ip < 0:
            level = neg[ineg]
        elif ineg < 0:
            level = pos[ip]
        else:
            level = pos[ip] if pos[ip] > neg[ineg] else neg[ineg]
        cp = 0
        while ip >= 0 and pos[ip] == level:
            cp += 1
            ip -= 1
        cn = 0
        while ineg >= 0 and neg[ineg] == level:
            cn += 1
            ineg -= 1
        while cp > 0 and cn > 0:
            if has_last and last_val - (dec - last_stamp) == level + 1:
                break
            cp -= 1
            cn -= 1
            dec += 1
        for _ in range(cp):
            kp_val[cp_out] = level
            kp_stamp[cp_out] = dec
            cp_out += 1
        for _ in range(cn):
            kn_val[cn_out] = level
            kn_stamp[cn_out] = dec
            cn_out += 1
        if cp + cn > 0:
            has_last = True
            last_val = level
            last_stamp = dec
    out_p = np.empty(cp_out, dtype=np.int64)
    out_n = np.empty(cn_out, dtype=np.int64)
    for q in range(cp_out):
        out_p[cp_out - 1 - q] = kp_val[q] - (dec - kp_stamp[q])
    for q in range(cn_out):
        out_n[cn_out - 1 - q] = kn_val[q] - (dec - kn_stamp[q])
    return out_p, out_n


@njit(cache=True, nogil=True)
def nf_multiply(p1, n1, p2, n2):
    """Normal form of ``(p1, n1) * (p2, n2)``."""
    mp, mn = _neg_times_pos(n1, p2)
    pos = _pos_times_pos(p1, mp)
    neg = _pos_times_pos(n2, mn)
    return _reduce_nf2(pos, neg)


@njit(cache=True, nogil=True)
def nf_reduce(pos, neg):
    return _reduce_nf2(pos, neg)


@njit(cache=True, nogil=True)
def distance(fn, pos, neg, s):
    p = pos.shape[0]
    n = neg.shape[0]
    if fn == DIST_DB or fn == DIST_DB_WEIGHTED:
        total = 0
        for k in range(p):
            if pos[k] > s:
                break
            total += 1 if fn == DIST_DB else s + 1 - pos[k]
        for k in range(n):
            if neg[k] > s:
                break
            total += 1 if fn == DIST_DB else s + 1 - neg[k]
        return total
    diff = p - n if p > n else n - p
    if fn == DIST_DA or fn == DIST_DA_WEIGHTED:
        total = diff
        for k in range(p):
            excess = pos[k] - (k + 1) - s + 1
            if excess > 0:
                total += 1 if fn == DIST_DA else excess
        for k in range(n):
            excess = neg[k] - (k + 1) - s + 1
            if excess > 0:
                total += 1 if fn == DIST_DA else excess
        return total
    mp = 0
    for k in range(p):
        excess = pos[k] - (k + 1) - s + 1
        if excess > mp:
            mp = excess
    mn = 0
    for k in range(n):
        excess = neg[k] - (k + 1) - s + 1
        if excess > mn:
            mn = excess
    bal = (p + mp) - (n + mn)
    if bal < 0:
        bal = -bal
    return mp + mn + bal


@njit(cache=True, nogil=True)
def _single(idx):
    out = np.empty(0 if idx < 0 else 1, dtype=np.int64)
    if idx >= 0:
        out[0] = idx
    return out


@njit(cache=True, nogil=True)
def greedy(zinv_p, zinv_n, u_p, u_n, ginv_p, ginv_n, fn, s, max_iter):
    """Subgroup-distance descent.

    ``ginv_p[i]`` / ``ginv_n[i]`` give the (at most one) positive and
    negative letter of the inverse of candidate generator ``i``; -1 marks
    an absent letter. Returns ``(success, choices, iterations, final,
    trace, y_pos, y_neg)``.
    """
    m = ginv_p.shape[0]
    choices = np.empty(max_iter, dtype=np.int64)
    trace = np.empty(max_iter, dtype=np.int64)
    y_p, y_n = nf_multiply(zinv_p, zinv_n, u_p, u_n)
    d0 = distance(fn, y_p, y_n, s)
    if d0 == 0:
        return True, choices[:0], 0, 0, trace[:0], y_p, y_n
    c_p = u_p
    c_n = u_n
    best_cp = u_p
    best_cn = u_n
    best_yp = y_p
    best_yn = y_n
    best_d = d0
    for it in range(max_iter):
        best = -1
        for i in range(m):
            cand_p, cand_n = nf_multiply(_single(ginv_p[i]), _single(ginv_n[i]), c_p, c_n)
            yp, yn = nf_multiply(zinv_p, zinv_n, cand_p, cand_n)
            d = distance(fn, yp, yn, s)
            if d == 0:
                choices[it] = i
                trace[it] = 0
                return True, choices[: it + 1], it + 1, 0, trace[: it + 1], yp, yn
            if best < 0 or d < best_d:
                best = i
                best_d = d
                best_cp = cand_p
                best_cn = cand_n
                best_yp = yp
                best_yn = yn
        choices[it] = best
        trace[it] = best_d
        c_p = best_cp
        c_n = best_cn
    return False, choices, max_iter, best_d, trace, best_yp, best_yn


@njit(cache=True, nogil=True)
def random_walk(pos, neg, gen_p, gen_n, picks, target):
    """Right-multiplies by generators ``picks[0], picks[1], ...`` until the
    normal-form length equals ``target``. Returns ``(pos, neg, steps)``;
    ``steps == -1`` when the picks ran out first."""
    if pos.shape[0] + neg.shape[0] == target:
        return pos, neg, 0
    for q in range(picks.shape[0]):
        g = picks[q]
        pos, neg = nf_multiply(pos, neg, _single(gen_p[g]), _single(gen_n[g]))
        if pos.shape[0] + neg.shape[0] == target:
            return pos, neg, q + 1
    return pos, neg, -1
