"""Compiled list-search kernel (numba twin of the reference in detection.py).

The kernel replicates the reference implementation operation for operation —
same accumulation order in every metric, same (metric, code) tie handling,
same memoization — so the two engines return identical codes, bit-identical
metrics, and identical squaring counts.  Equivalence is enforced by tests;
any change here must keep the reference in lockstep.

Layout: ``_detect_one`` holds the per-vector search over caller-provided
workspaces; ``run`` (one vector) and ``run_batch`` (a chunk sharing one
channel) allocate the workspaces and drive it.  If numba is unavailable,
``AVAILABLE`` is False and callers fall back to the reference implementation.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba
    AVAILABLE = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap if not (args and callable(args[0])) else args[0]


@njit(cache=True)
def _direct_metric(y, h, pts, code, places, base):
    rows, n = h.shape
    resid = y.copy()
    for j in range(n):
        w = pts[(code // places[j]) % base]
        for r in range(rows):
            resid[r] = resid[r] - w * h[r, j]
    total = 0.0
    for r in range(rows):
        total += resid[r].real ** 2 + resid[r].imag ** 2
    return total


@njit(cache=True)
def _order_met_code(met, code, m, out):
    """Full ordering by (metric asc, code asc); codes are unique."""
    idx = np.argsort(met[:m])
    i = 0
    while i < m:
        j = i + 1
        v = met[idx[i]]
        while j < m and met[idx[j]] == v:
            j += 1
        if j - i == 1:
            out[i] = idx[i]
        else:
            run = np.empty(j - i, dtype=np.int64)
            for t in range(j - i):
                run[t] = code[idx[i + t]]
            sub = np.argsort(run)
            for t in range(j - i):
                out[i + t] = idx[i + sub[t]]
        i = j
    return out


@njit(cache=True, inline="always")
def _filter_push(fmet, fcode, size, cap, met, code):
    """Insert (met, code) into a (metric, code)-sorted bounded array.

    Keeps the ``cap`` smallest pairs; returns the new size.  Equivalent to
    sorting the whole stream by (metric, code) and truncating.
    """
    if size == cap:
        if met > fmet[size - 1] or (met == fmet[size - 1]
                                    and code >= fcode[size - 1]):
            return size
        size -= 1
    i = size
    while i > 0 and (met < fmet[i - 1] or (met == fmet[i - 1]
                                           and code < fcode[i - 1])):
        fmet[i] = fmet[i - 1]
        fcode[i] = fcode[i - 1]
        i -= 1
    fmet[i] = met
    fcode[i] = code
    return size + 1


@njit(cache=True)
def _detect_one(y, h, pts, alloc, sizes, seeds, n_seeds, list_len, theta, phi,
                places, gidx, gplace, gcomp, gbk, gproj, memo_ctx, memo_val,
                memo_n, work_codes, ctx_tmp, fmet, fcode, branch_codes,
                branch_len, merged, mg_met, mg_resid, mg_ord, cand_code,
                cand_met, cand_resid, scr_code, scr_met, scr_resid, carry):
    rows, n = h.shape
    base = pts.shape[0]
    n_groups = sizes.shape[0]
    n_iters = alloc.shape[0]

    squarings = 0
    best_code = np.int64(-1)
    best_met = np.inf
    for i in range(n_seeds):
        met = _direct_metric(y, h, pts, seeds[i], places, base)
        squarings += 2 * rows
        if met < best_met:
            best_met = met
            best_code = seeds[i]

    for i in range(n_seeds):
        carry[i] = seeds[i]
    carry_n = n_seeds

    for q in range(n_iters):
        # groups of this iteration, each sorted ascending
        at = 0
        for g in range(n_groups):
            k = sizes[g]
            part = np.sort(alloc[q, at:at + k])
            at += k
            bk = 1
            for _ in range(k):
                bk *= base
            gbk[g] = bk
            for i in range(k):
                gidx[g, i] = part[i]
                gplace[g, i] = places[part[i]]
            for t in range(bk):
                comp = np.int64(0)
                tt = t
                for i in range(k - 1, -1, -1):
                    comp += (tt % base) * gplace[g, i]
                    tt //= base
                gcomp[g, t] = comp
            # ascending-member-order accumulation (matches the reference)
            for r in range(rows):
                for t in range(bk):
                    acc = 0.0 + 0.0j
                    div = bk
                    for i in range(k):
                        div //= base
                        d = (t // div) % base
                        acc = acc + pts[d] * h[r, gidx[g, i]]
                    gproj[r, g, t] = acc

        # ---- branch list estimation, one branch per row ----
        for r in range(rows):
            for g in range(n_groups):
                memo_n[g] = 0
            m = carry_n
            for i in range(m):
                work_codes[i] = carry[i]
            for _ in range(theta):
                for gi in range(n_groups):
                    k = sizes[gi]
                    bk = gbk[gi]
                    for i in range(m):
                        own = np.int64(0)
                        for t in range(k):
                            own += ((work_codes[i] // gplace[gi, t]) % base) * gplace[gi, t]
                        ctx_tmp[i] = work_codes[i] - own
                    sub = np.sort(ctx_tmp[:m])
                    nctx = 0
                    for i in range(m):
                        if i == 0 or sub[i] != sub[i - 1]:
                            ctx_tmp[nctx] = sub[i]
                            nctx += 1
                    fsize = 0
                    for ci in range(nctx):
                        c = ctx_tmp[ci]
                        found = -1
                        for mi in range(memo_n[gi]):
                            if memo_ctx[gi, mi] == c:
                                found = mi
                                break
                        if found < 0:
                            free = y[r]
                            for gj in range(n_groups):
                                if gj == gi:
                                    continue
                                s = 0.0 + 0.0j
                                for i in range(sizes[gj]):
                                    d = (c // gplace[gj, i]) % base
                                    s = s + pts[d] * h[r, gidx[gj, i]]
                                free = free - s
                            found = memo_n[gi]
                            for t in range(bk):
                                dv = free - gproj[r, gi, t]
                                memo_val[gi, found, t] = dv.real ** 2 + dv.imag ** 2
                            memo_ctx[gi, found] = c
                            memo_n[gi] += 1
                            squarings += 2 * bk
                        for t in range(bk):
                            fsize = _filter_push(fmet, fcode, fsize, list_len,
                                                 memo_val[gi, found, t],
                                                 c + gcomp[gi, t])
                    m = fsize
                    for i in range(m):
                        work_codes[i] = fcode[i]
            branch_len[r] = m
            for i in range(m):
                branch_codes[r, i] = work_codes[i]

        # ---- global list optimization ----
        tot = 0
        for r in range(rows):
            for i in range(branch_len[r]):
                merged[tot] = branch_codes[r, i]
                tot += 1
        msort = np.sort(merged[:tot])
        n_pool = 0
        for i in range(tot):
            if i == 0 or msort[i] != msort[i - 1]:
                merged[n_pool] = msort[i]
                n_pool += 1
        for ci in range(n_pool):
            code = merged[ci]
            for r in range(rows):
                mg_resid[ci, r] = y[r]
            for j in range(n):
                w = pts[(code // places[j]) % base]
                for r in range(rows):
                    mg_resid[ci, r] = mg_resid[ci, r] - w * h[r, j]
            tm = 0.0
            for r in range(rows):
                tm += mg_resid[ci, r].real ** 2 + mg_resid[ci, r].imag ** 2
            mg_met[ci] = tm
        squarings += 2 * rows * n_pool
        _order_met_code(mg_met, merged, n_pool, mg_ord)
        lc = list_len if n_pool > list_len else n_pool
        for i in range(lc):
            src = mg_ord[i]
            cand_code[i] = merged[src]
            cand_met[i] = mg_met[src]
            for r in range(rows):
                cand_resid[i, r] = mg_resid[src, r]

        for _ in range(phi):
            for ci in range(lc):
                for pp in range(n):
                    d0 = (cand_code[ci] // places[pp]) % base
                    best_b = 0
                    bm = np.inf
                    for b in range(base):
                        delta = pts[b] - pts[d0]
                        tm = 0.0
                        for r in range(rows):
                            tv = cand_resid[ci, r] - delta * h[r, pp]
                            tm += tv.real ** 2 + tv.imag ** 2
                        if tm < bm:
                            bm = tm
                            best_b = b
                    squarings += 2 * rows * base
                    delta = pts[best_b] - pts[d0]
                    for r in range(rows):
                        cand_resid[ci, r] = cand_resid[ci, r] - delta * h[r, pp]
                    cand_code[ci] = cand_code[ci] + (best_b - d0) * places[pp]
                    cand_met[ci] = bm
            # dedup by code keeping first occurrence, then resort + truncate
            nk = 0
            for ci in range(lc):
                dup = False
                for cj in range(nk):
                    if cand_code[cj] == cand_code[ci]:
                        dup = True
                        break
                if not dup:
                    cand_code[nk] = cand_code[ci]
                    cand_met[nk] = cand_met[ci]
                    for r in range(rows):
                        cand_resid[nk, r] = cand_resid[ci, r]
                    nk += 1
            _order_met_code(cand_met, cand_code, nk, mg_ord)
            lc = list_len if nk > list_len else nk
            for i in range(lc):
                src = mg_ord[i]
                scr_code[i] = cand_code[src]
                scr_met[i] = cand_met[src]
                for r in range(rows):
                    scr_resid[i, r] = cand_resid[src, r]
            for i in range(lc):
                cand_code[i] = scr_code[i]
                cand_met[i] = scr_met[i]
                for r in range(rows):
                    cand_resid[i, r] = scr_resid[i, r]

        if cand_met[0] < best_met or (cand_met[0] == best_met
                                      and cand_code[0] < best_code):
            best_met = cand_met[0]
            best_code = cand_code[0]
        carry_n = lc
        for i in range(lc):
            carry[i] = cand_code[i]

    return best_code, squarings


@njit(cache=True)
def _run_batch(ys, h, pts, alloc, sizes, seeds, seed_counts, list_len, theta,
               phi, out_codes, out_squarings):
    rows, n = h.shape
    base = pts.shape[0]
    n_groups = sizes.shape[0]

    places = np.empty(n, dtype=np.int64)
    p = 1
    for j in range(n - 1, -1, -1):
        places[j] = p
        p *= base
    kmax = 0
    for g in range(n_groups):
        if sizes[g] > kmax:
            kmax = sizes[g]
    bkmax = 1
    for _ in range(kmax):
        bkmax *= base
    seed_max = seeds.shape[1]
    carry_max = list_len if list_len > seed_max else seed_max
    cap = theta * carry_max + 8
    merge_max = rows * carry_max

    gidx = np.empty((n_groups, kmax), dtype=np.int64)
    gplace = np.empty((n_groups, kmax), dtype=np.int64)
    gcomp = np.empty((n_groups, bkmax), dtype=np.int64)
    gbk = np.empty(n_groups, dtype=np.int64)
    gproj = np.empty((rows, n_groups, bkmax), dtype=np.complex128)
    memo_ctx = np.empty((n_groups, cap), dtype=np.int64)
    memo_val = np.empty((n_groups, cap, bkmax), dtype=np.float64)
    memo_n = np.empty(n_groups, dtype=np.int64)
    work_codes = np.empty(carry_max, dtype=np.int64)
    ctx_tmp = np.empty(carry_max, dtype=np.int64)
    fmet = np.empty(list_len, dtype=np.float64)
    fcode = np.empty(list_len, dtype=np.int64)
    branch_codes = np.empty((rows, list_len), dtype=np.int64)
    branch_len = np.empty(rows, dtype=np.int64)
    merged = np.empty(merge_max, dtype=np.int64)
    mg_met = np.empty(merge_max, dtype=np.float64)
    mg_resid = np.empty((merge_max, rows), dtype=np.complex128)
    mg_ord = np.empty(merge_max, dtype=np.int64)
    cand_code = np.empty(list_len, dtype=np.int64)
    cand_met = np.empty(list_len, dtype=np.float64)
    cand_resid = np.empty((list_len, rows), dtype=np.complex128)
    scr_code = np.empty(list_len, dtype=np.int64)
    scr_met = np.empty(list_len, dtype=np.float64)
    scr_resid = np.empty((list_len, rows), dtype=np.complex128)
    carry = np.empty(carry_max, dtype=np.int64)

    for t in range(ys.shape[0]):
        code, sq = _detect_one(
            ys[t], h, pts, alloc[t], sizes, seeds[t], seed_counts[t], list_len,
            theta, phi, places, gidx, gplace, gcomp, gbk, gproj, memo_ctx,
            memo_val, memo_n, work_codes, ctx_tmp, fmet, fcode, branch_codes,
            branch_len, merged, mg_met, mg_resid, mg_ord, cand_code, cand_met,
            cand_resid, scr_code, scr_met, scr_resid, carry)
        out_codes[t] = code
        out_squarings[t] = sq


def run_batch(ys, h, points, alloc, sizes, seeds, seed_counts, list_len,
              theta, phi):
    """Detect a batch sharing one channel; returns (codes, squarings) arrays.

    ``alloc`` is (T, Q, N) — per-trial stream orders per overall iteration;
    ``seeds`` is (T, S) with ``seed_counts`` valid entries per row, ascending.
    """
    n_trials = np.asarray(ys).shape[0]
    out_codes = np.empty(n_trials, dtype=np.int64)
    out_squarings = np.empty(n_trials, dtype=np.int64)
    _run_batch(np.ascontiguousarray(ys, dtype=np.complex128),
               np.ascontiguousarray(h, dtype=np.complex128),
               np.ascontiguousarray(points, dtype=np.complex128),
               np.ascontiguousarray(alloc, dtype=np.int64),
               np.ascontiguousarray(sizes, dtype=np.int64),
               np.ascontiguousarray(seeds, dtype=np.int64),
               np.ascontiguousarray(seed_counts, dtype=np.int64),
               int(list_len), int(theta), int(phi),
               out_codes, out_squarings)
    return out_codes, out_squarings


def run(y, h, points, alloc, sizes, seeds, list_len, theta, phi):
    """Detect one vector; returns (best_code, squarings)."""
    codes, squarings = run_batch(
        np.asarray(y, dtype=np.complex128)[None, :], h, points,
        np.asarray(alloc, dtype=np.int64)[None, ...], sizes,
        np.asarray(seeds, dtype=np.int64)[None, :],
        np.array([len(seeds)], dtype=np.int64), list_len, theta, phi)
    return int(codes[0]), int(squarings[0])
