# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot kernels.

Same API as ``_pyref``; see that module for the semantics of each function.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, fabs

cnp.import_array()

NAME = "compiled"


def eq1_square(double[:, :] vals, unsigned char[:, :] mask):
    cdef Py_ssize_t f = vals.shape[0]
    cdef Py_ssize_t i, j, k
    cdef double num = 0.0, den = 0.0
    cdef double a, b, w
    # Row terms: pairs (k, j) right of the diagonal in row i.
    for i in range(f - 2):
        for k in range(i + 1, f - 1):
            if mask[i, k] == 0 or vals[i, k] <= 0.0:
                continue
            a = vals[i, k]
            for j in range(k + 1, f):
                if mask[i, j] == 0 or vals[i, j] <= 0.0:
                    continue
                b = vals[i, j]
                w = fabs(a - b)
                den += w
                if a < b:
                    num += w
    # Column terms: pairs (i, k) above the diagonal in column j.
    for j in range(2, f):
        for i in range(j - 1):
            if mask[i, j] == 0 or vals[i, j] <= 0.0:
                continue
            a = vals[i, j]
            for k in range(i + 1, j):
                if mask[k, j] == 0 or vals[k, j] <= 0.0:
                    continue
                b = vals[k, j]
                w = fabs(a - b)
                den += w
                if b < a:
                    num += w
    return num, den


cdef void _line_pair_sums(double[:] x, unsigned char[:] ok, Py_ssize_t m,
                          double[:] a_num, double[:] a_den,
                          double[:] b_num, double[:] b_den) noexcept:
    cdef Py_ssize_t t, c
    cdef double sn, sd, d
    a_num[m] = 0.0
    a_den[m] = 0.0
    for t in range(m - 1, -1, -1):
        sn = 0.0
        sd = 0.0
        if ok[t]:
            for c in range(t + 1, m):
                if ok[c]:
                    d = x[c] - x[t]
                    sd += fabs(d)
                    if d > 0.0:
                        sn += d
        a_num[t] = a_num[t + 1] + sn
        a_den[t] = a_den[t + 1] + sd
    b_num[0] = 0.0
    b_den[0] = 0.0
    for t in range(1, m + 1):
        sn = 0.0
        sd = 0.0
        if ok[t - 1]:
            for c in range(t - 1):
                if ok[c]:
                    d = x[c] - x[t - 1]
                    sd += fabs(d)
                    if d > 0.0:
                        sn += d
        b_num[t] = b_num[t - 1] + sn
        b_den[t] = b_den[t - 1] + sd


def eq1_rect_min(double[:, :] vals, unsigned char[:, :] mask):
    cdef Py_ssize_t u = vals.shape[0]
    cdef Py_ssize_t v = vals.shape[1]
    cdef Py_ssize_t ncand = u + v - 1
    cdef Py_ssize_t li, lj, dd, p, lo, hi
    num_arr = np.zeros(ncand)
    den_arr = np.zeros(ncand)
    cdef double[:] num = num_arr
    cdef double[:] den = den_arr
    cdef Py_ssize_t m = u if u > v else v
    buf_an = np.zeros(m + 1); buf_ad = np.zeros(m + 1)
    buf_bn = np.zeros(m + 1); buf_bd = np.zeros(m + 1)
    line = np.zeros(m); okbuf = np.zeros(m, dtype=np.uint8)
    cdef double[:] a_num = buf_an, a_den = buf_ad
    cdef double[:] b_num = buf_bn, b_den = buf_bd
    cdef double[:] xline = line
    cdef unsigned char[:] ok = okbuf
    for li in range(u):
        for lj in range(v):
            xline[lj] = vals[li, lj]
            ok[lj] = 1 if (mask[li, lj] != 0 and vals[li, lj] > 0.0) else 0
        _line_pair_sums(xline, ok, v, a_num, a_den, b_num, b_den)
        for dd in range(ncand):
            p = dd - li
            hi = p + 1
            if hi < 0: hi = 0
            if hi > v: hi = v
            lo = p
            if lo < 0: lo = 0
            if lo > v: lo = v
            num[dd] += a_num[hi] + b_num[lo]
            den[dd] += a_den[hi] + b_den[lo]
    for lj in range(v):
        for li in range(u):
            xline[li] = vals[li, lj]
            ok[li] = 1 if (mask[li, lj] != 0 and vals[li, lj] > 0.0) else 0
        _line_pair_sums(xline, ok, u, a_num, a_den, b_num, b_den)
        for dd in range(ncand):
            p = dd - lj
            hi = p + 1
            if hi < 0: hi = 0
            if hi > u: hi = u
            lo = p
            if lo < 0: lo = 0
            if lo > u: lo = u
            num[dd] += a_num[hi] + b_num[lo]
            den[dd] += a_den[hi] + b_den[lo]
    cdef double best = -1.0, r
    for dd in range(ncand):
        r = num[dd] / den[dd] if den[dd] > 0.0 else 0.0
        if best < 0.0 or r < best:
            best = r
    return best


def label_sizes(unsigned char[:, :] grid):
    cdef Py_ssize_t h = grid.shape[0]
    cdef Py_ssize_t w = grid.shape[1]
    cdef Py_ssize_t i, j, ci, cj, ni, nj, top
    cdef Py_ssize_t di, dj
    seen_arr = np.zeros((h, w), dtype=np.uint8)
    cdef unsigned char[:, :] seen = seen_arr
    stack_arr = np.empty(h * w * 2, dtype=np.int64)
    cdef long long[:] stack = stack_arr
    sizes = []
    cdef long long size
    for i in range(h):
        for j in range(w):
            if grid[i, j] == 0 or seen[i, j]:
                continue
            size = 0
            top = 0
            stack[top] = i; stack[top + 1] = j
            top += 2
            seen[i, j] = 1
            while top > 0:
                top -= 2
                ci = stack[top]; cj = stack[top + 1]
                size += 1
                for di in range(-1, 2):
                    for dj in range(-1, 2):
                        if di == 0 and dj == 0:
                            continue
                        ni = ci + di; nj = cj + dj
                        if 0 <= ni < h and 0 <= nj < w \
                                and grid[ni, nj] != 0 and not seen[ni, nj]:
                            seen[ni, nj] = 1
                            stack[top] = ni; stack[top + 1] = nj
                            top += 2
            sizes.append(size)
    return np.asarray(sizes, dtype=np.int64)


def scan_diagonal(long long[:, :] prefix_b, long long[:, :] prefix_occ,
                  long long[:] rows, long long[:] los, long long[:] his,
                  Py_ssize_t frame, Py_ssize_t n):
    cdef Py_ssize_t nplace = n - frame + 1
    if nplace <= 0:
        return -1, -1
    cdef Py_ssize_t t, s, r
    cdef long long conv, occ
    cdef long long best_conv = -1
    cdef Py_ssize_t best_t = -1
    cdef Py_ssize_t nseg = rows.shape[0]
    for t in range(nplace):
        conv = 0
        occ = 0
        for s in range(nseg):
            r = t + rows[s]
            conv += prefix_b[r, t + his[s] + 1] - prefix_b[r, t + los[s]]
            occ += prefix_occ[r, t + his[s] + 1] - prefix_occ[r, t + los[s]]
        if occ == 0 and conv > best_conv:
            best_conv = conv
            best_t = t
    if best_t < 0:
        return -1, -1
    return best_t, best_conv


def scan_offdiag(long long[:, :] prefix_b, long long[:, :] prefix_occ,
                 long long[:] rows, long long[:] los, long long[:] his,
                 Py_ssize_t h, Py_ssize_t w, Py_ssize_t gap, Py_ssize_t n):
    cdef Py_ssize_t np_rows = n - h + 1
    cdef Py_ssize_t np_cols = n - w + 1
    if np_rows <= 0 or np_cols <= 0:
        return -1, -1, -1
    cdef Py_ssize_t p, q, s, r, q0
    cdef long long conv, occ
    cdef long long best_conv = -1
    cdef Py_ssize_t best_p = -1, best_q = -1
    cdef Py_ssize_t nseg = rows.shape[0]
    for p in range(np_rows):
        q0 = p + gap
        if q0 < 0:
            q0 = 0
        for q in range(q0, np_cols):
            occ = 0
            for s in range(nseg):
                r = p + rows[s]
                occ += prefix_occ[r, q + his[s] + 1] - prefix_occ[r, q + los[s]]
                if occ != 0:
                    break
            if occ != 0:
                continue
            conv = 0
            for s in range(nseg):
                r = p + rows[s]
                conv += prefix_b[r, q + his[s] + 1] - prefix_b[r, q + los[s]]
            if conv > best_conv:
                best_conv = conv
                best_p = p
                best_q = q
    if best_p < 0:
        return -1, -1, -1
    return best_p, best_q, best_conv


def ar_metrics(double[:, :] d):
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t i, j, k
    cdef long long events = 0
    cdef double deviation = 0.0
    cdef double dij, v1, v2
    cdef bint hit
    for k in range(1, n - 1):
        for i in range(k):
            for j in range(k + 1, n):
                dij = d[i, j]
                hit = 0
                v1 = d[i, k] - dij
                if v1 > 0.0:
                    deviation += v1
                    hit = 1
                v2 = d[k, j] - dij
                if v2 > 0.0:
                    deviation += v2
                    hit = 1
                if hit:
                    events += 1
    return events, deviation


def anneal_run(double[:, :] d, long long[:] perm0,
               unsigned char[:] kinds, long long[:] ia, long long[:] ib,
               double[:] uu, double[:] temps):
    cdef Py_ssize_t n = perm0.shape[0]
    perm_arr = np.asarray(perm0).copy()
    best_arr = perm_arr.copy()
    cdef long long[:] perm = perm_arr
    cdef long long[:] best = best_arr
    cdef Py_ssize_t t, x, y, z, xx, tmp_i
    cdef long long a, b, tmp
    cdef double obj = 0.0, best_obj, delta, contrib
    cdef Py_ssize_t i, j
    for i in range(n):
        for j in range(i + 1, n):
            obj += d[perm[i], perm[j]] * (j - i)
    best_obj = obj
    cdef Py_ssize_t nprop = kinds.shape[0]
    for t in range(nprop):
        x = ia[t]; y = ib[t]
        if x > y:
            x = ib[t]; y = ia[t]
        if kinds[t] == 0:
            a = perm[x]; b = perm[y]
            delta = 0.0
            for z in range(n):
                if z == x or z == y:
                    continue
                delta += (d[perm[z], b] - d[perm[z], a]) * \
                         (fabs(<double>(z - x)) - fabs(<double>(z - y)))
        else:
            if y - x >= n - 1:
                delta = 0.0
            else:
                delta = 0.0
                for z in range(n):
                    if x <= z <= y:
                        continue
                    contrib = 0.0
                    for xx in range(x, y + 1):
                        contrib += d[perm[z], perm[xx]] * \
                            (fabs(<double>(z - (x + y - xx))) - fabs(<double>(z - xx)))
                    delta += contrib
        if delta >= 0.0 or uu[t] < exp(delta / temps[t]):
            if kinds[t] == 0:
                tmp = perm[x]; perm[x] = perm[y]; perm[y] = tmp
            else:
                i = x; j = y
                while i < j:
                    tmp = perm[i]; perm[i] = perm[j]; perm[j] = tmp
                    i += 1; j -= 1
            obj += delta
            if obj > best_obj:
                best_obj = obj
                for i in range(n):
                    best[i] = perm[i]
    return best_arr, best_obj, obj
