"""Pure-Python (numpy) implementations of the hot kernels.

This module mirrors the API of the compiled extension ``_core`` and is
selected automatically when the extension is not built.  Integer-valued
results (convolution scans, component sizes, anti-Robinson event counts)
are exact and identical to the compiled backend; floating-point sums may
differ from it in the last few ulps because the summation order differs.
"""

import numpy as np
from scipy import ndimage

NAME = "python"

_EIGHT_CONN = np.ones((3, 3), dtype=np.uint8)


def eq1_square(vals, mask):
    """Robinson-violation sums over a square region around its main diagonal.

    For every index triple i < k < j of the local frame, the pair closer to
    the diagonal is compared with the farther one, once along row i and once
    along column j.  A pair contributes its absolute difference to the
    denominator when both entries are positive and lie inside the footprint
    mask, and to the numerator as well when the closer entry is strictly
    smaller.  Returns (numerator, denominator).
    """
    f = vals.shape[0]
    num = 0.0
    den = 0.0
    valid = (vals > 0.0) & (mask != 0)
    # Row terms: for each row i, all ordered pairs right of the diagonal.
    for i in range(f - 2):
        x = vals[i, i + 1:]
        ok = valid[i, i + 1:]
        pair_ok = np.triu(np.outer(ok, ok), k=1)
        diff = x[None, :] - x[:, None]          # diff[k, j] = x_j - x_k
        w = np.abs(diff) * pair_ok
        den += w.sum()
        num += np.where(diff > 0.0, diff, 0.0)[pair_ok.astype(bool)].sum()
    # Column terms: for each column j, all ordered pairs above the diagonal.
    for j in range(2, f):
        y = vals[:j, j]
        ok = valid[:j, j]
        pair_ok = np.triu(np.outer(ok, ok), k=1)
        diff = y[:, None] - y[None, :]          # diff[i, k] = y_i - y_k
        w = np.abs(diff) * pair_ok
        den += w.sum()
        num += np.where(diff > 0.0, diff, 0.0)[pair_ok.astype(bool)].sum()
    return num, den


def _line_pair_sums(x, ok):
    """Suffix/prefix ordered-pair sums for one line of a rectangle.

    Returns (a_num, a_den, b_num, b_den), each of length m+1:
      a_*[t] sums pairs within x[t:] with the smaller index as "closer";
      b_*[t] sums pairs within x[:t] with the larger index as "closer".
    A pair counts only when both entries are valid; it is a violation when
    the closer entry is strictly smaller than the farther one.
    """
    m = x.shape[0]
    a_num = np.zeros(m + 1)
    a_den = np.zeros(m + 1)
    b_num = np.zeros(m + 1)
    b_den = np.zeros(m + 1)
    for t in range(m - 1, -1, -1):
        if ok[t]:
            d = (x[t + 1:] - x[t]) * ok[t + 1:]
            a_den[t] = a_den[t + 1] + np.abs(d).sum()
            a_num[t] = a_num[t + 1] + np.where(d > 0.0, d, 0.0).sum()
        else:
            a_den[t] = a_den[t + 1]
            a_num[t] = a_num[t + 1]
    for t in range(1, m + 1):
        e = t - 1
        if ok[e]:
            d = (x[:e] - x[e]) * ok[:e]
            b_den[t] = b_den[t - 1] + np.abs(d).sum()
            b_num[t] = b_num[t - 1] + np.where(d > 0.0, d, 0.0).sum()
        else:
            b_den[t] = b_den[t - 1]
            b_num[t] = b_num[t - 1]
    return a_num, a_den, b_num, b_den


def eq1_rect_min(vals, mask):
    """Minimum Robinson-violation ratio over all anti-diagonals of a rectangle.

    Each anti-diagonal offset d (cells with i + j == d) is tried as the ridge
    of the mirrored Robinson structure: along every row and column, entries on
    the same side of the ridge must not increase away from it.  Returns the
    smallest violation ratio; a candidate with empty denominator scores 0.
    """
    u, v = vals.shape
    ncand = u + v - 1
    num = np.zeros(ncand)
    den = np.zeros(ncand)
    valid = (vals > 0.0) & (mask != 0)
    ds = np.arange(ncand)
    for li in range(u):
        a_num, a_den, b_num, b_den = _line_pair_sums(vals[li], valid[li])
        p = ds - li
        right = np.clip(p + 1, 0, v)
        left = np.clip(p, 0, v)
        num += a_num[right] + b_num[left]
        den += a_den[right] + b_den[left]
    for lj in range(v):
        a_num, a_den, b_num, b_den = _line_pair_sums(vals[:, lj], valid[:, lj])
        q = ds - lj
        below = np.clip(q + 1, 0, u)
        above = np.clip(q, 0, u)
        num += a_num[below] + b_num[above]
        den += a_den[below] + b_den[above]
    ratios = np.where(den > 0.0, num / np.where(den > 0.0, den, 1.0), 0.0)
    return float(ratios.min())


def label_sizes(grid):
    """Sizes of the 8-connected components of the nonzero cells of a grid."""
    labels, count = ndimage.label(grid, structure=_EIGHT_CONN)
    if count == 0:
        return np.zeros(0, dtype=np.int64)
    return np.bincount(labels.ravel())[1:].astype(np.int64)


def _segment_conv(prefix, rows, los, his, p, q):
    # q may be an array; one fancy-indexed gather per footprint segment.
    total = 0
    for s in range(rows.shape[0]):
        r = p + rows[s]
        total = total + prefix[r, q + his[s] + 1] - prefix[r, q + los[s]]
    return total

def scan_diagonal(prefix_b, prefix_occ, rows, los, his, frame, n):
    """Best on-diagonal placement of a footprint given by row segments.

    Returns (t, conv) for the placement at (t, t) maximizing the count of
    ones under the footprint while avoiding occupied cells; ties go to the
    smallest t.  Returns (-1, -1) when every placement is blocked.
    """
    nplace = n - frame + 1
    if nplace <= 0:
        return -1, -1
    t = np.arange(nplace)
    conv = np.zeros(nplace, dtype=np.int64)
    occ = np.zeros(nplace, dtype=np.int64)
    for s in range(rows.shape[0]):
        r = t + rows[s]
        conv += prefix_b[r, t + his[s] + 1] - prefix_b[r, t + los[s]]
        occ += prefix_occ[r, t + his[s] + 1] - prefix_occ[r, t + los[s]]
    feasible = occ == 0
    if not feasible.any():
        return -1, -1
    conv = np.where(feasible, conv, -1)
    best = int(np.argmax(conv))
    return best, int(conv[best])


def scan_offdiag(prefix_b, prefix_occ, rows, los, his, h, w, gap, n):
    """Best strictly-upper-triangle placement of a footprint.

    Placements put the footprint bounding box at (p, q) with q - p >= gap so
    every cell stays strictly above the main diagonal.  Returns (p, q, conv)
    with ties broken by smallest (p, q); (-1, -1, -1) when blocked.
    """
    np_rows = n - h + 1
    np_cols = n - w + 1
    if np_rows <= 0 or np_cols <= 0:
        return -1, -1, -1
    q = np.arange(np_cols)
    conv = np.full((np_rows, np_cols), -1, dtype=np.int64)
    for p in range(np_rows):
        q0 = p + gap
        if q0 >= np_cols:
            continue
        qs = q[q0:]
        c = _segment_conv(prefix_b, rows, los, his, p, qs)
        o = _segment_conv(prefix_occ, rows, los, his, p, qs)
        conv[p, q0:] = np.where(o == 0, c, -1)
    best = int(np.argmax(conv))
    p, qq = divmod(best, np_cols)
    if conv[p, qq] < 0:
        return -1, -1, -1
    return int(p), int(qq), int(conv[p, qq])


def ar_metrics(d):
    """Anti-Robinson events and deviation of an ordered dissimilarity matrix.

    A triple i < k < j is an event when d[i,k] > d[i,j] or d[k,j] > d[i,j];
    the deviation accumulates the absolute differences of all violating
    comparisons.  Returns (events, deviation).
    """
    n = d.shape[0]
    events = 0
    deviation = 0.0
    for k in range(1, n - 1):
        left = d[:k, k]                     # d[i, k], i < k
        right = d[k, k + 1:]                # d[k, j], j > k
        far = d[:k, k + 1:]                 # d[i, j]
        v1 = left[:, None] - far            # row violations
        v2 = right[None, :] - far           # column violations
        events += int(((v1 > 0.0) | (v2 > 0.0)).sum())
        deviation += float(np.where(v1 > 0.0, v1, 0.0).sum())
        deviation += float(np.where(v2 > 0.0, v2, 0.0).sum())
    return events, deviation


def _ls_objective(d, perm):
    pos = np.arange(perm.shape[0])
    dist = np.abs(pos[:, None] - pos[None, :])
    return float((d[np.ix_(perm, perm)] * dist).sum() / 2.0)


def anneal_run(d, perm, kinds, ia, ib, uu, temps):
    """Simulated-annealing pass over a proposal stream.

    Maximizes the linear-seriation sum (large dissimilarities far from the
    diagonal).  ``perm`` is the starting order; proposals are swaps
    (kind 0) of positions ia/ib or reversals (kind 1) of the segment between
    them, accepted by the Metropolis rule at the given temperatures.
    Returns (best_perm, best_obj, final_obj).
    """
    perm = perm.copy()
    n = perm.shape[0]
    obj = _ls_objective(d, perm)
    best = perm.copy()
    best_obj = obj
    zpos = np.arange(n)
    for t in range(kinds.shape[0]):
        x, y = int(ia[t]), int(ib[t])
        if x > y:
            x, y = y, x
        if kinds[t] == 0:
            a, b = perm[x], perm[y]
            contrib = (d[perm, b] - d[perm, a]) * (np.abs(zpos - x) - np.abs(zpos - y))
            delta = float(contrib.sum() - contrib[x] - contrib[y])
        else:
            if y - x >= n - 1:  # full reversal never changes the objective
                delta = 0.0
            else:
                seg = perm[x:y + 1]
                out = np.concatenate((perm[:x], perm[y + 1:]))
                zs = np.concatenate((zpos[:x], zpos[y + 1:]))
                xs = zpos[x:y + 1]
                wdiff = (np.abs(zs[:, None] - (x + y - xs)[None, :])
                         - np.abs(zs[:, None] - xs[None, :]))
                delta = float((d[np.ix_(out, seg)] * wdiff).sum())
        if delta >= 0.0 or uu[t] < np.exp(delta / temps[t]):
            if kinds[t] == 0:
                perm[x], perm[y] = perm[y], perm[x]
            else:
                perm[x:y + 1] = perm[x:y + 1][::-1]
            obj += delta
            if obj > best_obj:
                best_obj = obj
                best = perm.copy()
    return best, best_obj, obj
