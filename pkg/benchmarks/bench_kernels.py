"""Benchmark the compiled kernels against the pure-Python fallback.

Usage:  python benchmarks/bench_kernels.py [--repeats N]

Times each kernel on representative workloads plus one end-to-end quality
scoring, and prints a table with the speedup of the compiled backend.
"""

import argparse
import time

import numpy as np

from seriabench._kernels import get_backend
from seriabench.templates import generate_template
from seriabench.variations import make_variation

try:
    COMPILED = get_backend("compiled")
except ImportError:
    COMPILED = None
PYTHON = get_backend("python")


def timeit(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def prefix(a):
    n = a.shape[0]
    out = np.zeros((n, n + 1), dtype=np.int64)
    np.cumsum(a, axis=1, dtype=np.int64, out=out[:, 1:])
    return out


def workloads():
    rng = np.random.default_rng(0)

    f = 120
    sq_vals = np.ascontiguousarray(rng.random((f, f)))
    sq_mask = np.ones((f, f), dtype=np.uint8)
    yield "eq1_square 120x120", lambda impl: impl.eq1_square(sq_vals, sq_mask)

    u, v = 80, 110
    rect_vals = np.ascontiguousarray(rng.random((u, v)))
    rect_mask = np.ones((u, v), dtype=np.uint8)
    yield "eq1_rect_min 80x110", lambda impl: impl.eq1_rect_min(rect_vals, rect_mask)

    grid = np.ascontiguousarray((rng.random((300, 300)) < 0.35), dtype=np.uint8)
    yield "label_sizes 300x300", lambda impl: impl.label_sizes(grid)

    n = 300
    b = (rng.random((n, n)) < 0.3).astype(np.uint8)
    occ = np.zeros_like(b)
    pb, po = prefix(b), prefix(occ)
    h, w = 40, 60
    rows = np.arange(h, dtype=np.int64)
    los = np.zeros(h, dtype=np.int64)
    his = np.full(h, w - 1, dtype=np.int64)
    yield "scan_offdiag 300, 40x60", \
        lambda impl: impl.scan_offdiag(pb, po, rows, los, his, h, w, h, n)

    d = rng.random((200, 200))
    d = np.ascontiguousarray((d + d.T) / 2)
    np.fill_diagonal(d, 0.0)
    yield "ar_metrics 200x200", lambda impl: impl.ar_metrics(d)

    na = 60
    da = rng.random((na, na))
    da = np.ascontiguousarray((da + da.T) / 2)
    np.fill_diagonal(da, 0.0)
    perm0 = rng.permutation(na).astype(np.int64)
    total = 20_000
    kinds = rng.integers(0, 2, total).astype(np.uint8)
    ia = rng.integers(0, na, total).astype(np.int64)
    ib = rng.integers(0, na - 1, total).astype(np.int64)
    ib += ib >= ia
    uu = rng.random(total)
    temps = np.geomspace(1.0, 1e-3, total)
    yield "anneal_run n=60, 20k proposals", \
        lambda impl: impl.anneal_run(da, perm0, kinds, ia, ib, uu, temps)


def score_workload():
    import seriabench.scoring as scoring
    t = generate_template("offdiag", "continuous", 200, seed=5)
    v = make_variation(t, 8, 8, np.random.default_rng(1))

    def run(impl):
        saved = scoring._impl
        scoring._impl = impl
        try:
            return scoring.score_matrix(v, t).final
        finally:
            scoring._impl = saved

    return "score_matrix 200x200 continuous", run


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()
    if COMPILED is None:
        print("compiled kernels are not built; showing the fallback only")
    rows = []
    cases = list(workloads()) + [score_workload()]
    for name, fn in cases:
        t_py = timeit(lambda: fn(PYTHON), args.repeats)
        if COMPILED is not None:
            t_c = timeit(lambda: fn(COMPILED), args.repeats)
            rows.append((name, t_py, t_c, t_py / t_c))
        else:
            rows.append((name, t_py, None, None))
    width = max(len(r[0]) for r in rows)
    header = f"{'workload':<{width}}  {'python':>10}  {'compiled':>10}  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, t_py, t_c, speed in rows:
        if t_c is None:
            print(f"{name:<{width}}  {t_py * 1e3:>8.2f}ms  {'-':>10}  {'-':>8}")
        else:
            print(f"{name:<{width}}  {t_py * 1e3:>8.2f}ms  {t_c * 1e3:>8.2f}ms  "
                  f"{speed:>7.1f}x")


if __name__ == "__main__":
    main()
