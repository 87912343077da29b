"""Compare the numba and numpy kernel paths.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each kernel runs on identical inputs through both paths; compilation is
triggered once before timing.  The table reports the best wall time and
the max-entry difference between the two results.
"""
import argparse
import time

import numpy as np

from commdim import _kernels
from commdim.ensembles import antidist_matrix


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def bench_hals(n, r, sweeps, repeat):
    rng = np.random.default_rng(0)
    C = np.ascontiguousarray(antidist_matrix(n).entries)
    W0, H0 = rng.random((n, r)), rng.random((r, n))

    def run(kernel):
        W, H = W0.copy(), H0.copy()
        kernel(C, W, H, sweeps, 1e-16)
        return W @ H

    t_nb, a = _best(lambda: run(_kernels._hals_block_nb), repeat)
    t_np, b = _best(lambda: run(_kernels.hals_block_numpy), repeat)
    return f"hals n={n} r={r} sweeps={sweeps}", t_nb, t_np, float(np.max(np.abs(a - b)))


def bench_pgd(n, p, iters, repeat):
    rng = np.random.default_rng(1)
    T = antidist_matrix(n).entries
    Q = rng.random((p, n))
    Q /= Q.sum(axis=1, keepdims=True)
    X0 = _kernels.project_rows_simplex_numpy(rng.random((n, p)))
    step = 1.0 / np.linalg.norm(Q, 2) ** 2
    P = np.eye(n)

    def run(kernel):
        X = X0.copy()
        kernel(T, P, Q, X, iters, step)
        return X

    t_nb, a = _best(lambda: run(_kernels._simplex_pgd_nb), repeat)
    t_np, b = _best(lambda: run(_kernels.simplex_pgd_numpy), repeat)
    return f"simplex pgd n={n} p={p} iters={iters}", t_nb, t_np, float(np.max(np.abs(a - b)))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    _kernels.warmup()
    rows = [
        bench_hals(7, 6, 500, args.repeat),
        bench_hals(32, 8, 200, args.repeat),
        bench_hals(128, 16, 50, args.repeat),
        bench_pgd(7, 4, 500, args.repeat),
        bench_pgd(32, 8, 200, args.repeat),
        bench_pgd(128, 16, 50, args.repeat),
    ]
    print(f"{'kernel':<36}{'numba [s]':>11}{'numpy [s]':>11}{'speedup':>9}{'max diff':>11}")
    for name, t_nb, t_np, diff in rows:
        print(f"{name:<36}{t_nb:>11.4f}{t_np:>11.4f}{t_np / t_nb:>8.1f}x{diff:>11.1e}")


if __name__ == "__main__":
    main()
