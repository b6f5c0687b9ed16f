"""Compare the compiled kernel backend against the NumPy fallback.

Usage: python benchmarks/bench_kernels.py [--n 12] [--repeats 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from npce.kernels import available_backends


def random_victory_matrix(rng, n):
    M = rng.random((n, n))
    P = M / (M + M.T)
    np.fill_diagonal(P, 0.5)
    return P


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=12, help="number of options")
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--steps", type=int, default=5000)
    ap.add_argument("--replications", type=int, default=200)
    args = ap.parse_args()

    backends = available_backends()
    print(f"backends: {', '.join(backends)}")
    rng = np.random.default_rng(7)
    P = random_victory_matrix(rng, args.n)
    rates = rng.random((args.n, args.n)) / args.n
    u_init = rng.random(args.replications)
    u_chal = rng.random((200 + args.steps, args.replications))
    u_win = rng.random((200 + args.steps, args.replications))

    solve_out = {}
    counts_out = {}
    for name, mod in backends.items():
        t_solve, (p, iters, resid) = best_of(
            lambda m=mod: m.solve_stationary(P, rates, 1e-10, 10_000), args.repeats)
        t_mc, counts = best_of(
            lambda m=mod: m.chain_counts(P, rates, u_init, u_chal, u_win, 200),
            args.repeats)
        solve_out[name] = np.asarray(p)
        counts_out[name] = np.asarray(counts)
        print(f"{name:>8}: solve {t_solve * 1e3:8.3f} ms ({iters} iters)   "
              f"chain {t_mc * 1e3:8.3f} ms "
              f"({args.replications} reps x {args.steps + 200} steps)")

    names = list(backends)
    if len(names) == 2:
        a, b = names
        dp = float(np.max(np.abs(solve_out[a] - solve_out[b])))
        same = np.array_equal(counts_out[a], counts_out[b])
        print(f"cross-check: solver max deviation {dp:.2e}; "
              f"chain counts identical: {same}")
        assert dp < 1e-12 and same


if __name__ == "__main__":
    main()
