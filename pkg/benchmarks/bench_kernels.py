#!/usr/bin/env python3
"""Time the numba kernels against the numpy fallbacks.

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --n 20000 --repeat 5

Each case runs once per backend to warm up (JIT compile), then reports the
best of ``--repeat`` timings and checks that both backends agree.
"""

import argparse
import time

import numpy as np

from colas import GenConfig, Regime, generate
from colas._accel import NUMBA_AVAILABLE, use_backend
from colas._kernels.pairs import radius_pairs
from colas._kernels.triangles import node_triangles
from colas.copula import CopulaFamily, WeightMarginal
from colas.rewiring import rewire_to_target_r


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases(n):
    pos = np.random.default_rng(1).random((n, 2))
    radius = np.sqrt(10.0 / (np.pi * n))
    g = generate(GenConfig(n=n, rho=10.0, lam=5.0, regime=Regime.FIXED_EXP, family=CopulaFamily.fgm(0.5, 2), seed=1))
    ht = GenConfig(n=n, rho=2.0, lam=2.0, regime=Regime.HEAVY_TAIL, family=CopulaFamily.fgm(0.5, 2),
                   marginal=WeightMarginal.pareto(2.5), seed=1)
    yield "radius_pairs", lambda: radius_pairs(pos, radius), lambda a, b: all(np.array_equal(x, y) for x, y in zip(a, b))
    yield "node_triangles", lambda: node_triangles(g.indptr, g.indices), np.array_equal
    yield "generate_heavy_tail", lambda: generate(ht), lambda a, b: a.same_adjacency(b)
    yield ("rewire_20k_swaps", lambda: rewire_to_target_r(g, -0.2, max_swaps=20_000, tolerance=0.0, seed=2),
           lambda a, b: a.graph.same_adjacency(b.graph))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=10_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not NUMBA_AVAILABLE:
        print("numba not importable; nothing to compare")
        return
    print(f"n={args.n} repeat={args.repeat}")
    print(f"{'kernel':<22}{'numba s':>10}{'numpy s':>10}{'speedup':>9}  same")
    for name, fn, same in cases(args.n):
        with use_backend("numba"):
            t_nb, out_nb = best_of(fn, args.repeat)
        with use_backend("numpy"):
            t_np, out_np = best_of(fn, args.repeat)
        print(f"{name:<22}{t_nb:>10.4f}{t_np:>10.4f}{t_np / t_nb:>9.1f}  {same(out_nb, out_np)}")


if __name__ == "__main__":
    main()
