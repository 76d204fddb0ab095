#!/usr/bin/env python3
"""Benchmark the compiled estimator kernels against the numpy fallback.

Feeds identical chunk inputs to both backends and reports per-kernel
timings, the speedup, and the agreement of the results.  Also times the
end-to-end conditional estimator once per backend via the public API.

Usage: python benchmarks/bench_kernels.py [--n 2000000]
"""

import argparse
import math
import time

import numpy as np

from tailsum import ModelSpec
from tailsum._kernels import BACKEND, available_backends
from tailsum.montecarlo import _conditional_plan


def time_call(fn, repeats=5):
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_crude(backends, m, d, u=10.0, seed=0):
    rng = np.random.default_rng(seed)
    x = np.ascontiguousarray(np.exp(rng.standard_normal((m, d))))
    results, times = {}, {}
    for name, mod in backends.items():
        results[name] = mod.crude_chunk(x, u)
        times[name] = time_call(lambda mod=mod: mod.crude_chunk(x, u))
    return results, times


def bench_conditional(backends, m, d, rho=0.9, u=100.0, seed=0):
    spec = ModelSpec.standard(d, rho)
    plan = _conditional_plan(spec, u, tilt=True, mix=0.5)
    rng = np.random.default_rng(seed)
    chol = spec.sigma.cholesky()
    y = np.ascontiguousarray(rng.standard_normal((m, d)) @ chol.T)
    umix = np.ascontiguousarray(rng.random((m, d)))
    lam = np.ascontiguousarray(spec.lam)
    bg = np.ascontiguousarray(spec.beta * spec.gamma)
    out = np.empty(m)
    results, times = {}, {}
    for name, mod in backends.items():
        def run(mod=mod):
            mod.conditional_chunk(y, umix, out, u, lam, bg, plan.others,
                                  plan.alpha, plan.cond_sd, plan.shift,
                                  plan.tilt_vec, plan.tilt_const, plan.mix)
        run()
        results[name] = float(out.sum())
        times[name] = time_call(run)
    return results, times


def bench_end_to_end(n, u=100.0, rho=0.9, seed=7):
    from tailsum import conditional_max_mc

    spec = ModelSpec.standard(2, rho)
    t0 = time.perf_counter()
    est = conditional_max_mc(spec, u, n, seed=seed)
    return est, time.perf_counter() - t0


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--n", type=int, default=2_000_000,
                        help="total draws for the end-to-end run")
    parser.add_argument("--chunk", type=int, default=1 << 18,
                        help="rows per kernel chunk benchmark")
    args = parser.parse_args()

    backends = available_backends()
    print(f"active backend: {BACKEND};  available: {sorted(backends)}")
    if len(backends) < 2:
        print("compiled backend missing; nothing to compare "
              "(build with `pip install -e .`)")

    header = f"{'kernel':<24}{'rows':>10}" + "".join(
        f"{name + ' [s]':>14}" for name in sorted(backends))
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))

    for d in (2, 5):
        results, times = bench_crude(backends, args.chunk, d)
        assert len(set(results.values())) == 1, results
        row = f"{f'crude_chunk d={d}':<24}{args.chunk:>10}" + "".join(
            f"{times[name]:>14.4f}" for name in sorted(times))
        if len(times) == 2:
            row += f"{times['numpy'] / times['cython']:>9.1f}x"
        print(row)

    for d in (2, 5):
        results, times = bench_conditional(backends, args.chunk, d)
        vals = list(results.values())
        spread = max(vals) - min(vals)
        assert spread <= 1e-9 * max(abs(v) for v in vals) + 1e-300, results
        row = f"{f'conditional_chunk d={d}':<24}{args.chunk:>10}" + "".join(
            f"{times[name]:>14.4f}" for name in sorted(times))
        if len(times) == 2:
            row += f"{times['numpy'] / times['cython']:>9.1f}x"
        print(row)

    est, elapsed = bench_end_to_end(args.n)
    print(f"\nend-to-end conditional_max_mc (backend={BACKEND}, "
          f"n={args.n:,}, rho=0.9, u=100):")
    print(f"  value {est.value:.6e}  rel stderr {est.stderr / est.value:.2%}  "
          f"wall {elapsed:.2f}s")
    print("  (set TAILSUM_KERNEL=numpy and rerun to time the fallback "
          "end to end)")


if __name__ == "__main__":
    main()
