"""Compiled vs pure-Python kernels, plus a short end-to-end sampler run.

    python3 benchmarks/bench_kernels.py [--n 100] [--p 10] [--repeat 200]
"""

import argparse
import time

import numpy as np

from sagp import _backend
from sagp.sampler import RunConfig, fit
from sagp.simulate import SimSpec, generate


def _time(fn, repeat):
    fn()  # warm-up
    best = np.inf
    for _ in range(3):
        t0 = time.perf_counter()
        for _ in range(repeat):
            fn()
        best = min(best, (time.perf_counter() - t0) / repeat)
    return best


def kernel_cases(n, p, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.uniform(size=(n, p))
    r = rng.standard_normal(n)
    kappa = rng.uniform(0.05, 1.0, size=p)
    k = _backend.kernels
    D = k.sq_dist_cache(X)
    S = np.empty((n, n))
    k.exponent_sum(D, kappa, S)
    S_out = np.empty((n, n))
    work = np.empty((n, n))
    return {
        "sq_dist_cache": lambda: k.sq_dist_cache(X),
        "exponent_sum": lambda: k.exponent_sum(D, kappa, S_out),
        "logmarg_from_exponent": lambda: k.logmarg_from_exponent(S, r, 0.05, work),
        "propose_logmarg": lambda: k.propose_logmarg(S, D[0], 0.1, r, 0.05, S_out, work),
        "best_split": lambda: k.best_split(np.sort(kappa)),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--p", type=int, default=10)
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--iterations", type=int, default=60)
    args = ap.parse_args()

    backends = [b for b in ("compiled", "python") if b in _backend.available()]
    if "compiled" not in backends:
        print("compiled extension not built; timing the Python kernels only")
    results = {}
    for b in backends:
        _backend.use(b)
        for name, fn in kernel_cases(args.n, args.p).items():
            results[(name, b)] = _time(fn, args.repeat)
    print(f"kernels, n={args.n} p={args.p} (microseconds per call)")
    print(f"{'kernel':<24}" + "".join(f"{b:>12}" for b in backends) + ("     speedup" if len(backends) == 2 else ""))
    for name in kernel_cases(4, 2):
        row = [results[(name, b)] * 1e6 for b in backends]
        line = f"{name:<24}" + "".join(f"{v:>12.1f}" for v in row)
        if len(row) == 2:
            line += f"{row[1] / row[0]:>12.2f}"
        print(line)

    X, y, *_ = generate(SimSpec(1, seed=0, n=args.n, p=args.p))
    ys = (y - y.mean()) / y.std()
    cfg = RunConfig(k=10, iterations=args.iterations, burn_in=args.iterations // 2, seed=0)
    print(f"\nsampler, k={cfg.k}, {cfg.iterations} sweeps")
    traces = {}
    for b in backends:
        _backend.use(b)
        res = fit(X, ys, cfg)
        traces[b] = res.trace
        print(f"{b:<10} {res.seconds:8.2f} s   {res.seconds / cfg.iterations * 1e3:8.1f} ms/sweep")
    if len(traces) == 2:
        diff = np.max(np.abs(traces["compiled"].kappa - traces["python"].kappa))
        print(f"max |kappa_compiled - kappa_python| over the trace: {diff:.3g}")
    _backend.use(backends[0])


if __name__ == "__main__":
    main()
