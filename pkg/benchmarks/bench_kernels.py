"""Compare the compiled and pure-Python kernels on the same inputs.

    python benchmarks/bench_kernels.py [--sizes 50,100,200] [--repeat 3]
"""

import argparse
import importlib
import os
import subprocess
import sys
import time

import numpy as np

from artifact.kernels import _pykernels as py

try:
    cy = importlib.import_module("artifact.kernels._ckernels")
except ImportError:
    cy = None


def instance(n, seed):
    rng = np.random.default_rng(seed)
    x = rng.random((n, 2))
    a, b = rng.random(n) + 0.01, rng.random(n) + 0.01
    b *= a.sum() / b.sum()
    return a, b, np.linalg.norm(x[:, None, :] - x[None, :, :], axis=-1)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


END_TO_END = """
import time, numpy as np
from artifact import BACKEND, interval, SubProbability, w0
X = interval(0.0, 1.0, {n})
rng = np.random.default_rng(0)
w = [rng.random(X.n) * (rng.random(X.n) < 0.3) for _ in range(2)]
for v in w:
    v[[0, -1]] = 0.0
mu, nu = (SubProbability(X, 0.7 * v / v.sum()) for v in w)
t0 = time.perf_counter()
val = w0(mu, nu, 1.0)[0]
print(BACKEND, time.perf_counter() - t0, val)
"""


def end_to_end(n):
    out = {}
    for pure in ("0", "1"):
        env = dict(os.environ, ARTIFACT_PURE_PYTHON=pure)
        res = subprocess.run([sys.executable, "-c", END_TO_END.format(n=n)], env=env, capture_output=True, text=True, check=True)
        backend, secs, val = res.stdout.split()
        out[backend] = (float(secs), float(val))
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="50,100,200")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--w0-points", type=int, default=101, help="grid size for the end-to-end w0 timing (0 to skip)")
    args = ap.parse_args(argv)
    sizes = [int(s) for s in args.sizes.split(",")]
    mods = [py] + ([cy] if cy is not None else [])
    if cy is None:
        print("compiled kernels not built; timing the Python backend only")
    print(f"{'kernel':<24}{'n':>6}" + "".join(f"{m.BACKEND:>12}" for m in mods) + f"{'speedup':>10}")
    for n in sizes:
        a, b, C = instance(n, n)
        Z = np.array([0, n - 1], dtype=np.int64)
        u, v = np.zeros(n), np.zeros(n)
        jobs = {
            "transport_simplex": lambda m: m.transport_simplex(a, b, C),
            "min_plus_through": lambda m: m.min_plus_through(C, Z),
            "negative_reduced_costs": lambda m: m.negative_reduced_costs(C - 0.5, u, v, -1e-10, 5),
            "triangle_violations": lambda m: m.triangle_violations(C, 1e-12, 20),
        }
        for name, job in jobs.items():
            res = [best_of(lambda m=m: job(m), args.repeat) for m in mods]
            if name == "transport_simplex" and len(res) == 2:
                costs = [float(C[r[0], r[1]] @ r[2]) for _, r in res]
                assert abs(costs[0] - costs[1]) <= 1e-9 * max(1.0, costs[0])
            line = f"{name:<24}{n:>6}" + "".join(f"{t:>11.4f}s" for t, _ in res)
            if len(res) == 2:
                line += f"{res[0][0] / max(res[1][0], 1e-9):>9.1f}x"
            print(line, flush=True)
    if args.w0_points:
        res = end_to_end(args.w0_points)
        vals = {v for _, v in res.values()}
        print(f"\nw0 on a {args.w0_points}-point grid: " + ", ".join(f"{b} {t:.3f}s" for b, (t, _) in sorted(res.items()))
              + f" (values agree: {max(vals) - min(vals) <= 1e-9})")


if __name__ == "__main__":
    main()
