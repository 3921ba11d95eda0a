"""Compare the numba kernels with their numpy twins.

The backend is fixed at import time, so each one runs in its own interpreter
with LTPHI_NUMBA set accordingly.  Usage::

    python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import json
import os
import subprocess
import sys
from timeit import repeat


def workloads():
    import numpy as np

    from ltphi import _kernels as K
    from ltphi import charp, glclasses
    from ltphi import fields as ff

    rng = np.random.default_rng(0)
    a = rng.integers(0, 2, 379)
    b = rng.integers(0, 2, 379)
    mod = np.array(ff.least_irreducible(2, 378), dtype=np.int64)
    M = rng.integers(0, 3, (200, 200))
    L = ff.make_field(3, 4)
    log, exp, digits, frob = L.tables()
    A = np.array([[1, 2], [0, 5]], dtype=np.int64)
    reps = glclasses.class_representatives(2, 1, 4)
    return {
        "polymulmod deg 378 over F_2": lambda: K.polymulmod(a, b, mod, 2),
        "rref 200x200 over F_3": lambda: K.rref(M, 3),
        "count solutions in F_81^2": lambda: K.count_solutions(A, frob, log, exp, digits, 3, 81, 2),
        "dimension law GL_4(F_2) classes": lambda: [charp.dimension_law_holds(r.matrix, 1) for r in reps],
    }


def worker(n):
    from ltphi import _kernels as K

    out = {"backend": "numba" if K.USE_NUMBA else "numpy"}
    for name, fn in workloads().items():
        fn()  # warm-up, includes JIT compilation
        out[name] = min(repeat(fn, number=1, repeat=n))
    print(json.dumps(out))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.worker:
        worker(args.repeat)
        return
    res = {}
    for flag in ("1", "0"):
        env = dict(os.environ, LTPHI_NUMBA=flag)
        cmd = [sys.executable, __file__, "--worker", "--repeat", str(args.repeat)]
        line = subprocess.run(cmd, env=env, capture_output=True, text=True, check=True).stdout.strip().splitlines()[-1]
        data = json.loads(line)
        res[data.pop("backend")] = data
    print(f"{'workload':36s} {'numba [s]':>11s} {'numpy [s]':>11s} {'speedup':>8s}")
    for name in res["numpy"]:
        nb, npy = res.get("numba", {}).get(name), res["numpy"][name]
        speed = f"{npy / nb:7.1f}x" if nb else "   n/a"
        print(f"{name:36s} {nb if nb else float('nan'):11.5f} {npy:11.5f} {speed}")


if __name__ == "__main__":
    main()
