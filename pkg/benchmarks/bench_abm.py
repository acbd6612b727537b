"""Wall-clock comparison of the numba and pure-numpy ABM backends.

    python benchmarks/bench_abm.py [--steps 2000 5000 10000] [--repeat 3]

The first numba call includes compilation and is reported separately.
"""

import argparse
import time

import numpy as np

from fracstab._jit import HAVE_NUMBA
from fracstab.fde_solver import linear_problem, solve
from fracstab.fhn import FhnParams, equilibrium, make_fhn_problem


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, nargs="+", default=[2000, 5000, 10000])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    A = np.array([[-1.0, 1.0], [-1.0, -1.0]])
    params = FhnParams(0.08, 0.7, 0.8, 1.24567)
    eq = equilibrium(params)
    cases = {
        "linear 2x2": lambda n: linear_problem(A, [0.4, 0.8], [1.0, 1.0], n * 0.01, 0.01),
        "FitzHugh-Nagumo": lambda n: make_fhn_problem(params, 0.63, 0.8, eq.v_star + 0.01, eq.w_star, n * 0.01, 0.01),
    }

    if HAVE_NUMBA:
        t0 = time.perf_counter()
        for make in cases.values():
            solve(make(10), backend="numba")
        print(f"numba warm-up (compile or cache load): {time.perf_counter() - t0:.2f}s")
    else:
        print("numba disabled, timing the numpy backend only")

    print(f"{'case':<18}{'steps':>8}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>9}{'max diff':>11}")
    for name, make in cases.items():
        for n in args.steps:
            prob = make(n)
            t_np, ref = _best(lambda: solve(prob, backend="numpy"), args.repeat)
            if HAVE_NUMBA:
                t_nb, fast = _best(lambda: solve(prob, backend="numba"), args.repeat)
                diff = float(np.max(np.abs(fast.states - ref.states)))
                print(f"{name:<18}{n:>8}{t_np:>12.3f}{t_nb:>12.3f}{t_np / t_nb:>9.1f}{diff:>11.1e}")
            else:
                print(f"{name:<18}{n:>8}{t_np:>12.3f}{'-':>12}{'-':>9}{'-':>11}")


if __name__ == "__main__":
    main()
