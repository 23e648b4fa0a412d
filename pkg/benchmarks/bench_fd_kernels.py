"""Wall-clock comparison of the numba and numpy finite-volume backends.

Run with ``python3 benchmarks/bench_fd_kernels.py [--repeat N]``. The first
numba call is timed separately so compilation is not charged to the steps.
"""

import argparse
import time

import numpy as np

from nanopore1d import fdsolver as fd


def run(backend, n, t_end):
    sc = fd.point_charge_scenario(1.0, 0.25, n, "neumann", [t_end])
    t0 = time.perf_counter()
    tr = fd.solve(sc, backend=backend)
    return time.perf_counter() - t0, tr


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--grids", default="101,201,401")
    p.add_argument("--tau", type=float, default=0.4)
    args = p.parse_args()

    warm, _ = run("numba", 21, 0.01)
    print(f"numba first call (compile + run): {warm:.2f} s")
    print(f"{'grid':>6} {'steps':>8} {'numpy s':>10} {'numba s':>10} {'speedup':>8} {'max |dv|':>10}")
    for n in (int(g) for g in args.grids.split(",")):
        tn, tb = [], []
        for _ in range(args.repeat):
            dt_np, a = run("numpy", n, args.tau)
            dt_nb, b = run("numba", n, args.tau)
            tn.append(dt_np)
            tb.append(dt_nb)
        diff = float(np.abs(a.snapshots[-1][1].v - b.snapshots[-1][1].v).max())
        print(f"{n:6d} {a.steps:8d} {min(tn):10.3f} {min(tb):10.3f} "
              f"{min(tn) / min(tb):8.1f} {diff:10.1e}")


if __name__ == "__main__":
    main()
