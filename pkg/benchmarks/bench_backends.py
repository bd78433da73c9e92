"""Compare the compiled and pure-numpy backends.

Runs the same geodesic sweep and flow workload in two subprocesses, one with
ZOLLFLOW_NO_NUMBA=1 and one without, and prints wall times.  JIT warmup is
excluded by timing inside the child after a throwaway call.

Usage: python benchmarks/bench_backends.py [--quick]
"""

import argparse
import os
import subprocess
import sys

WORKLOAD = r"""
import time
import numpy as np
import zollflow as zf
from zollflow._accel import backend_name

quick = {quick}
n_nodes = 1025 if quick else 4097
n_flow = 257 if quick else 1025
samples = 4 if quick else 12
T = 0.002 if quick else 0.02

p = zf.michel_surface(zf.OddFunction((0.2, -0.2)), n_nodes=n_nodes)
zf.zoll_sweep(p, n_samples=3)  # warmup (JIT compile on the numba backend)
t0 = time.perf_counter()
rep = zf.zoll_sweep(p, n_samples=samples)
t_sweep = time.perf_counter() - t0

c = zf.ConformalProfile(u=0.05 * np.sin(np.linspace(0, np.pi, n_flow)) ** 2)
c.u -= 0.5 * np.log(c.area() / (4 * np.pi))
zf.evolve(zf.make_state(c.copy()), 1e-5)  # warmup
t0 = time.perf_counter()
st = zf.evolve(zf.make_state(c), T)[-1]
t_flow = time.perf_counter() - t0

print(f"{{backend_name():>6}}  sweep {{t_sweep:8.3f}}s  "
      f"flow {{t_flow:8.3f}}s  (spread {{rep.spread:.1e}}, "
      f"area {{st.area:.6f}})")
"""


def run(no_numba, quick):
    env = dict(os.environ)
    if no_numba:
        env["ZOLLFLOW_NO_NUMBA"] = "1"
    else:
        env.pop("ZOLLFLOW_NO_NUMBA", None)
    subprocess.run([sys.executable, "-c", WORKLOAD.format(quick=quick)],
                   env=env, check=True)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true",
                    help="smaller workload for smoke runs")
    args = ap.parse_args()
    print("backend     sweep        flow")
    run(no_numba=False, quick=args.quick)
    run(no_numba=True, quick=args.quick)


if __name__ == "__main__":
    main()
