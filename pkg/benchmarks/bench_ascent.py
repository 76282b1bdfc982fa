"""Compare the compiled and numpy coordinate-ascent kernels on the oracle
workloads (CHSH on two qubits, Svetlichny / T / NS on three qubits).

    python benchmarks/bench_ascent.py [--states N] [--restarts R]
"""
import argparse
import time

import numpy as np

from cohnonlocal import _ascent_py
from cohnonlocal import nonlocality as nl
from cohnonlocal.qstate import random_density_matrix

try:
    from cohnonlocal import _ascent
except ImportError:
    _ascent = None


def workload(expr, dims, states, restarts, seed):
    rng = np.random.default_rng(seed)
    jobs = []
    for _ in range(states):
        R = nl._kernel_tensor(random_density_matrix(int(np.prod(dims)), rng, dims=dims))
        for _ in range(restarts):
            jobs.append((R, np.ascontiguousarray(nl._grid_starts(16, len(expr.labels), rng))))
    return jobs


def run(backend, expr, jobs, sweeps=200, tol=1e-14):
    coefs, idx = expr.coefs, expr.index
    party = np.ascontiguousarray(expr.party, dtype=np.int64)
    values = []
    start = time.perf_counter()
    for R, s0 in jobs:
        s = s0.copy()
        values.append(backend.ascend(R, coefs, idx, party, s, sweeps, tol)[0])
    return time.perf_counter() - start, np.array(values)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--states", type=int, default=50)
    ap.add_argument("--restarts", type=int, default=12)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    cases = [(nl.CHSH, (2, 2)), (nl.SVETLICHNY, (2, 2, 2)), (nl.T_INEQUALITY, (2, 2, 2)),
             (nl.NS_INEQUALITY, (2, 2, 2))]
    print(f"{'expression':<12}{'ascents':>9}{'numpy s':>11}{'cython s':>11}{'speedup':>10}{'max |diff|':>13}")
    for expr, dims in cases:
        jobs = workload(expr, dims, args.states, args.restarts, args.seed)
        t_py, v_py = run(_ascent_py, expr, jobs)
        if _ascent is None:
            print(f"{expr.name:<12}{len(jobs):>9}{t_py:>11.3f}{'n/a':>11}{'n/a':>10}{'n/a':>13}")
            continue
        t_cy, v_cy = run(_ascent, expr, jobs)
        print(f"{expr.name:<12}{len(jobs):>9}{t_py:>11.3f}{t_cy:>11.3f}{t_py / t_cy:>9.1f}x"
              f"{np.max(np.abs(v_py - v_cy)):>13.1e}")


if __name__ == "__main__":
    main()
