#!/usr/bin/env python3
"""Compare the compiled and pure kernel backends.

Times the raw kernel (per-day draw loop) and a full-scale simulate +
certificate on each available backend, and verifies the outputs agree
bit-for-bit.  Run from the repo root:

    python benchmarks/bench_backends.py
"""

import time

from hicalib import backend
from hicalib.adversary import IIDAdversary
from hicalib.certificate import check_chain
from hicalib.engine import simulate
from hicalib.forecaster import coupled_parameters
from hicalib.simplex import uniform


def time_kernel(kern, n_days: int) -> float:
    cums, den = [3, 5, 9, 10], 10
    t0 = time.perf_counter()
    kern.sim_days(12345, 0, n_days, cums, den, 4, 777, 0, 3, True, False, False)
    return time.perf_counter() - t0


def time_full_run(name: str):
    backend.set_backend(name)
    cfg = coupled_parameters(2, 0.5)
    t0 = time.perf_counter()
    run = simulate(cfg, IIDAdversary(uniform(2)), seed=2024)
    sim = time.perf_counter() - t0
    t0 = time.perf_counter()
    rep = check_chain(run)
    cert = time.perf_counter() - t0
    return sim, cert, run, rep


def main():
    names = backend.available()
    print(f"backends available: {', '.join(names)}")
    n_days = 2_000_000
    kernel_times = {}
    for name in names:
        backend.set_backend(name)
        kernel_times[name] = time_kernel(backend.active(), n_days)
        rate = n_days / kernel_times[name] / 1e6
        print(f"kernel [{name:8s}] {n_days} sampled days: "
              f"{kernel_times[name]:7.3f}s  ({rate:6.1f} M days/s)")
    if len(names) == 2:
        print(f"kernel speedup: {kernel_times['pure'] / kernel_times['compiled']:.1f}x")

    runs = {}
    for name in names:
        sim, cert, run, rep = time_full_run(name)
        runs[name] = run
        print(f"full run  [{name:8s}] T = {run.cfg.T}: simulate {sim:6.3f}s, "
              f"certificate {cert:6.3f}s, A3/T = {rep.chain['A3'] / run.cfg.T:.4f}, "
              f"passed = {rep.passed}")
    if len(names) == 2:
        same = (
            runs["pure"].leaf_counts == runs["compiled"].leaf_counts
            and runs["pure"].dce_tallies == runs["compiled"].dce_tallies
        )
        print(f"backends bit-identical on the full-scale run: {same}")
        if not same:
            raise SystemExit(1)


if __name__ == "__main__":
    main()
