"""Timing comparison of the compiled and pure experiment kernels.

    python benchmarks/bench_kernels.py [--repeat 5]

Both backends are importable modules, so one process times them head to
head: the selected backend through the public wrappers, the pure module
called directly with the same primitives.  Reports best-of-N wall times.
"""

import argparse
import time

import numpy as np

import genvi._pykernels as pyk
from genvi.fpu import FpuSystem, _midpoint_matrices, initial_state
from genvi.kernels import (
    BACKEND,
    RESONANCE_METHODS,
    chain_trajectory,
    resonance_energy_errors,
    step_count,
)
from genvi.rootfind import SolveSettings
from genvi.taylor_vi import gauss_legendre

RESONANCE_T = 200.0
RESONANCE_H = np.linspace(0.3, 1.2, 10)
CHAIN_T = 50.0
CHAIN_H = 0.01


def best_of(repeat, fn):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def pure_resonance(method):
    rule = gauss_legendre(4)
    st = SolveSettings()
    hs = [float(h) for h in RESONANCE_H]
    pyk.resonance_sweep(
        RESONANCE_METHODS[method], 0.1, 1.0, 0.0, hs,
        [step_count(RESONANCE_T, h) for h in hs],
        1e6, list(rule.weights), list(rule.nodes),
        st.tol, st.max_iter, st.fd_step, 1e-8,
    )


def pure_chain(method, system):
    base = initial_state(system)
    n = step_count(CHAIN_T, CHAIN_H)
    if method == "sv":
        pyk.fpu_sv_trajectory(system.omega, system.m, 1.0, base.q, base.p, CHAIN_H, n, 10)
    elif method == "imex":
        _, a_inv, b_mat = _midpoint_matrices(system, CHAIN_H)
        pyk.fpu_imex_trajectory(
            system.omega, system.m, 1.0, base.q, base.p, CHAIN_H, n, 10, a_inv, b_mat)
    else:
        st = SolveSettings()
        pyk.fpu_htvi_trajectory(
            system.omega, system.m, 1.0, base.q, base.p, CHAIN_H, n, 10,
            st.tol, st.max_iter, st.fd_step)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5, help="best of N timings")
    args = parser.parse_args()

    if BACKEND != "compiled":
        print("note: compiled backend not available; both columns run pure Python")
    system = FpuSystem(omega=50.0, m=3)

    jobs = []
    for method in ("exact_dl", "avg_h"):
        jobs.append((
            f"resonance {method} ({len(RESONANCE_H)} h, T={RESONANCE_T:g})",
            lambda m=method: resonance_energy_errors(m, 0.1, RESONANCE_H, RESONANCE_T),
            lambda m=method: pure_resonance(m),
        ))
    for method in ("sv", "htvi", "imex"):
        jobs.append((
            f"chain {method} (h={CHAIN_H:g}, T={CHAIN_T:g})",
            lambda m=method: chain_trajectory(m, system, CHAIN_H, CHAIN_T, stride=10),
            lambda m=method: pure_chain(m, system),
        ))

    width = max(len(label) for label, _, _ in jobs)
    print(f"{'workload':<{width}}  {BACKEND:>10}  {'pure':>10}  speedup")
    for label, selected, pure in jobs:
        t_sel = best_of(args.repeat, selected)
        t_pure = best_of(args.repeat, pure)
        print(f"{label:<{width}}  {t_sel:>9.4f}s  {t_pure:>9.4f}s  {t_pure / t_sel:>6.1f}x")


if __name__ == "__main__":
    main()
