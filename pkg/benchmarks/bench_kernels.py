"""Compare the compiled march kernels against the NumPy fallbacks.

Run: python benchmarks/bench_kernels.py
"""

import time


import numpy as np

import kppfront as kf
from kppfront import stepcore
from kppfront.reference import HAVE_COMPILED as REF_COMPILED, RefControls, reference_simulate


def time_main(backend: str, n_rep: int = 3) -> tuple[float, int]:
    c_star2 = 0.5476852307738038  # c*(mu = 2)
    c = 0.9 * c_star2
    wave = kf.solve_compact_wave(c, 2.0, tol=1e-9)
    spec = kf.ProblemSpec(c=c, mu=2.0, h0=wave.L)
    data = kf.initial_compact_wave(wave)
    controls = kf.SimControls(N=400, T_max=20.0, backend=backend)
    best = float("inf")
    steps = 0
    for _ in range(n_rep):
        t0 = time.perf_counter()
        trace = kf.simulate(spec, data, controls)
        best = min(best, time.perf_counter() - t0)
        steps = len(trace)
    return best, steps


def time_reference(backend: str) -> tuple[float, int]:
    c_star2 = 0.5476852307738038
    c = 0.9 * c_star2
    wave = kf.solve_compact_wave(c, 2.0, tol=1e-9)
    spec = kf.ProblemSpec(c=c, mu=2.0, h0=wave.L)
    data = kf.initial_compact_wave(wave)
    controls = RefControls(N=400, T_max=2.0, backend=backend)
    t0 = time.perf_counter()
    trace = reference_simulate(spec, data, controls)
    return time.perf_counter() - t0, len(trace)


def main() -> None:
    print(f"main kernel backend available: {stepcore.HAVE_COMPILED}")
    t_py, n = time_main("python")
    print(f"  python   : {t_py:8.3f} s  ({n} recorded steps)")
    if stepcore.HAVE_COMPILED:
        t_c, n = time_main("compiled")
        print(f"  compiled : {t_c:8.3f} s  ({n} recorded steps)")
        print(f"  speedup  : {t_py / t_c:8.1f}x")

    print(f"reference kernel backend available: {REF_COMPILED}")
    t_py, n = time_reference("python")
    print(f"  python   : {t_py:8.3f} s  ({n} recorded rows)")
    if REF_COMPILED:
        t_c, n = time_reference("compiled")
        print(f"  compiled : {t_c:8.3f} s  ({n} recorded rows)")
        print(f"  speedup  : {t_py / t_c:8.1f}x")


if __name__ == "__main__":
    main()
