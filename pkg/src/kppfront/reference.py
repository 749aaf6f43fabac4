"""Independent reference integrator (cross-validation oracle).

Fully explicit scheme on a fixed fine grid with first-order boundary flux
and forward-Euler front update; same Trace contract as the main solver,
no shared stepping code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _refcore_py
from ._stepcore_py import (
    STATUS_BUDGET,
    STATUS_FLOOR,
    STATUS_NEGATIVE,
    STATUS_NONFINITE,
)
from .solver import (
    InitialData,
    ProblemSpec,
    SimControls,
    StepFailure,
    Trace,
    FrontFixedState,
    init_state,
)

try:
    from ._refcore import ref_march as _ref_march_compiled

    HAVE_COMPILED = True
except ImportError:
    _ref_march_compiled = None
    HAVE_COMPILED = False


@dataclass(frozen=True)
class RefControls:
    """Controls of the reference run (fixed fine grid, explicit stepping)."""

    N: int = 1200
    T_max: float = 50.0
    H_floor: float | None = None
    dt_max: float = math.inf
    diff_cfl: float = 0.35
    react_cfl: float = 0.2
    snapshot_times: tuple[float, ...] = ()
    backend: str = "auto"
    max_steps: int = 2_000_000_000
    max_records: int = 200_000

    def floor_for(self, h0: float) -> float:
        if self.H_floor is not None:
            return self.H_floor
        return max(10.0 * h0 / self.N, 1e-4 * h0)


def reference_simulate(spec: ProblemSpec, data: InitialData, controls: RefControls) -> Trace:
    """Same Trace contract as :func:`kppfront.solver.simulate`."""
    sim_like = SimControls(N=controls.N, T_max=controls.T_max, H_floor=controls.H_floor)
    state = init_state(spec, data, controls.N)
    H_floor = controls.floor_for(spec.h0)
    C1 = max(1.0, data.sup)
    K = spec.f.lipschitz_cap(C1)

    # estimate the step count to pick a recording stride capping memory
    dy = 1.0 / controls.N
    dt_est = min(controls.diff_cfl * (dy * spec.h0) ** 2, controls.react_cfl / K)
    est_steps = controls.T_max / dt_est
    stride = max(1, int(est_steps / controls.max_records) + 1)

    use_compiled = HAVE_COMPILED and spec.f.name == "logistic" and controls.backend in (
        "auto",
        "compiled",
    )
    if controls.backend == "compiled" and not use_compiled:
        raise RuntimeError("compiled reference backend unavailable for this configuration")
    march = _ref_march_compiled if use_compiled else _refcore_py.ref_march
    extra = {}
    if not use_compiled and spec.f.name != "logistic":
        extra["f"] = spec.f.f

    stops = sorted(
        {float(controls.T_max)}
        | {float(ts) for ts in controls.snapshot_times if 0.0 < ts <= controls.T_max}
    )
    snap_set = {float(ts) for ts in controls.snapshot_times}
    from .solver import boundary_flux

    chunks = [
        np.array(
            [[0.0, state.H, float(np.max(state.v)), -state.v[-2] * controls.N, state.Hdot]]
        )
    ]
    snapshots: list[FrontFixedState] = []
    if 0.0 in snap_set:
        snapshots.append(state.copy())
    rec = np.empty((min(controls.max_records, 400_000), 5))
    terminal = "horizon-reached"
    t, H = state.t, state.H
    done = False

    for t_stop in stops:
        while True:
            status, nrec, t, H, Hdot = march(
                state.v,
                H,
                t,
                spec.c,
                spec.mu,
                K,
                controls.diff_cfl,
                controls.react_cfl,
                controls.dt_max,
                t_stop,
                H_floor,
                controls.max_steps,
                rec,
                stride,
                **extra,
            )
            if nrec:
                chunks.append(rec[:nrec].copy())
            state.t, state.H, state.Hdot = t, H, Hdot
            if status == STATUS_BUDGET:
                if nrec == 0:
                    raise StepFailure("reference march made no progress")
                continue
            break
        if status == STATUS_FLOOR:
            terminal = "floor-hit"
            done = True
        elif status in (STATUS_NEGATIVE, STATUS_NONFINITE):
            terminal = "step-failure"
            done = True
        if not done and t_stop in snap_set:
            snapshots.append(state.copy())
        if done or t_stop >= controls.T_max:
            break

    data_arr = np.concatenate(chunks, axis=0)
    return Trace(
        spec=spec,
        t=data_arr[:, 0],
        H=data_arr[:, 1],
        umax=data_arr[:, 2],
        flux=data_arr[:, 3],
        Hdot=data_arr[:, 4],
        snapshots=snapshots,
        terminal=terminal,
        controls=sim_like,
    )
