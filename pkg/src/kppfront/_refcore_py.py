"""Pure-NumPy reference march: fully explicit, deliberately plain.

Independent cross-check for the main semi-implicit kernel; shares the
front-fixed formulation but none of the stepping choices: forward-Euler
everything, centered advection, first-order boundary flux.  Keep in sync
with ``_refcore.pyx``.
"""

from __future__ import annotations

import numpy as np

from ._stepcore_py import (
    ABORT_NEG,
    DT_MIN,
    STATUS_BUDGET,
    STATUS_FLOOR,
    STATUS_NEGATIVE,
    STATUS_NONFINITE,
    STATUS_T_STOP,
)


def ref_march(
    v: np.ndarray,
    H: float,
    t: float,
    c: float,
    mu: float,
    K: float,
    diff_cfl: float,
    react_cfl: float,
    dt_max: float,
    t_stop: float,
    H_floor: float,
    max_steps: int,
    rec: np.ndarray,
    stride: int = 1,
    f=None,
):
    n = v.shape[0] - 1
    dy = 1.0 / n
    yi = np.linspace(0.0, 1.0, n + 1)[1:-1]
    cap = rec.shape[0]
    nrec = 0
    Hdot_out = 0.0

    for step_i in range(max_steps):
        if t >= t_stop:
            return STATUS_T_STOP, nrec, t, H, Hdot_out
        if nrec >= cap:
            return STATUS_BUDGET, nrec, t, H, Hdot_out

        flux = -v[-2] / dy  # first-order one-sided, v[N] = 0
        Hdot = -mu * flux / H - c

        dt = min(diff_cfl * (dy * H) ** 2, react_cfl / K, dt_max)
        landed = False
        if t + dt >= t_stop:
            dt = t_stop - t
            landed = True
        if Hdot < 0.0:
            while dt > DT_MIN and H + 1.5 * dt * Hdot <= H_floor:
                dt *= 0.5
                landed = False

        lap = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / (dy * dy * H * H)
        adv = (c + yi * Hdot) * (v[2:] - v[:-2]) / (2.0 * dy * H)
        fv = v[1:-1] * (1.0 - v[1:-1]) if f is None else f(v[1:-1])
        vi = v[1:-1] + dt * (lap + adv + fv)

        if not np.all(np.isfinite(vi)):
            return STATUS_NONFINITE, nrec, t, H, Hdot_out
        vmin = vi.min()
        if vmin < 0.0:
            if vmin < ABORT_NEG:
                return STATUS_NEGATIVE, nrec, t, H, Hdot_out
            np.clip(vi, 0.0, None, out=vi)
        v[1:-1] = vi
        v[0] = 0.0
        v[-1] = 0.0

        H = H + dt * Hdot
        if not np.isfinite(H):
            return STATUS_NONFINITE, nrec, t, H, Hdot_out
        t = t_stop if landed else t + dt

        flux1 = -v[-2] / dy
        Hdot_out = -mu * flux1 / H - c

        if H <= H_floor or landed or (step_i % stride) == 0:
            rec[nrec, 0] = t
            rec[nrec, 1] = H
            rec[nrec, 2] = v.max()
            rec[nrec, 3] = flux1
            rec[nrec, 4] = Hdot_out
            nrec += 1

        if H <= H_floor:
            return STATUS_FLOOR, nrec, t, H, Hdot_out
        if landed:
            return STATUS_T_STOP, nrec, t, H, Hdot_out

    return STATUS_BUDGET, nrec, t, H, Hdot_out
