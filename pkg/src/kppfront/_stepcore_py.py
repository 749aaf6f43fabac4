"""Pure-NumPy march kernel for the front-fixed scheme.

Fallback used when the compiled extension is unavailable, and the only
backend supporting a pluggable nonlinearity and manufactured-solution
source hooks.  The update must stay in lockstep with ``_stepcore.pyx``:
one semi-implicit step is

1. boundary flux and front speed from the current profile,
2. explicit second-order upwind-biased advection + explicit reaction,
3. backward-Euler diffusion with the habitat width frozen at the
   predictor value (tridiagonal solve),
4. Heun predictor/corrector for the habitat width.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_banded

STATUS_T_STOP = 0
STATUS_FLOOR = 1
STATUS_NEGATIVE = 2
STATUS_NONFINITE = 3
STATUS_BUDGET = 4

ABORT_NEG = -1e-8
DT_MIN = 1e-10


def _flux(v: np.ndarray, dy: float) -> float:
    # second-order one-sided v_y at y = 1, using v[N] = 0
    return (v[-3] - 4.0 * v[-2]) / (2.0 * dy)


def _upwind_dv(v: np.ndarray, a: np.ndarray, dy: float) -> np.ndarray:
    """Second-order upwind-biased v_y at interior nodes (direction per node).

    Nodes lacking a second upwind neighbour use the centered stencil
    (still second order).
    """
    dv = (v[2:] - v[:-2]) / (2.0 * dy)  # centered default, j = 1..N-1
    pos = a >= 0.0
    fwd = (-3.0 * v[1:-2] + 4.0 * v[2:-1] - v[3:]) / (2.0 * dy)  # j = 1..N-2
    m = pos[:-1]
    dv[:-1][m] = fwd[m]
    bwd = (3.0 * v[2:-1] - 4.0 * v[1:-2] + v[:-3]) / (2.0 * dy)  # j = 2..N-1
    m = ~pos[1:]
    dv[1:][m] = bwd[m]
    return dv


def march(
    v: np.ndarray,
    H: float,
    t: float,
    c: float,
    mu: float,
    K: float,
    adv_cfl: float,
    react_cfl: float,
    dt_max: float,
    dt_fixed: float,
    t_stop: float,
    H_floor: float,
    max_steps: int,
    rec: np.ndarray,
    stride: int = 1,
    f=None,
    source_v=None,
    source_H=None,
):
    """Advance (v, H, t) until t_stop / floor / failure; v updated in place.

    Returns (status, nrec, t, H, Hdot); accepted steps land in ``rec`` rows
    (t, H, umax, flux, Hdot) every ``stride`` steps plus the final one.
    """
    n = v.shape[0] - 1
    dy = 1.0 / n
    yi = np.linspace(0.0, 1.0, n + 1)[1:-1]
    cap = rec.shape[0]
    nrec = 0
    Hdot_out = 0.0
    ab = np.empty((3, n - 1))

    for step_i in range(max_steps):
        if t >= t_stop:
            return STATUS_T_STOP, nrec, t, H, Hdot_out
        if nrec >= cap:
            return STATUS_BUDGET, nrec, t, H, Hdot_out

        flux0 = _flux(v, dy)
        Hdot0 = -mu * flux0 / H - c
        if source_H is not None:
            Hdot0 += source_H(t)

        if dt_fixed > 0.0:
            dt = dt_fixed
        else:
            speed = max(abs(c), abs(c + Hdot0))
            dt = adv_cfl * dy * H / speed if speed > 0 else np.inf
            dt = min(dt, react_cfl / K, dt_max)
        landed = False
        if t + dt >= t_stop:
            dt = t_stop - t
            landed = True
        if Hdot0 < 0.0:
            while dt > DT_MIN and H + 1.5 * dt * Hdot0 <= H_floor:
                dt *= 0.5
                landed = False

        a = (c + yi * Hdot0) / H
        dv = _upwind_dv(v, a, dy)
        fv = v[1:-1] * (1.0 - v[1:-1]) if f is None else f(v[1:-1])
        rhs = v[1:-1] + dt * (a * dv + fv)
        if source_v is not None:
            rhs = rhs + dt * source_v(t, yi)

        Hstar = H + dt * Hdot0
        if Hstar <= 0.0 or not np.isfinite(Hstar):
            return STATUS_NONFINITE, nrec, t, H, Hdot_out
        r = dt / (Hstar * Hstar * dy * dy)
        ab[0, :] = -r
        ab[1, :] = 1.0 + 2.0 * r
        ab[2, :] = -r
        vi = solve_banded((1, 1), ab, rhs)

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

        flux1 = _flux(v, dy)
        Hdot1 = -mu * flux1 / Hstar - c
        if source_H is not None:
            Hdot1 += source_H(t + dt)
        H = H + 0.5 * dt * (Hdot0 + Hdot1)
        if not np.isfinite(H):
            return STATUS_NONFINITE, nrec, t, H, Hdot_out
        t = t_stop if landed else t + dt

        Hdot_out = -mu * flux1 / H - c
        if source_H is not None:
            Hdot_out += source_H(t)

        terminal = H <= H_floor or landed
        if terminal or (step_i % stride) == 0:
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
