"""Manufactured solution for order verification of the front-fixed scheme.

Prescribes smooth fields

    H_m(t) = 2 + 0.4 sin(0.9 t),
    v_m(t, y) = (0.6 + 0.25 sin(0.7 t)) sin(pi y),

and the source terms that make them an exact solution of the augmented
system.  The closed forms here are cross-derived symbolically in
``tests/test_mms.py``.
"""

from __future__ import annotations

import math

import numpy as np

H0, HA, HW = 2.0, 0.4, 0.9
A0, AA, AW = 0.6, 0.25, 0.7


def H_exact(t: float) -> float:
    return H0 + HA * math.sin(HW * t)


def Hdot_exact(t: float) -> float:
    return HA * HW * math.cos(HW * t)


def amp(t: float) -> float:
    return A0 + AA * math.sin(AW * t)


def amp_dot(t: float) -> float:
    return AA * AW * math.cos(AW * t)


def v_exact(t: float, y: np.ndarray) -> np.ndarray:
    return amp(t) * np.sin(np.pi * np.asarray(y))


def source_v(t: float, y: np.ndarray, c: float, mu: float):
    """v_t - v_yy/H^2 - (c + y H') v_y / H - v(1 - v) for the fields above."""
    y = np.asarray(y)
    H = H_exact(t)
    Hp = Hdot_exact(t)
    A = amp(t)
    s = np.sin(np.pi * y)
    cth = np.cos(np.pi * y)
    v = A * s
    v_t = amp_dot(t) * s
    v_y = A * np.pi * cth
    v_yy = -A * np.pi * np.pi * s
    return v_t - v_yy / H**2 - (c + y * Hp) * v_y / H - v * (1.0 - v)


def source_H(t: float, c: float, mu: float) -> float:
    """H' - (-mu v_y(t,1)/H - c) for the fields above."""
    H = H_exact(t)
    v_y1 = -amp(t) * np.pi
    return Hdot_exact(t) - (-mu * v_y1 / H - c)


def run(c: float, mu: float, N: int, dt: float, T: float):
    """March the augmented scheme from the exact fields; return final errors.

    Returns (err_H, err_v): |H - H_m(T)| and the max-norm profile error.
    """
    from .solver import FrontFixedState, ProblemSpec, step

    spec = ProblemSpec(c=c, mu=mu, h0=H_exact(0.0))
    y = np.linspace(0.0, 1.0, N + 1)
    v = v_exact(0.0, y)
    v[0] = v[-1] = 0.0
    state = FrontFixedState(t=0.0, H=H_exact(0.0), v=v, Hdot=0.0)
    sv = lambda t, yy: source_v(t, yy, c, mu)
    sh = lambda t: source_H(t, c, mu)
    nsteps = int(round(T / dt))
    for _ in range(nsteps):
        state = step(state, spec, dt, source_v=sv, source_H=sh)
    err_H = abs(state.H - H_exact(state.t))
    err_v = float(np.max(np.abs(state.v - v_exact(state.t, y))))
    return err_H, err_v
