"""Adaptive integration of planar ODE fields with event stopping.

Thin contract layer over :func:`scipy.integrate.solve_ivp` (DOP853) used by
all the phase-plane shooting in :mod:`kppfront.profiles`.  Dense output is
always kept so profiles can be resampled on arbitrary grids, and events are
restricted to the one kind the shooting needs: a state component crossing
zero in a given direction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp


class IntegrationFailure(RuntimeError):
    """Adaptive stepping broke down (stiff/blow-up trajectory).

    Carries the last reachable state so callers can report how far the
    trajectory got.
    """

    def __init__(self, message: str, last_t: float, last_y: np.ndarray):
        super().__init__(f"{message} (last state t={last_t!r}, y={last_y!r})")
        self.last_t = last_t
        self.last_y = np.asarray(last_y, dtype=float)


@dataclass(frozen=True)
class ZeroCrossing:
    """Stop when state component ``index`` crosses zero.

    direction -1 stops on decreasing crossings, +1 on increasing ones,
    0 on either.  ``offset`` shifts the crossing level away from zero.
    """

    index: int
    direction: int = -1
    terminal: bool = True
    offset: float = 0.0


@dataclass(frozen=True)
class Trajectory:
    """Dense-output trajectory, possibly ended by an event."""

    t: np.ndarray
    y: np.ndarray
    dense: Callable[[np.ndarray], np.ndarray]
    event_index: int | None
    event_t: float | None
    event_y: np.ndarray | None

    @property
    def end_t(self) -> float:
        return float(self.t[-1])

    @property
    def end_y(self) -> np.ndarray:
        return self.y[:, -1]

    def sample(self, t: np.ndarray) -> np.ndarray:
        return self.dense(t)


def integrate_ivp(
    field: Callable[[float, np.ndarray], Sequence[float]],
    start: Sequence[float],
    span: tuple[float, float],
    tol: float,
    events: Sequence[ZeroCrossing] = (),
) -> Trajectory:
    """Integrate ``y' = field(t, y)`` over ``span`` with local error ``tol``.

    Events are located by root refinement inside the accepted step, so the
    stopping state satisfies ``|y[index] - offset| <= tol``.  Raises
    :class:`IntegrationFailure` when the step size underflows.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")

    scipy_events = []
    for ev in events:
        def make(ev: ZeroCrossing):
            def g(t, y):
                return y[ev.index] - ev.offset

            g.terminal = ev.terminal
            g.direction = float(ev.direction)
            return g

        scipy_events.append(make(ev))

    sol = solve_ivp(
        field,
        span,
        np.asarray(start, dtype=float),
        method="DOP853",
        rtol=tol,
        atol=0.01 * tol,
        events=scipy_events,
        dense_output=True,
    )
    if sol.status == -1:
        raise IntegrationFailure(sol.message, float(sol.t[-1]), sol.y[:, -1])

    event_index = None
    event_t = None
    event_y = None
    if sol.status == 1:
        for k, te in enumerate(sol.t_events):
            if te.size:
                event_index = k
                event_t = float(te[0])
                event_y = sol.y_events[k][0]
                break

    return Trajectory(
        t=sol.t,
        y=sol.y,
        dense=sol.sol,
        event_index=event_index,
        event_t=event_t,
        event_y=event_y,
    )
