"""Front-fixed time integration of the eroding-habitat free boundary problem.

The habitat ``ct < x < h(t)`` is mapped onto the unit interval by
``y = (x - ct)/H(t)`` with ``H = h - ct``, turning the problem into

    v_t = v_yy / H^2 + (c + y H') v_y / H + f(v),   v(t,0) = v(t,1) = 0,
    H'  = -mu v_y(t,1) / H - c,

(see docs/front_fixing.md for the derivation).  One semi-implicit step:
implicit diffusion (tridiagonal solve, H frozen at a predictor value),
explicit upwind-biased advection and reaction, Heun update for H.  The
time step obeys an advective CFL bound ``0.4 dy H / max|c + y H'|`` and a
reaction bound ``0.1 / max|f'|``, and is halved when the habitat width
approaches the floor so the collapse time is resolved to step accuracy.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from . import stepcore
from ._stepcore_py import (
    STATUS_BUDGET,
    STATUS_FLOOR,
    STATUS_NEGATIVE,
    STATUS_NONFINITE,
    STATUS_T_STOP,
)
from .profiles import CompactWave, sample_profile

TERMINAL_BY_STATUS = {
    STATUS_T_STOP: "horizon-reached",
    STATUS_FLOOR: "floor-hit",
    STATUS_NEGATIVE: "step-failure",
    STATUS_NONFINITE: "step-failure",
}

VALIDATION_GRID = 2048


class ValidationError(ValueError):
    """Initial data violates the hard admissibility conditions."""


class StepFailure(RuntimeError):
    """The scheme produced a non-finite value or a large negative undershoot."""


@dataclass(frozen=True)
class Nonlinearity:
    """Reaction term f with the structure the a priori bounds rely on."""

    name: str
    f: Callable[[np.ndarray], np.ndarray]
    fprime: Callable[[np.ndarray], np.ndarray]
    fprime_at_1: float

    def lipschitz_cap(self, umax: float) -> float:
        """max |f'| over [0, umax]; exact for the logistic term."""
        if self.name == "logistic":
            return max(1.0, abs(1.0 - 2.0 * umax))
        u = np.linspace(0.0, umax, 4097)
        return float(np.max(np.abs(self.fprime(u))))

    def validate(self) -> None:
        for val, where in ((self.f(np.array(0.0)), 0.0), (self.f(np.array(1.0)), 1.0)):
            if abs(float(val)) > 1e-12:
                raise ValidationError(f"f({where}) = {float(val)!r}, expected 0")
        if not self.fprime_at_1 < 0:
            raise ValidationError("f'(1) must be negative")
        u = np.linspace(1.0 + 1e-6, 10.0, 64)
        if not np.all(self.f(u) < 0):
            raise ValidationError("f(u) must be negative for u > 1")


def logistic() -> Nonlinearity:
    return Nonlinearity(
        name="logistic",
        f=lambda u: u * (1.0 - u),
        fprime=lambda u: 1.0 - 2.0 * u,
        fprime_at_1=-1.0,
    )


@dataclass(frozen=True)
class ProblemSpec:
    """Fixed parameters of the free boundary problem."""

    c: float
    mu: float
    h0: float
    f: Nonlinearity = field(default_factory=logistic)

    def __post_init__(self):
        for name in ("c", "mu", "h0"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be positive")
        self.f.validate()


@dataclass(frozen=True)
class InitialData:
    """Initial profile on [0, h0] with its admissibility classification.

    ``in_X_class`` records whether the discrete slope conditions of the
    admissible class hold (positive one-sided slope at 0, negative at h0,
    positive interior); data outside the class is accepted with a warning
    since only the boundary and sign conditions are structurally required.
    """

    h0: float
    evaluate: Callable[[np.ndarray], np.ndarray]
    label: str
    values: np.ndarray
    in_X_class: bool
    violations: tuple[str, ...]

    @property
    def sup(self) -> float:
        return float(np.max(self.values))

    @property
    def slope_sup(self) -> float:
        dx = self.h0 / (len(self.values) - 1)
        return float(np.max(np.abs(np.diff(self.values)))) / dx


def make_initial(h0: float, fn: Callable[[np.ndarray], np.ndarray], label: str) -> InitialData:
    """Sample and classify an initial profile; hard-fails only on boundary
    or negativity violations."""
    if h0 <= 0:
        raise ValidationError("h0 must be positive")
    x = np.linspace(0.0, h0, VALIDATION_GRID + 1)
    vals = np.asarray(fn(x), dtype=float)
    scale = max(1.0, float(np.max(np.abs(vals))))
    hard = []
    if abs(vals[0]) > 1e-12 * scale:
        hard.append(f"u0(0) = {vals[0]!r} != 0")
    if abs(vals[-1]) > 1e-12 * scale:
        hard.append(f"u0(h0) = {vals[-1]!r} != 0")
    if np.min(vals) < -1e-12 * scale:
        hard.append(f"u0 has negative values (min {vals.min()!r})")
    if hard:
        raise ValidationError("; ".join(hard))
    soft = []
    if not vals[1] > vals[0]:
        soft.append("one-sided slope at 0 is not positive")
    if not vals[-2] > vals[-1]:
        soft.append("one-sided slope at h0 is not negative")
    if not np.all(vals[1:-1] > 0):
        soft.append("u0 vanishes at an interior node")
    if soft:
        warnings.warn(
            f"initial data {label!r} is outside the admissible class: " + "; ".join(soft),
            stacklevel=2,
        )
    return InitialData(
        h0=h0,
        evaluate=fn,
        label=label,
        values=vals,
        in_X_class=not soft,
        violations=tuple(soft),
    )


def initial_sine(h0: float, sigma: float) -> InitialData:
    return make_initial(h0, lambda x: sigma * np.sin(np.pi * x / h0), f"sine(sigma={sigma!r})")


def initial_bump(h0: float, sigma: float) -> InitialData:
    return make_initial(
        h0, lambda x: sigma * 4.0 * x * (h0 - x) / h0**2, f"bump(sigma={sigma!r})"
    )


def initial_compact_wave(
    wave: CompactWave, shift: float = 0.0, scale: float = 1.0, h0: float | None = None
) -> InitialData:
    """V_c-shaped data: scale * V_c(x - shift) on [0, h0] (default h0 = L_c + shift).

    When h0 agrees with shift + L_c up to root-solve tolerance the support
    is mapped onto [shift, h0] exactly, so the boundary value is a clean 0.
    """
    if h0 is None:
        h0 = wave.L + shift
    profile = wave.profile
    stretch = 1.0
    if abs(h0 - shift - wave.L) <= 1e-6 * wave.L:
        stretch = wave.L / (h0 - shift)

    def fn(x):
        z = (np.asarray(x, dtype=float) - shift) * stretch
        return scale * np.asarray(profile.sample(z))

    return make_initial(h0, fn, f"compact-wave(shift={shift!r}, scale={scale!r})")


def initial_custom(xs: np.ndarray, us: np.ndarray) -> InitialData:
    """Tabulated data (monotone-safe interpolation between samples)."""
    from .profiles import TabulatedProfile

    xs = np.asarray(xs, dtype=float)
    us = np.asarray(us, dtype=float)
    if xs.ndim != 1 or xs.shape != us.shape or len(xs) < 4:
        raise ValidationError("custom data needs matching 1-d arrays, length >= 4")
    if not np.all(np.diff(xs) > 0) or xs[0] != 0.0:
        raise ValidationError("custom data abscissae must increase from 0")
    prof = TabulatedProfile(xs, us, extend="zero")
    return make_initial(float(xs[-1]), lambda x: np.asarray(prof.sample(x)), "custom")


@dataclass
class FrontFixedState:
    """Solution profile on the fixed unit interval plus the habitat width."""

    t: float
    H: float
    v: np.ndarray
    Hdot: float

    @property
    def N(self) -> int:
        return len(self.v) - 1

    @property
    def y(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, len(self.v))

    def copy(self) -> "FrontFixedState":
        return FrontFixedState(t=self.t, H=self.H, v=self.v.copy(), Hdot=self.Hdot)


@dataclass(frozen=True)
class SimControls:
    """Numerical controls for simulate(); defaults follow the module contract."""

    N: int = 400
    T_max: float = 50.0
    H_floor: float | None = None  # default max(10*h0/N, 1e-4*h0)
    dt_max: float = math.inf
    dt_fixed: float | None = None
    adv_cfl: float = 0.4
    react_cfl: float = 0.1
    snapshot_times: tuple[float, ...] = ()
    record_stride: int = 1
    backend: str = "auto"  # auto | compiled | python
    max_steps: int = 50_000_000

    def floor_for(self, h0: float) -> float:
        if self.H_floor is not None:
            return self.H_floor
        return max(10.0 * h0 / self.N, 1e-4 * h0)


@dataclass
class Trace:
    """Recorded time series of one run; h = c t + H by construction."""

    spec: ProblemSpec
    t: np.ndarray
    H: np.ndarray
    umax: np.ndarray
    flux: np.ndarray
    Hdot: np.ndarray
    snapshots: list[FrontFixedState]
    terminal: str
    controls: SimControls

    @property
    def h(self) -> np.ndarray:
        return self.spec.c * self.t + self.H

    @property
    def t_end(self) -> float:
        return float(self.t[-1])

    def __len__(self) -> int:
        return len(self.t)


def boundary_flux(state: FrontFixedState) -> float:
    """Second-order one-sided v_y(t, 1); exact for linear profiles.

    The physical Stefan rate is h' = -mu * flux / H.
    """
    dy = 1.0 / state.N
    return (state.v[-3] - 4.0 * state.v[-2]) / (2.0 * dy)


def init_state(spec: ProblemSpec, data: InitialData, N: int = 400) -> FrontFixedState:
    """Sample the initial data onto the solver grid: v[j] = u0(j h0 / N)."""
    if N < 16:
        raise ValidationError(f"N must be at least 16, got {N}")
    if abs(data.h0 - spec.h0) > 1e-12 * max(1.0, spec.h0):
        raise ValidationError(f"data.h0 = {data.h0!r} does not match spec.h0 = {spec.h0!r}")
    x = np.linspace(0.0, spec.h0, N + 1)
    v = np.asarray(data.evaluate(x), dtype=float).copy()
    v[0] = 0.0
    v[-1] = 0.0
    state = FrontFixedState(t=0.0, H=spec.h0, v=v, Hdot=0.0)
    state.Hdot = -spec.mu * boundary_flux(state) / state.H - spec.c
    return state


def to_physical(state: FrontFixedState, x, c: float) -> np.ndarray | float:
    """u(t, x) = v(t, (x - ct)/H) by linear interpolation, 0 outside.

    The affine map is snapped at the habitat edges so x = ct and
    x = ct + H give exact zeros despite rounding.
    """
    x = np.asarray(x, dtype=float)
    y = (x - c * state.t) / state.H
    y = np.where(np.abs(y) < 1e-12, 0.0, y)
    y = np.where(np.abs(y - 1.0) < 1e-12, 1.0, y)
    out = np.interp(y, state.y, state.v, left=0.0, right=0.0)
    inside = (y >= 0.0) & (y <= 1.0)
    out = np.where(inside, out, 0.0)
    if out.ndim == 0:
        return float(out)
    return out


def _march_args(spec: ProblemSpec, controls: SimControls, K: float):
    return dict(
        c=spec.c,
        mu=spec.mu,
        K=K,
        adv_cfl=controls.adv_cfl,
        react_cfl=controls.react_cfl,
        dt_max=controls.dt_max,
        dt_fixed=controls.dt_fixed if controls.dt_fixed is not None else 0.0,
    )


def _pick_march(spec: ProblemSpec, controls: SimControls, has_sources: bool):
    """Kernel selection: compiled path only for the logistic nonlinearity
    without source hooks."""
    if controls.backend not in ("auto", "compiled", "python"):
        raise ValidationError(f"unknown backend {controls.backend!r}")
    want_compiled = controls.backend in ("auto", "compiled")
    can_compiled = stepcore.HAVE_COMPILED and spec.f.name == "logistic" and not has_sources
    if controls.backend == "compiled" and not can_compiled:
        raise ValidationError(
            "compiled backend requested but unavailable for this configuration"
        )
    if want_compiled and can_compiled:
        return stepcore.march_compiled, {}
    extra = {} if spec.f.name == "logistic" else {"f": spec.f.f}
    return stepcore.march_python, extra


def step(
    state: FrontFixedState,
    spec: ProblemSpec,
    dt: float,
    source_v: Callable | None = None,
    source_H: Callable | None = None,
) -> FrontFixedState:
    """One semi-implicit step of size dt; returns a new state.

    ``source_v(t, y)`` and ``source_H(t)`` augment the right-hand sides
    (used by the manufactured-solution tests).
    """
    if dt <= 0:
        raise ValidationError("dt must be positive")
    new = state.copy()
    rec = np.empty((2, 5))
    C1 = max(1.0, float(np.max(state.v)))
    K = spec.f.lipschitz_cap(C1)
    from ._stepcore_py import march as march_py

    extra = {} if spec.f.name == "logistic" else {"f": spec.f.f}
    status, nrec, t, H, Hdot = march_py(
        new.v,
        state.H,
        state.t,
        t_stop=state.t + dt,
        H_floor=0.0,
        max_steps=1,
        rec=rec,
        stride=1,
        source_v=source_v,
        source_H=source_H,
        **extra,
        **_march_args(spec, replace(SimControls(), dt_fixed=dt), K),
    )
    if status in (STATUS_NEGATIVE, STATUS_NONFINITE):
        raise StepFailure(f"step failed with status {status} at t={state.t!r}")
    new.t, new.H, new.Hdot = t, H, Hdot
    return new


def simulate(
    spec: ProblemSpec,
    data: InitialData,
    controls: SimControls,
    observer: Callable[[FrontFixedState], str] | None = None,
    observer_dt: float | None = None,
) -> Trace:
    """Run until T_max, habitat collapse (floor-hit), or scheme failure.

    Snapshot times are landed on exactly.  ``observer`` is polled at chunk
    boundaries (every ``observer_dt``) and may return 'stop' to terminate
    early (terminal tag 'observer-stop').
    """
    state = init_state(spec, data, controls.N)
    H_floor = controls.floor_for(spec.h0)
    C1 = max(1.0, data.sup)
    K = spec.f.lipschitz_cap(C1)

    boundaries = {float(controls.T_max)}
    boundaries.update(float(ts) for ts in controls.snapshot_times if ts <= controls.T_max)
    if observer is not None:
        poll = observer_dt if observer_dt is not None else controls.T_max / 200.0
        k = 1
        while k * poll < controls.T_max:
            boundaries.add(k * poll)
            k += 1
    stops = sorted(b for b in boundaries if b > 0.0)
    snap_set = {float(ts) for ts in controls.snapshot_times}

    march, extra = _pick_march(spec, controls, has_sources=False)
    args = _march_args(spec, controls, K)

    chunks = [np.array([[0.0, state.H, float(np.max(state.v)), boundary_flux(state), state.Hdot]])]
    snapshots: list[FrontFixedState] = []
    if 0.0 in snap_set:
        snapshots.append(state.copy())
    cap = 400_000
    rec = np.empty((cap, 5))
    terminal = "horizon-reached"
    t, H = state.t, state.H

    done = False
    for t_stop in stops:
        while True:
            status, nrec, t, H, Hdot = march(
                state.v,
                H,
                t,
                t_stop=t_stop,
                H_floor=H_floor,
                max_steps=controls.max_steps,
                rec=rec,
                stride=controls.record_stride,
                **extra,
                **args,
            )
            if nrec:
                chunks.append(rec[:nrec].copy())
            state.t, state.H, state.Hdot = t, H, Hdot
            if status == STATUS_BUDGET:
                if nrec == 0:
                    raise StepFailure("march made no progress within its budget")
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
        if not done and observer is not None:
            if observer(state) == "stop":
                terminal = "observer-stop"
                done = True
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
        controls=controls,
    )


@dataclass(frozen=True)
class BoundMonitor:
    """A priori bound constants of the front-speed estimate.

    C1 = max(1, sup u0); M = max(sqrt(2K)/2, sup|u0'|/C1); C2 = 2 C1 M.
    Solutions satisfy 0 < u <= C1 and 0 < h' <= mu C2.
    """

    C1: float
    M: float
    C2: float
    K: float

    @classmethod
    def from_data(cls, spec: ProblemSpec, data: InitialData) -> "BoundMonitor":
        C1 = max(1.0, data.sup)
        K = spec.f.lipschitz_cap(C1)
        M = max(math.sqrt(2.0 * K) / 2.0, data.slope_sup / C1)
        return cls(C1=C1, M=M, C2=2.0 * C1 * M, K=K)
