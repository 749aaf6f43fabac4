"""Trichotomy classification with grid-checkable certificates.

Every admissible run ends in exactly one of three regimes: vanishing
(habitat width collapses in finite time), spreading (front speed tends to
the invasion speed c*), or transition (width tends to L_c and the profile
to the compact wave).  A finite-budget classifier cannot decide the
asymptotics by watching alone, so declarations rest on rigorous
sufficient conditions where possible:

* vanishing is declared on habitat collapse (floor-hit), which is
  equivalent to finite-time blow-down;
* spreading is declared only when the solution dominates a shifted copy
  of the compact wave with a strict margin (a comparison-principle
  certificate), never on large width alone;
* transition is declared softly, from the width settling near L_c with a
  small profile distance, and Undetermined is a first-class outcome.

Small initial data admit an a priori vanishing certificate built from the
exponentially weighted sine majorant psi(x) = eps^2 e^{-cx/2} sin(pi x/h0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .profiles import CompactWave, solve_compact_wave, solve_semi_wave
from .solver import (
    BoundMonitor,
    FrontFixedState,
    InitialData,
    ProblemSpec,
    SimControls,
    Trace,
    simulate,
    to_physical,
)


class ClassificationConflict(RuntimeError):
    """A spreading certificate fired on a run that later collapsed."""


class TraceContractError(ValueError):
    """An estimator was fed a trace with the wrong terminal event."""


@dataclass(frozen=True)
class Certificate:
    """Grid-checked sufficient condition; parameters depend on the kind.

    kinds: 'VanishMajorant' (eps, psi bound), 'VanishConstant' (C),
    'SpreadProfile' (shift b, margin).
    """

    kind: str
    params: dict
    checked_at: float


@dataclass(frozen=True)
class Outcome:
    """Tagged classification result; exactly one regime per run."""

    tag: str  # Vanishing | Spreading | Transition | Undetermined
    t_star: float | None = None
    c_hat: float | None = None
    shift_b: float | None = None
    L_hat: float | None = None
    trans_distance: float | None = None
    diagnostics: dict = field(default_factory=dict)
    certificates: tuple[Certificate, ...] = ()
    trace: Trace | None = None

    def __post_init__(self):
        if self.tag not in ("Vanishing", "Spreading", "Transition", "Undetermined"):
            raise ValueError(f"unknown outcome tag {self.tag!r}")
        need = {
            "Vanishing": ("t_star",),
            "Spreading": ("c_hat",),
            "Transition": ("L_hat",),
            "Undetermined": (),
        }[self.tag]
        for name in need:
            val = getattr(self, name)
            if val is None or not math.isfinite(val) or val <= 0:
                raise ValueError(f"{self.tag} outcome needs positive finite {name}")


def vanishing_majorant(h0: float, c: float, mu: float, K: float):
    """(eps, psi) with psi(x) = eps^2 e^{-cx/2} sin(pi x / h0) on [0, h0].

    Any initial profile below psi collapses by time 2 h0 / c.  The
    amplitude uses the largest admissible weight C = c / (2 sqrt(2K) mu)
    and eps = 0.99 * min of the admissibility bounds.
    """
    if min(h0, c, mu, K) <= 0:
        raise ValueError("all inputs must be positive")
    C = c / (2.0 * math.sqrt(2.0 * K) * mu)
    b1 = c * h0 / (mu * math.pi * C)
    b2 = C * math.exp(-2.0 * K * h0 / c)
    b3 = 1.0
    # the quadratic constraint eps^2 mu (c/2 + pi/h0) < c/4 binds only for
    # tiny mu; included for safety
    b4 = math.sqrt(c / (4.0 * mu * (0.5 * c + math.pi / h0)))
    eps = 0.99 * min(b1, b2, b3, b4)
    x = np.linspace(0.0, h0, 2049)
    psi = eps**2 * np.exp(-0.5 * c * x) * np.sin(np.pi * x / h0)
    psi[0] = 0.0
    psi[-1] = 0.0
    return eps, x, psi


def vanishing_constant(h0: float, c: float, mu: float, K: float) -> float:
    """inf of the doubled-domain majorant over the centred original domain.

    Any data with sup-norm below this constant vanishes.
    """
    eps, x, psi = vanishing_majorant(2.0 * h0, c, mu, K)
    mask = (x >= 0.5 * h0) & (x <= 1.5 * h0)
    return float(np.min(psi[mask]))


def spreading_certificate(
    state: FrontFixedState,
    wave: CompactWave,
    c: float,
    margin: float | None = None,
) -> float | None:
    """First grid shift b with u(t, x) >= V_c(x - b) + margin inside the support.

    The margin is required at nodes interior to [b, b + L_c] (the support
    endpoints carry V_c = 0 where u >= 0 holds anyway); a strict interior
    margin discharges the 'not identically equal' hypothesis of the
    comparison argument.  Returns None when no shift works.
    """
    if margin is None:
        margin = 1e-6 * float(np.max(wave.V))
    H = state.H
    if H < wave.L:
        return None
    n = state.N
    dy = 1.0 / n
    step_x = dy * H
    m_max = int(math.floor(wave.L / step_x))
    offs = np.arange(1, m_max + 1) * step_x
    inside = offs < wave.L
    W = np.asarray(wave.profile.sample(offs[inside]))
    j_max = n - m_max
    v = state.v
    for j in range(0, j_max + 1):
        seg = v[j + 1 : j + 1 + len(W)]
        if seg.shape != W.shape:
            break
        if np.all(seg >= W + margin):
            return state.t * c + j * step_x
    return None


def transition_distance(state: FrontFixedState, wave: CompactWave, c: float) -> float:
    """max over the grid of |u(t,x) - V_c(x - h(t) + L_c)| (V_c extended by 0)."""
    x = c * state.t + state.y * state.H
    h = c * state.t + state.H
    ref = np.asarray(wave.profile.sample(x - h + wave.L))
    return float(np.max(np.abs(state.v - ref)))


def sign_changes(
    state: FrontFixedState,
    reference,
    shift: float,
    c: float,
    noise_floor: float = 1e-9,
) -> int:
    """Strict sign alternations of u(t, .) - reference(. - shift) on the grid.

    Nodes with |difference| below the noise floor are ignored; a
    diagnostic mirror of the zero-number monotonicity, not a proof device.
    """
    x = c * state.t + state.y * state.H
    ref = np.asarray(reference.sample(x - shift))
    d = state.v - ref
    signs = np.sign(d[np.abs(d) > noise_floor])
    if signs.size < 2:
        return 0
    return int(np.sum(signs[1:] != signs[:-1]))


@dataclass(frozen=True)
class SpeedEstimate:
    """Least-squares front speed over a trailing window of the trace."""

    c_hat: float
    intercept: float
    excess_max: float  # max of h(t) - c_hat * t over the window
    window: tuple[float, float]
    n_samples: int


def estimate_speed(trace: Trace, window: float = 0.5) -> SpeedEstimate:
    """Fit h(t) ~ c_hat * t + b on [window * T_end, T_end]."""
    if not 0.0 < window < 1.0:
        raise ValueError("window must be a fraction in (0, 1)")
    t_end = trace.t_end
    mask = trace.t >= window * t_end
    if int(mask.sum()) < 10:
        raise TraceContractError(
            f"speed window holds {int(mask.sum())} samples, need at least 10"
        )
    t = trace.t[mask]
    h = trace.h[mask]
    A = np.vstack([t, np.ones_like(t)]).T
    (c_hat, b), *_ = np.linalg.lstsq(A, h, rcond=None)
    return SpeedEstimate(
        c_hat=float(c_hat),
        intercept=float(b),
        excess_max=float(np.max(h - c_hat * t)),
        window=(float(t[0]), float(t[-1])),
        n_samples=len(t),
    )


def estimate_extinction_time(trace: Trace) -> float:
    """Linear extrapolation of H through the last two samples to H = 0."""
    if trace.terminal != "floor-hit":
        raise TraceContractError(
            f"extinction estimate needs a floor-hit trace, got {trace.terminal!r}"
        )
    t1, t0 = trace.t[-1], trace.t[-2]
    H1, H0 = trace.H[-1], trace.H[-2]
    if H0 <= H1:
        return float(t1)
    return float(t1 + H1 * (t1 - t0) / (H0 - H1))


@dataclass(frozen=True)
class Violation:
    t: float
    kind: str
    magnitude: float


def bound_monitor(
    trace: Trace,
    bounds: BoundMonitor,
    tol_umax: float = 1e-8,
    tol_hprime: float = 1e-6,
) -> list[Violation]:
    """Scan a trace against the a priori bounds 0 < u <= C1, 0 < h' <= mu C2."""
    out: list[Violation] = []
    mu = trace.spec.mu
    hp = trace.spec.c + trace.Hdot
    for i in np.nonzero(trace.umax > bounds.C1 + tol_umax)[0]:
        out.append(Violation(float(trace.t[i]), "umax", float(trace.umax[i] - bounds.C1)))
    for i in np.nonzero(hp <= 0.0)[0]:
        out.append(Violation(float(trace.t[i]), "front-monotone", float(hp[i])))
    for i in np.nonzero(hp > mu * bounds.C2 + tol_hprime)[0]:
        out.append(Violation(float(trace.t[i]), "front-speed", float(hp[i] - mu * bounds.C2)))
    return out


@dataclass(frozen=True)
class ClassifyBudget:
    """Finite observation budget for classify()."""

    T_max: float
    N: int = 400
    tol: float = 1e-9  # profile root-solve tolerance
    tol_trans: float = 0.1
    margin: float | None = None
    poll_dt: float | None = None
    stop_on_certificate: bool = False
    H_floor: float | None = None
    dt_max: float = math.inf


def _h_trend(trace: Trace, L_ref: float) -> str:
    """Soft side assignment for inconclusive runs: which way is H heading."""
    t_end = trace.t_end
    tail = trace.t >= 0.8 * t_end
    slope = float(np.polyfit(trace.t[tail], trace.H[tail], 1)[0]) if tail.sum() > 2 else 0.0
    H_end = float(trace.H[-1])
    if H_end > 1.5 * L_ref and slope > 0:
        return "spreading-side"
    if H_end < 0.75 * L_ref and slope < 0:
        return "vanishing-side"
    return "unresolved"


def classify(spec: ProblemSpec, data: InitialData, budget: ClassifyBudget) -> Outcome:
    """Run the solver under a finite budget and emit a certified outcome.

    Logistic nonlinearity only (the thresholds lean on c* and L_c).
    """
    if spec.f.name != "logistic":
        raise ValueError("classification thresholds are implemented for logistic f only")

    sw = solve_semi_wave(spec.mu, tol=budget.tol)
    c_star = sw.c_star
    controls = SimControls(
        N=budget.N,
        T_max=budget.T_max,
        H_floor=budget.H_floor,
        dt_max=budget.dt_max,
        snapshot_times=(budget.T_max,),
    )

    certificates: list[Certificate] = []
    C1 = max(1.0, data.sup)
    K = spec.f.lipschitz_cap(C1)

    if spec.c >= c_star:
        trace = simulate(spec, data, controls)
        diag = {"c_star": c_star, "regime": "c >= c*", "H_end": float(trace.H[-1])}
        if trace.terminal == "floor-hit":
            return Outcome(
                tag="Vanishing",
                t_star=estimate_extinction_time(trace),
                diagnostics=diag,
                certificates=tuple(certificates),
                trace=trace,
            )
        diag["note"] = "supercritical erosion guarantees collapse; budget too small"
        return Outcome(
            tag="Undetermined", diagnostics=diag, certificates=tuple(certificates), trace=trace
        )

    wave = solve_compact_wave(spec.c, spec.mu, tol=budget.tol)

    C_van = vanishing_constant(spec.h0, spec.c, spec.mu, K)
    if data.sup <= C_van:
        certificates.append(
            Certificate(kind="VanishConstant", params={"C": C_van}, checked_at=0.0)
        )
    eps, xg, psi = vanishing_majorant(spec.h0, spec.c, spec.mu, K)
    # interior nodes only: both sides vanish at the ends (validated for the
    # data), where float noise in the evaluation would spoil the comparison
    if np.all(np.asarray(data.evaluate(xg[1:-1])) <= psi[1:-1]):
        certificates.append(
            Certificate(kind="VanishMajorant", params={"eps": eps}, checked_at=0.0)
        )

    margin = budget.margin if budget.margin is not None else 1e-6 * float(np.max(wave.V))
    spread_cert: list[Certificate] = []

    def observer(state: FrontFixedState) -> str:
        if spread_cert:
            return "continue"
        b = spreading_certificate(state, wave, spec.c, margin)
        if b is not None:
            spread_cert.append(
                Certificate(
                    kind="SpreadProfile", params={"b": b, "margin": margin}, checked_at=state.t
                )
            )
            if budget.stop_on_certificate:
                return "stop"
        return "continue"

    # check the certificate on the initial state too
    from .solver import init_state

    b0 = spreading_certificate(init_state(spec, data, budget.N), wave, spec.c, margin)
    if b0 is not None:
        spread_cert.append(
            Certificate(kind="SpreadProfile", params={"b": b0, "margin": margin}, checked_at=0.0)
        )
    if spread_cert and budget.stop_on_certificate:
        # verdict already decided; a short run still provides the trace fields
        controls = SimControls(
            N=budget.N,
            T_max=min(budget.T_max, 1.0),
            H_floor=budget.H_floor,
            dt_max=budget.dt_max,
        )
    trace = simulate(
        spec,
        data,
        controls,
        observer=observer if not spread_cert else None,
        observer_dt=budget.poll_dt,
    )

    certificates.extend(spread_cert)
    diag = {
        "c_star": c_star,
        "L_c": wave.L,
        "H_end": float(trace.H[-1]),
        "C_van": C_van,
    }

    if trace.terminal == "floor-hit":
        if spread_cert:
            raise ClassificationConflict(
                "spreading certificate at t="
                f"{spread_cert[0].checked_at!r} but the run collapsed at t={trace.t[-1]!r}"
            )
        return Outcome(
            tag="Vanishing",
            t_star=estimate_extinction_time(trace),
            diagnostics=diag,
            certificates=tuple(certificates),
            trace=trace,
        )
    if trace.terminal == "step-failure":
        diag["note"] = "solver step failure"
        return Outcome(
            tag="Undetermined", diagnostics=diag, certificates=tuple(certificates), trace=trace
        )

    if spread_cert:
        try:
            est = estimate_speed(trace)
            c_hat = est.c_hat
            diag["excess_max"] = est.excess_max
        except TraceContractError:
            c_hat = float(trace.spec.c + trace.Hdot[-1])
        eps_w = 0.1 * (c_star - spec.c)
        x_lo = (spec.c + eps_w) * trace.t_end
        x_hi = (c_star - eps_w) * trace.t_end
        diag["interior_window"] = (x_lo, x_hi)
        final = trace.snapshots[-1] if trace.snapshots else None
        if final is not None and x_hi > x_lo:
            xs = np.linspace(x_lo, x_hi, 257)
            diag["interior_min"] = float(np.min(to_physical(final, xs, spec.c)))
        return Outcome(
            tag="Spreading",
            c_hat=c_hat,
            shift_b=spread_cert[0].params["b"],
            diagnostics=diag,
            certificates=tuple(certificates),
            trace=trace,
        )

    # horizon reached without certificates: transition or abstain
    H_end = float(trace.H[-1])
    final_state = trace.snapshots[-1] if trace.snapshots else None
    dist = transition_distance(final_state, wave, spec.c) if final_state is not None else math.inf
    diag["transition_distance"] = dist
    if abs(H_end - wave.L) <= budget.tol_trans * wave.L and dist <= budget.tol_trans:
        return Outcome(
            tag="Transition",
            L_hat=H_end,
            trans_distance=dist,
            diagnostics=diag,
            certificates=tuple(certificates),
            trace=trace,
        )
    diag["trend"] = _h_trend(trace, wave.L)
    diag["L_gap_rel"] = abs(H_end - wave.L) / wave.L
    return Outcome(
        tag="Undetermined", diagnostics=diag, certificates=tuple(certificates), trace=trace
    )
