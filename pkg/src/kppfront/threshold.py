"""Sharp-threshold search over initial amplitudes, and phase-diagram sweeps.

For a fixed shape phi and data sigma * phi, small sigma vanishes and (when
the compact wave fits inside the initial habitat) large sigma spreads;
the changeover amplitude is a single sharp threshold.  ``find_threshold``
brackets it by certified bisection: only probes with a rigorous verdict
(collapse observed, or a spreading-profile certificate) move the bracket;
inconclusive probes refine a soft inner bracket that is reported
separately.  Verdict monotonicity in sigma is enforced as a hard
consistency check, since an inversion contradicts the comparison
principle.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .dynamics import ClassifyBudget, Outcome, classify, transition_distance
from .profiles import solve_compact_wave, solve_semi_wave
from .solver import InitialData, ProblemSpec, SimControls, initial_bump, initial_sine, simulate

SIGMA_CAP = 1e6
EXPAND_LIMIT = 10  # geometric doublings of sigma_hi before declaring sigma_bar infinite


class ThresholdRangeError(RuntimeError):
    """The supplied sigma range cannot start the bisection."""


class VerdictOrderError(RuntimeError):
    """A spreading verdict appeared below a vanishing verdict."""


def shape_data(kind: str, h0: float, sigma: float) -> InitialData:
    """Initial-data family used by threshold searches and sweeps."""
    if kind == "sine":
        return initial_sine(h0, sigma)
    if kind == "bump":
        return initial_bump(h0, sigma)
    raise ValueError(f"unknown shape family {kind!r}")


@dataclass(frozen=True)
class Verdict:
    sigma: float
    tag: str
    certified: bool
    soft_side: str  # vanishing-side | spreading-side | unresolved


@dataclass(frozen=True)
class ThresholdResult:
    sigma_lo: float  # largest certified-vanishing amplitude
    sigma_hi: float | None  # smallest certified-spreading amplitude
    iterations: int
    verdicts: tuple[Verdict, ...]
    infinite_flag: bool
    soft_lo: float
    soft_hi: float | None
    budget: ClassifyBudget
    shape: str

    @property
    def relative_width(self) -> float | None:
        if self.sigma_hi is None:
            return None
        return (self.sigma_hi - self.sigma_lo) / self.sigma_lo

    @property
    def sigma_mid(self) -> float | None:
        if self.sigma_hi is None:
            return None
        return 0.5 * (self.sigma_lo + self.sigma_hi)


def _verdict_of(outcome: Outcome) -> tuple[str, bool, str]:
    if outcome.tag == "Vanishing":
        return "Vanishing", True, "vanishing-side"
    if outcome.tag == "Spreading":
        return "Spreading", True, "spreading-side"
    side = outcome.diagnostics.get("trend", "unresolved")
    return outcome.tag, False, side


def _check_order(verdicts: list[Verdict]) -> None:
    vanish = [v.sigma for v in verdicts if v.tag == "Vanishing"]
    spread = [v.sigma for v in verdicts if v.tag == "Spreading"]
    if vanish and spread and max(vanish) >= min(spread):
        raise VerdictOrderError(
            f"vanishing at sigma={max(vanish)!r} above spreading at sigma={min(spread)!r}; "
            "contradicts comparison-principle monotonicity"
        )


def find_threshold(
    spec: ProblemSpec,
    shape: str,
    sigma_range: tuple[float, float],
    budget: ClassifyBudget,
    max_iter: int = 40,
    rel_width: float = 1e-2,
) -> ThresholdResult:
    """Certified bisection for the sharp threshold amplitude.

    Requires a vanishing verdict at ``sigma_range[0]``.  ``sigma_hi`` is
    expanded geometrically until a spreading verdict appears; when the
    erosion speed is supercritical (c >= c*) or the expansion exhausts its
    budget with every probe vanishing, the threshold is reported infinite.
    """
    lo0, hi0 = sigma_range
    if not 0 < lo0 < hi0:
        raise ThresholdRangeError("need 0 < sigma_lo < sigma_hi")
    probe_budget = replace(budget, stop_on_certificate=True)
    verdicts: list[Verdict] = []

    def probe(sigma: float) -> Verdict:
        out = classify(spec, shape_data(shape, spec.h0, sigma), probe_budget)
        tag, certified, side = _verdict_of(out)
        v = Verdict(sigma=sigma, tag=tag, certified=certified, soft_side=side)
        verdicts.append(v)
        _check_order(verdicts)
        return v

    sw = solve_semi_wave(spec.mu, tol=budget.tol)
    if spec.c >= sw.c_star:
        v = probe(lo0)
        return ThresholdResult(
            sigma_lo=lo0 if v.tag == "Vanishing" else 0.0,
            sigma_hi=None,
            iterations=0,
            verdicts=tuple(verdicts),
            infinite_flag=True,
            soft_lo=lo0,
            soft_hi=None,
            budget=budget,
            shape=shape,
        )

    v = probe(lo0)
    if v.tag != "Vanishing":
        raise ThresholdRangeError(
            f"sigma_range.lo={lo0!r} did not produce a vanishing verdict (got {v.tag}); "
            "small amplitudes are guaranteed to vanish, lower the range"
        )
    lo = lo0

    hi = None
    sigma = hi0
    for k in range(EXPAND_LIMIT + 1):
        if sigma > SIGMA_CAP:
            raise ThresholdRangeError(f"sigma probe exceeded the cap {SIGMA_CAP:g}")
        v = probe(sigma)
        if v.tag == "Spreading":
            hi = sigma
            break
        if v.tag == "Vanishing":
            lo = sigma
        sigma *= 2.0
    if hi is None:
        return ThresholdResult(
            sigma_lo=lo,
            sigma_hi=None,
            iterations=0,
            verdicts=tuple(verdicts),
            infinite_flag=True,
            soft_lo=lo,
            soft_hi=None,
            budget=budget,
            shape=shape,
        )

    soft_lo, soft_hi = lo, hi
    iterations = 0
    while iterations < max_iter and (hi - lo) / lo > rel_width:
        mid = 0.5 * (soft_lo + soft_hi)
        if not lo < mid < hi:
            mid = 0.5 * (lo + hi)
        v = probe(mid)
        iterations += 1
        if v.tag == "Vanishing":
            lo = mid
            soft_lo = max(soft_lo, mid)
        elif v.tag == "Spreading":
            hi = mid
            soft_hi = min(soft_hi, mid)
        else:
            # soft refinement only; the certified bracket stays put
            if v.soft_side == "spreading-side":
                soft_hi = min(soft_hi, mid)
            elif v.soft_side == "vanishing-side":
                soft_lo = max(soft_lo, mid)
            else:
                break  # cannot split an unresolved middle further
        soft_lo = max(soft_lo, lo)
        soft_hi = min(soft_hi, hi)

    return ThresholdResult(
        sigma_lo=lo,
        sigma_hi=hi,
        iterations=iterations,
        verdicts=tuple(verdicts),
        infinite_flag=False,
        soft_lo=soft_lo,
        soft_hi=soft_hi,
        budget=budget,
        shape=shape,
    )


@dataclass(frozen=True)
class ProbeReport:
    sigma: float | None
    H_end_gap_rel: float | None  # |H(T_end) - L_c| / L_c
    distance_times: tuple[float, ...]
    distances: tuple[float, ...]
    tail_nonincreasing: bool | None
    note: str


def near_threshold_probe(
    spec: ProblemSpec,
    shape: str,
    result: ThresholdResult,
    budget: ClassifyBudget,
    horizon_factor: float = 1.0,
    n_snapshots: int = 12,
    noise: float = 1e-3,
    refine_iters: int = 30,
) -> ProbeReport:
    """Run a near-threshold amplitude and report how wave-like the state becomes.

    A probe at relative distance d from the threshold leaves the transition
    wave after a time growing only like log(1/d), so the returned bracket
    (width ~1e-2) is far too loose for the midpoint to track the wave over
    the full horizon.  The probe therefore first tightens the bracket by
    continued certified bisection (up to ``refine_iters``, stopping when
    probes stop resolving within the budget) and then runs the refined
    midpoint.  The report carries the relative width gap at the end and
    the profile-distance series at snapshot times (tail monotonicity is
    judged up to ``noise``).
    """
    if result.infinite_flag or result.sigma_hi is None:
        return ProbeReport(
            sigma=None,
            H_end_gap_rel=None,
            distance_times=(),
            distances=(),
            tail_nonincreasing=None,
            note="no finite threshold bracket; nothing to probe",
        )
    T = budget.T_max * horizon_factor
    times = tuple(np.linspace(T / n_snapshots, T, n_snapshots))
    controls = SimControls(
        N=budget.N, T_max=T, H_floor=budget.H_floor, dt_max=budget.dt_max, snapshot_times=times
    )
    wave = solve_compact_wave(spec.c, spec.mu, tol=budget.tol)

    # Refinement probes run with exactly the probe's own step layout: the
    # landing steps at chunk boundaries perturb the discrete flow, so a
    # threshold bracketed under a different layout would not transfer.
    def attempt(sigma: float) -> tuple[ProbeReport, str]:
        trace = simulate(spec, shape_data(shape, spec.h0, sigma), controls)
        dists = [transition_distance(s, wave, spec.c) for s in trace.snapshots]
        dts = [s.t for s in trace.snapshots]
        tail = dists[len(dists) // 2 :]
        noninc = all(b <= a + noise for a, b in zip(tail, tail[1:])) if len(tail) >= 2 else None
        gap = abs(float(trace.H[-1]) - wave.L) / wave.L
        report = ProbeReport(
            sigma=sigma,
            H_end_gap_rel=gap,
            distance_times=tuple(dts),
            distances=tuple(dists),
            tail_nonincreasing=noninc,
            note=f"terminal={trace.terminal}",
        )
        if trace.terminal == "horizon-reached" and gap <= 0.1 and noninc:
            side = "hug"
        elif trace.terminal == "floor-hit" or float(trace.H[-1]) < wave.L:
            side = "vanishing"
        else:
            side = "spreading"
        return report, side

    lo, hi = result.sigma_lo, result.sigma_hi
    report = None
    for refined in range(refine_iters):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        report, side = attempt(mid)
        if side == "hug":
            return replace(
                report,
                note=report.note
                + f"; transition signature after {refined} refinement bisections",
            )
        if side == "vanishing":
            lo = mid
        else:
            hi = mid
    if report is None:
        report, _ = attempt(result.sigma_mid)
    return replace(
        report,
        note=report.note + "; refinement exhausted without a full transition signature",
    )


@dataclass(frozen=True)
class SweepCell:
    c: float
    mu: float
    sigma: float
    outcome: str
    value: float | None
    certificate: str
    error: str = ""


def _run_cell(args) -> SweepCell:
    c, mu, sigma, h0, shape, budget = args
    try:
        spec = ProblemSpec(c=c, mu=mu, h0=h0)
        out = classify(spec, shape_data(shape, h0, sigma), budget)
        value = {
            "Vanishing": out.t_star,
            "Spreading": out.c_hat,
            "Transition": out.L_hat,
            "Undetermined": None,
        }[out.tag]
        cert = out.certificates[-1].kind if out.certificates else ""
        return SweepCell(c=c, mu=mu, sigma=sigma, outcome=out.tag, value=value, certificate=cert)
    except Exception as exc:  # per-cell failures recorded, sweep continues
        return SweepCell(
            c=c, mu=mu, sigma=sigma, outcome="Error", value=None, certificate="", error=str(exc)
        )


def sweep(
    c_values: Sequence[float],
    mu_values: Sequence[float],
    sigma_values: Sequence[float],
    h0: float,
    shape: str,
    budget: ClassifyBudget,
    workers: int = 1,
) -> list[SweepCell]:
    """One classification per (c, mu, sigma) cell; deterministic row order."""
    budget = replace(budget, stop_on_certificate=True)
    cells = [
        (c, mu, sigma, h0, shape, budget)
        for c in c_values
        for mu in mu_values
        for sigma in sigma_values
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_cell, cells))
    else:
        rows = [_run_cell(c) for c in cells]
    check_sigma_monotone(rows)
    return rows


def check_sigma_monotone(rows: Sequence[SweepCell]) -> None:
    """Hard error if, within a (c, mu) row, spreading appears below vanishing."""
    groups: dict[tuple[float, float], list[SweepCell]] = {}
    for r in rows:
        groups.setdefault((r.c, r.mu), []).append(r)
    for (c, mu), cells in groups.items():
        vanish = [r.sigma for r in cells if r.outcome == "Vanishing"]
        spread = [r.sigma for r in cells if r.outcome == "Spreading"]
        if vanish and spread and max(vanish) >= min(spread):
            raise VerdictOrderError(
                f"sigma-monotonicity violated at (c={c!r}, mu={mu!r}): "
                f"vanishing at {max(vanish)!r} >= spreading at {min(spread)!r}"
            )
