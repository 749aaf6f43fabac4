"""Batch front end: run a configuration file, emit a self-describing run directory.

Usage: ``kppfront CONFIG [--out DIR]``.  Exit status 0 on success, 2 on a
configuration error, 3 on a compute error, 4 when a classification ends
Undetermined (so shell pipelines can branch on abstention).
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import stepcore
from .config import ConfigError, RunConfig, parse_config, serialize_config
from .dynamics import ClassifyBudget, classify, estimate_speed
from .profiles import elliptic_profile, solve_compact_wave, solve_semi_wave
from .runio import (
    fmt,
    out_root,
    read_xy_csv,
    write_csv,
    write_kv,
    write_plot_data,
    write_profile_csv,
    write_snapshot_csv,
    write_trace_csv,
)
from .solver import (
    InitialData,
    ProblemSpec,
    SimControls,
    ValidationError,
    initial_bump,
    initial_compact_wave,
    initial_custom,
    initial_sine,
    simulate,
)
from .threshold import find_threshold, near_threshold_probe, sweep

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_COMPUTE = 3
EXIT_UNDETERMINED = 4


def _spec(cfg: RunConfig) -> ProblemSpec:
    return ProblemSpec(c=cfg.c, mu=cfg.mu, h0=cfg.h0)


def _data(cfg: RunConfig) -> InitialData:
    if cfg.family == "sine":
        if cfg.sigma is None:
            raise ConfigError("family 'sine' needs key 'sigma'")
        return initial_sine(cfg.h0, cfg.sigma)
    if cfg.family == "bump":
        if cfg.sigma is None:
            raise ConfigError("family 'bump' needs key 'sigma'")
        return initial_bump(cfg.h0, cfg.sigma)
    if cfg.family == "compact-wave":
        wave = solve_compact_wave(cfg.c, cfg.mu, tol=cfg.tol)
        return initial_compact_wave(wave, shift=cfg.shift, scale=cfg.scale, h0=cfg.h0)
    if cfg.family == "custom":
        if not cfg.data_csv:
            raise ConfigError("family 'custom' needs key 'data_csv'")
        xs, us = read_xy_csv(cfg.data_csv)
        return initial_custom(xs, us)
    raise ConfigError(f"unknown family {cfg.family!r}")


def _controls(cfg: RunConfig) -> SimControls:
    return SimControls(
        N=cfg.N,
        T_max=cfg.T_max,
        H_floor=cfg.H_floor,
        dt_max=cfg.dt_max if cfg.dt_max is not None else math.inf,
        dt_fixed=cfg.dt_fixed,
        snapshot_times=cfg.snapshot_times,
        backend=cfg.backend,
    )


def _budget(cfg: RunConfig) -> ClassifyBudget:
    return ClassifyBudget(
        T_max=cfg.T_max,
        N=cfg.N,
        tol=cfg.tol,
        tol_trans=cfg.tol_trans,
        margin=cfg.margin,
        poll_dt=cfg.poll_dt,
        H_floor=cfg.H_floor,
        dt_max=cfg.dt_max if cfg.dt_max is not None else math.inf,
    )


def _speed_or_none(trace) -> float | None:
    try:
        return estimate_speed(trace).c_hat
    except Exception:
        return None


def _cmd_semiwave(cfg: RunConfig, rundir: Path, summary: dict) -> int:
    sw = solve_semi_wave(cfg.mu, tol=cfg.tol)
    write_profile_csv(
        rundir,
        "profile",
        sw,
        {
            "kind": "semi-wave",
            "mu": sw.mu,
            "c_star": sw.c_star,
            "slope0": sw.slope0,
            "tol": sw.tol,
            "residual": sw.residual(),
        },
    )
    summary["c_star"] = sw.c_star
    summary["slope0"] = sw.slope0
    return EXIT_OK


def _cmd_wave(cfg: RunConfig, rundir: Path, summary: dict) -> int:
    wave = solve_compact_wave(cfg.c, cfg.mu, tol=cfg.tol)
    write_profile_csv(
        rundir,
        "profile",
        wave,
        {
            "kind": "compact-wave",
            "c": wave.c,
            "mu": wave.mu,
            "L": wave.L,
            "slopeL": wave.slopeL,
            "alpha": wave.alpha,
            "tol": wave.tol,
            "residual": wave.residual(),
        },
    )
    summary["L"] = wave.L
    summary["slopeL"] = wave.slopeL
    return EXIT_OK


def _cmd_elliptic(cfg: RunConfig, rundir: Path, summary: dict) -> int:
    prof = elliptic_profile(cfg.drift, cfg.half_length, tol=cfg.tol)
    write_profile_csv(
        rundir,
        "profile",
        prof,
        {
            "kind": "elliptic",
            "drift": prof.C,
            "half_length": prof.l,
            "slope_left": prof.slope_left,
            "midpoint": float(prof.profile.sample(0.0)),
            "residual": prof.residual(),
        },
    )
    summary["midpoint"] = float(prof.profile.sample(0.0))
    return EXIT_OK


def _cmd_simulate(cfg: RunConfig, rundir: Path, summary: dict) -> int:
    spec = _spec(cfg)
    trace = simulate(spec, _data(cfg), _controls(cfg))
    write_trace_csv(rundir / "trace.csv", trace)
    for i, state in enumerate(trace.snapshots):
        write_snapshot_csv(rundir / f"snapshot_{i:04d}.csv", state, spec.c)
    c_hat = _speed_or_none(trace)
    write_plot_data(rundir, trace, c_hat if c_hat is not None else spec.c)
    summary["terminal"] = trace.terminal
    summary["t_end"] = trace.t_end
    summary["H_end"] = float(trace.H[-1])
    summary["h_end"] = float(trace.h[-1])
    summary["umax_end"] = float(trace.umax[-1])
    summary["c_hat"] = c_hat if c_hat is not None else "unavailable"
    summary["excess_reference_speed"] = c_hat if c_hat is not None else spec.c
    if trace.terminal == "step-failure":
        return EXIT_COMPUTE
    return EXIT_OK


def _cmd_classify(cfg: RunConfig, rundir: Path, summary: dict) -> int:
    spec = _spec(cfg)
    outcome = classify(spec, _data(cfg), _budget(cfg))
    trace = outcome.trace
    if trace is not None:
        write_trace_csv(rundir / "trace.csv", trace)
        for i, state in enumerate(trace.snapshots):
            write_snapshot_csv(rundir / f"snapshot_{i:04d}.csv", state, spec.c)
        write_plot_data(rundir, trace, outcome.c_hat if outcome.c_hat else spec.c)
    summary["outcome"] = outcome.tag
    for key in ("t_star", "c_hat", "shift_b", "L_hat", "trans_distance"):
        val = getattr(outcome, key)
        if val is not None:
            summary[key] = val
    for i, cert in enumerate(outcome.certificates):
        summary[f"certificate_{i}"] = cert.kind
        summary[f"certificate_{i}_at"] = cert.checked_at
        for pk, pv in cert.params.items():
            summary[f"certificate_{i}_{pk}"] = pv
    for key, val in sorted(outcome.diagnostics.items()):
        summary[f"diag_{key}"] = val
    return EXIT_UNDETERMINED if outcome.tag == "Undetermined" else EXIT_OK


def _cmd_threshold(cfg: RunConfig, rundir: Path, summary: dict) -> int:
    spec = _spec(cfg)
    if cfg.family not in ("sine", "bump"):
        raise ConfigError("threshold search supports families 'sine' and 'bump'")
    result = find_threshold(
        spec,
        cfg.family,
        (cfg.sigma_lo, cfg.sigma_hi),
        _budget(cfg),
        max_iter=cfg.max_iter,
        rel_width=cfg.rel_width,
    )
    write_csv(
        rundir / "verdicts.csv",
        ("sigma", "tag", "certified", "soft_side"),
        ((v.sigma, v.tag, v.certified, v.soft_side) for v in result.verdicts),
    )
    summary["sigma_lo"] = result.sigma_lo
    summary["sigma_hi"] = result.sigma_hi if result.sigma_hi is not None else "none"
    summary["iterations"] = result.iterations
    summary["infinite_flag"] = result.infinite_flag
    summary["soft_lo"] = result.soft_lo
    summary["soft_hi"] = result.soft_hi if result.soft_hi is not None else "none"
    if result.relative_width is not None:
        summary["relative_width"] = result.relative_width
    if cfg.probe:
        report = near_threshold_probe(spec, cfg.family, result, _budget(cfg))
        summary["probe_note"] = report.note
        if report.sigma is not None:
            summary["probe_sigma"] = report.sigma
            summary["probe_H_end_gap_rel"] = report.H_end_gap_rel
            summary["probe_tail_nonincreasing"] = report.tail_nonincreasing
            write_csv(
                rundir / "probe_distances.csv",
                ("t", "distance"),
                zip(report.distance_times, report.distances),
            )
    return EXIT_OK


def _cmd_sweep(cfg: RunConfig, rundir: Path, summary: dict) -> int:
    if cfg.family not in ("sine", "bump"):
        raise ConfigError("sweep supports families 'sine' and 'bump'")
    rows = sweep(
        cfg.c_list,
        cfg.mu_list,
        cfg.sigma_list,
        cfg.h0,
        cfg.family,
        _budget(cfg),
        workers=cfg.workers,
    )
    write_csv(
        rundir / "sweep.csv",
        ("c", "mu", "sigma", "outcome", "value", "certificate"),
        (
            (r.c, r.mu, r.sigma, r.outcome, r.value if r.value is not None else "", r.certificate)
            for r in rows
        ),
    )
    n_err = sum(1 for r in rows if r.outcome == "Error")
    summary["cells"] = len(rows)
    summary["errors"] = n_err
    for i, r in enumerate(rows):
        if r.outcome == "Error":
            summary[f"error_{i}"] = f"(c={r.c}, mu={r.mu}, sigma={r.sigma}): {r.error}"
    return EXIT_OK


def _cmd_convergence(cfg: RunConfig, rundir: Path, summary: dict) -> int:
    if cfg.levels < 3:
        raise ConfigError("key 'levels': convergence study needs at least 3 levels")
    rows = []
    if cfg.mode == "manufactured":
        from .manufactured import run as mms_run

        dt0 = cfg.dt_max if cfg.dt_max is not None else 0.02
        N0 = cfg.N if cfg.N != 400 else 32
        for k in range(cfg.levels):
            err_H, err_v = mms_run(cfg.c, cfg.mu, N0 * 2**k, dt0 / 4**k, cfg.T_max)
            rows.append((N0 * 2**k, dt0 / 4**k, err_H, err_v))
        orders_H = [math.log2(rows[i][2] / rows[i + 1][2]) for i in range(len(rows) - 1)]
        orders_v = [math.log2(rows[i][3] / rows[i + 1][3]) for i in range(len(rows) - 1)]
        write_csv(rundir / "orders.csv", ("N", "dt", "err_H", "err_v"), rows)
        summary["orders_H"] = ", ".join(f"{o:.3f}" for o in orders_H)
        summary["orders_v"] = ", ".join(f"{o:.3f}" for o in orders_v)
        summary["design_spatial_order"] = 2.0
        summary["design_temporal_order"] = 1.0
        return EXIT_OK

    spec = _spec(cfg)
    data = _data(cfg)
    dt0 = cfg.dt_max
    if dt0 is None:
        K = spec.f.lipschitz_cap(max(1.0, data.sup))
        dt0 = min(0.2 * spec.h0 / (cfg.N * spec.c), 0.05 / K)
    H_ends = []
    for k in range(cfg.levels):
        controls = replace(
            _controls(cfg), N=cfg.N * 2**k, dt_max=dt0 / 4**k, snapshot_times=()
        )
        trace = simulate(spec, data, controls)
        if trace.terminal != "horizon-reached":
            raise RuntimeError(
                f"convergence level {k} ended early ({trace.terminal}); "
                "choose a configuration that reaches the horizon"
            )
        H_ends.append(float(trace.H[-1]))
        rows.append((cfg.N * 2**k, dt0 / 4**k, H_ends[-1]))
    diffs = [abs(H_ends[i + 1] - H_ends[i]) for i in range(len(H_ends) - 1)]
    orders = [math.log2(diffs[i] / diffs[i + 1]) for i in range(len(diffs) - 1)]
    write_csv(rundir / "orders.csv", ("N", "dt_max", "H_end"), rows)
    summary["H_diffs"] = ", ".join(repr(d) for d in diffs)
    summary["observed_spatial_orders"] = ", ".join(f"{o:.3f}" for o in orders)
    return EXIT_OK


_DISPATCH = {
    "semiwave": _cmd_semiwave,
    "wave": _cmd_wave,
    "elliptic": _cmd_elliptic,
    "simulate": _cmd_simulate,
    "classify": _cmd_classify,
    "threshold": _cmd_threshold,
    "sweep": _cmd_sweep,
    "convergence": _cmd_convergence,
}


def run(cfg: RunConfig) -> tuple[int, Path]:
    """Execute one configuration; returns (exit status, run directory)."""
    rundir = out_root(cfg.out) / (cfg.name or cfg.command)
    rundir.mkdir(parents=True, exist_ok=True)
    (rundir / "config.txt").write_text(serialize_config(cfg))
    summary: dict = {
        "command": cfg.command,
        "backend": stepcore.BACKEND,
    }
    started = time.time()
    try:
        status = _DISPATCH[cfg.command](cfg, rundir, summary)
    except (ConfigError, ValidationError) as exc:
        summary["error"] = str(exc)
        status = EXIT_CONFIG
    except Exception as exc:
        summary["error"] = f"{type(exc).__name__}: {exc}"
        status = EXIT_COMPUTE
    summary["exit_status"] = status
    summary["wall_seconds"] = round(time.time() - started, 3)
    summary["finished_at"] = time.strftime("%Y-%m-%dT%H:%M:%S")
    write_kv(rundir / "summary.txt", summary)
    return status, rundir


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="kppfront",
        description="Free-boundary logistic-front toolkit: profiles, simulation, "
        "classification, threshold search.",
    )
    parser.add_argument("config", help="path to a key = value configuration file")
    parser.add_argument("--out", help="output root (overrides config and KPPFRONT_OUT)")
    args = parser.parse_args(argv)
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"kppfront: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = parse_config(text)
    except ConfigError as exc:
        print(f"kppfront: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.out:
        cfg = replace(cfg, out=args.out)
    status, rundir = run(cfg)
    print(f"kppfront: {cfg.command} -> {rundir} (exit {status})")
    return status


def console_main() -> None:
    raise SystemExit(main())
