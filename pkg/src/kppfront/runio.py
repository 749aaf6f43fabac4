"""Deterministic run-directory writers.

All CSV payloads use '.' decimals at full round-trip precision and LF
line endings; wall-clock timestamps appear only in the run summary.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .profiles import CompactWave, EllipticProfile, SemiWave
from .solver import FrontFixedState, Trace, to_physical

OUT_ENV = "KPPFRONT_OUT"


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def out_root(explicit: str | None) -> Path:
    if explicit:
        return Path(explicit)
    return Path(os.environ.get(OUT_ENV, "runs"))


def write_kv(path: Path, items: dict) -> None:
    with open(path, "w", newline="\n") as fh:
        for key, val in items.items():
            fh.write(f"{key} = {fmt(val)}\n")


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(x) for x in row) + "\n")


def write_columns(path: Path, *cols) -> None:
    """Plot-ready whitespace-separated columns."""
    with open(path, "w", newline="\n") as fh:
        for row in zip(*cols):
            fh.write(" ".join(fmt(x) for x in row) + "\n")


def write_trace_csv(path: Path, trace: Trace) -> None:
    write_csv(
        path,
        ("t", "H", "h", "umax", "flux", "Hdot"),
        zip(trace.t, trace.H, trace.h, trace.umax, trace.flux, trace.Hdot),
    )


def read_xy_csv(path) -> tuple[np.ndarray, np.ndarray]:
    data = np.genfromtxt(path, delimiter=",", skip_header=1)
    if data.ndim != 2 or data.shape[1] != 2:
        raise ValueError(f"{path}: expected two CSV columns")
    return data[:, 0], data[:, 1]


def write_snapshot_csv(path: Path, state: FrontFixedState, c: float) -> None:
    x = c * state.t + state.y * state.H
    write_csv(path, ("x", "u"), zip(x, state.v))


def write_profile_csv(dirpath: Path, stem: str, profile, meta: dict) -> None:
    """Profile CSV ('z,value') plus a sidecar key-value metadata block."""
    if isinstance(profile, SemiWave):
        z, w = profile.z, profile.q
    elif isinstance(profile, CompactWave):
        z, w = profile.z, profile.V
    elif isinstance(profile, EllipticProfile):
        z, w = profile.x, profile.w
    else:
        z, w = profile
    write_csv(dirpath / f"{stem}.csv", ("z", "value"), zip(z, w))
    write_kv(dirpath / f"{stem}_meta.txt", meta)


def write_plot_data(dirpath: Path, trace: Trace, c_hat: float | None) -> None:
    plot = dirpath / "plot"
    plot.mkdir(exist_ok=True)
    write_columns(plot / "H_of_t.dat", trace.t, trace.H)
    if c_hat is not None:
        write_columns(plot / "h_excess.dat", trace.t, trace.h - c_hat * trace.t)
    for state in trace.snapshots:
        x = trace.spec.c * state.t + state.y * state.H
        write_columns(plot / f"profile_t{fmt(state.t)}.dat", x, state.v)
