"""Wave profiles of the logistic front equation by phase-plane shooting.

Three two-point problems share the planar field ``(q, p) -> (p, -c p - q(1-q))``:

* the semi-wave ``q`` on ``(-inf, 0]`` with ``q(-inf) = 1``, ``q(0) = 0``,
  whose boundary slope fixes the invasion speed ``c*`` through
  ``mu * |q'(0)| = c*``;
* the compactly supported wave ``V`` on ``[0, L]`` with
  ``V(0) = V(L) = 0`` and ``mu * |V'(L)| = c``, which exists exactly for
  ``0 < c < c*``;
* the bounded profile ``w`` on ``[-l, l]`` with ``w(+-l) = 0`` that tends
  to 1 on compacts as ``l`` grows.

The semi-wave is shot along the unstable manifold of the saddle ``(1, 0)``
(launch offset ``eps0`` along the eigenvector ``(1, lam_plus)`` with
Richardson extrapolation against ``eps0/2``); the other two shoot on the
initial slope and bracket the returning branch of orbits.  Root solves are
bracketed bisection tightened by secant steps, with the tolerance applied
to the defining residual, not to the parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .ivp import ZeroCrossing, integrate_ivp

GRID_NODES = 2048
EPS0_DEFAULT = 1e-8

C_MAX = 2.0  # minimal traveling-wave speed of the logistic equation


class NoSemiWaveError(RuntimeError):
    """Shooting trajectory never reached q = 0 within the span budget."""


class NoCompactWaveError(RuntimeError):
    """No slope on the returning branch matches mu*|V'(L)| = c."""


class EllipticExistenceError(RuntimeError):
    """No positive solution on (-l, l); the half-length is too small."""


def _field(c: float):
    def rhs(z, y):
        return (y[1], -c * y[1] - y[0] * (1.0 - y[0]))

    return rhs


def _span_budget(c: float, eps0: float) -> float:
    # escape from the saddle plus, near c = 2, the slow swing of the focus
    lam = 0.5 * (-c + math.sqrt(c * c + 4.0))
    omega = math.sqrt(max(1.0 - 0.25 * c * c, 1e-12))
    return math.log(1.0 / eps0) / lam + 40.0 + 3.0 * math.pi / omega


@dataclass(frozen=True)
class TabulatedProfile:
    """Profile samples on a uniform grid with shape-preserving interpolation.

    ``extend`` controls evaluation outside the grid: 'zero' clamps to 0
    (compact support), 'clamp' holds the nearest end value on the left and
    is 0 to the right (semi-infinite profiles reaching a plateau).
    """

    z: np.ndarray
    w: np.ndarray
    extend: str = "zero"

    def __post_init__(self):
        object.__setattr__(self, "_interp", PchipInterpolator(self.z, self.w, extrapolate=False))

    def sample(self, x) -> np.ndarray | float:
        x = np.asarray(x, dtype=float)
        out = self._interp(x)
        if self.extend == "zero":
            out = np.where(np.isnan(out), 0.0, out)
        else:
            out = np.where(x < self.z[0], self.w[0], out)
            out = np.where(x > self.z[-1], 0.0, out)
        if out.ndim == 0:
            return float(out)
        return out


def sample_profile(profile: TabulatedProfile, x) -> np.ndarray | float:
    """Monotone-safe interpolation of a tabulated profile (exact at nodes)."""
    return profile.sample(x)


def _deriv4(values: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order first derivative on a uniform grid, one-sided at edges."""
    v = values
    d = np.empty_like(v)
    d[2:-2] = (v[:-4] - 8.0 * v[1:-3] + 8.0 * v[3:-1] - v[4:]) / (12.0 * h)
    # one-sided 5-point stencils, O(h^4)
    c0 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / (12.0 * h)
    c1 = np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / (12.0 * h)
    d[0] = c0 @ v[:5]
    d[1] = c1 @ v[:5]
    d[-1] = -(c0 @ v[-5:][::-1])
    d[-2] = -(c1 @ v[-5:][::-1])
    return d


def ode_residual(z: np.ndarray, w: np.ndarray, p: np.ndarray, c: float) -> float:
    """Max-norm re-substitution residual of (w, p) in the first-order system.

    Derivatives are recomputed from the tabulated values alone (4th-order
    stencils), so this is an independent check of the shot trajectories.
    """
    h = z[1] - z[0]
    r1 = _deriv4(w, h) - p
    r2 = _deriv4(p, h) + c * p + w * (1.0 - w)
    return float(max(np.max(np.abs(r1)), np.max(np.abs(r2))))


@dataclass(frozen=True)
class SemiWave:
    """Semi-wave pair (c*, q*) with mu*|q*'(0)| = c*."""

    mu: float
    c_star: float
    z: np.ndarray
    q: np.ndarray
    p: np.ndarray
    slope0: float
    tol: float

    @property
    def profile(self) -> TabulatedProfile:
        return TabulatedProfile(self.z, self.q, extend="clamp")

    def residual(self) -> float:
        return ode_residual(self.z, self.q, self.p, self.c_star)


@dataclass(frozen=True)
class CompactWave:
    """Compact wave pair (L_c, V_c) with mu*|V_c'(L_c)| = c."""

    c: float
    mu: float
    L: float
    z: np.ndarray
    V: np.ndarray
    P: np.ndarray
    slopeL: float
    alpha: float
    tol: float

    @property
    def profile(self) -> TabulatedProfile:
        return TabulatedProfile(self.z, self.V, extend="zero")

    def residual(self) -> float:
        return ode_residual(self.z, self.V, self.P, self.c)


@dataclass(frozen=True)
class EllipticProfile:
    """Positive solution of w'' + C w' + w(1-w) = 0 on (-l, l), w(+-l) = 0."""

    C: float
    l: float
    x: np.ndarray
    w: np.ndarray
    p: np.ndarray
    slope_left: float

    @property
    def profile(self) -> TabulatedProfile:
        return TabulatedProfile(self.x, self.w, extend="zero")

    def residual(self) -> float:
        return ode_residual(self.x, self.w, self.p, self.C)


def _shoot_semi_wave(c: float, eps0: float, tol: float):
    lam = 0.5 * (-c + math.sqrt(c * c + 4.0))
    budget = _span_budget(c, eps0)
    traj = integrate_ivp(
        _field(c),
        (1.0 - eps0, -lam * eps0),
        (0.0, budget),
        tol,
        events=[ZeroCrossing(index=0, direction=-1)],
    )
    if traj.event_t is None:
        raise NoSemiWaveError(
            f"no q=0 crossing within span {budget:.1f} at c={c!r}; "
            "c may be outside [0, 2) or the launch offset is misconfigured"
        )
    return traj


def semi_wave_slope(c: float, tol: float = 1e-12, eps0: float = EPS0_DEFAULT) -> float:
    """|q'(0)| of the orbit leaving (1, 0), Richardson-extrapolated in eps0.

    Defined for 0 <= c < 2; the value decreases strictly in c and equals
    1/sqrt(3) at c = 0 by the conserved energy of the undamped system.
    """
    if not 0.0 <= c < C_MAX:
        raise ValueError(f"c must lie in [0, 2), got {c!r}")
    s1 = abs(_shoot_semi_wave(c, eps0, tol).event_y[1])
    s2 = abs(_shoot_semi_wave(c, 0.5 * eps0, tol).event_y[1])
    return 2.0 * s2 - s1


def _bracketed_root(fn, lo, hi, flo, fhi, tol, max_iter=200):
    """Root of fn by bisection with secant refinement; stops on |fn| <= tol."""
    assert flo * fhi <= 0.0
    x, fx = (lo, flo) if abs(flo) < abs(fhi) else (hi, fhi)
    for _ in range(max_iter):
        if abs(fx) <= tol:
            return x, fx
        # secant candidate, accepted only when it stays inside the bracket
        denom = fhi - flo
        mid = 0.5 * (lo + hi)
        if denom != 0.0:
            xs = hi - fhi * (hi - lo) / denom
            if not (lo < xs < hi):
                xs = mid
        else:
            xs = mid
        # alternate with bisection to guarantee bracket shrinkage
        x = xs if abs(xs - mid) < 0.4 * (hi - lo) else mid
        fx = fn(x)
        if flo * fx <= 0.0:
            hi, fhi = x, fx
        else:
            lo, flo = x, fx
    return x, fx


def solve_semi_wave(mu: float, tol: float = 1e-9, eps0: float = EPS0_DEFAULT) -> SemiWave:
    """Find c* with mu*s(c*) = c* and tabulate q* at that speed.

    The residual ``mu*|slope| - c`` is driven below ``tol``.  The scan
    bracket covers (0, 2); extremely large mu pushes c* so close to 2 that
    the crossing amplitude underflows, which surfaces as a bracket failure.
    """
    if mu <= 0:
        raise ValueError("mu must be positive")

    def g(c):
        return mu * semi_wave_slope(c, tol=min(tol, 1e-12), eps0=eps0) - c

    scan = [0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 1.9, 1.97, 1.99, 1.999]
    lo = scan[0]
    flo = g(lo)  # mu*s(0) = mu/sqrt(3) > 0 always
    if flo <= 0.0:
        raise RuntimeError(f"configuration error: no bracket, g({lo})={flo!r} <= 0")
    hi = None
    for c in scan[1:]:
        fc = g(c)
        if fc <= 0.0:
            hi, fhi = c, fc
            break
        lo, flo = c, fc
    if hi is None:
        raise RuntimeError(
            "configuration error: mu*s(c) - c does not change sign on (0, 2); "
            "mu is too large for the scanned bracket"
        )
    c_star, resid = _bracketed_root(g, lo, hi, flo, fhi, tol)

    # tabulate at c_star; the eps0/2 launch keeps 1 - q(z_left) <= eps0/2
    traj = _shoot_semi_wave(c_star, 0.5 * eps0, min(tol, 1e-12))
    z_event = traj.event_t
    zg = np.linspace(0.0, z_event, GRID_NODES)
    vals = traj.sample(zg)
    z = zg - z_event  # profile coordinates: z in [-Z_max, 0], q(0) = 0
    q = vals[0]
    p = vals[1]
    q[-1] = 0.0
    # resid = mu*s(c_star) - c_star, so the root-solve slope is (c_star + resid)/mu
    slope0 = -(c_star + resid) / mu
    return SemiWave(mu=mu, c_star=c_star, z=z, q=q, p=p, slope0=slope0, tol=tol)


_NO_RETURN_PROXIMITY = 1e-10
_ESCAPE_LEVEL = 2.0


def compact_wave_shoot(c: float, alpha: float, tol: float = 1e-12):
    """Shoot from (0, alpha); return (L, beta) at the first V=0 return.

    Returns None when the orbit fails to return: it either passes close to
    the saddle (1, 0), escapes above V = 2, or exhausts the span budget.
    That branch is a legitimate outcome for large alpha.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    z0 = 1e-10
    start = (alpha * z0, alpha)  # analytic microstep off the V = 0 axis
    budget = _span_budget(c, min(alpha, 1e-6)) + 200.0

    def rhs(z, y):
        return (y[1], -c * y[1] - y[0] * (1.0 - y[0]))

    events = [
        ZeroCrossing(index=0, direction=-1),  # return to V = 0
        ZeroCrossing(index=0, direction=1, offset=_ESCAPE_LEVEL),  # escape
    ]

    def near_saddle(z, y):
        return (y[0] - 1.0) ** 2 + y[1] ** 2 - _NO_RETURN_PROXIMITY**2

    near_saddle.terminal = True
    near_saddle.direction = -1.0

    from scipy.integrate import solve_ivp

    sol = solve_ivp(
        rhs,
        (z0, budget),
        start,
        method="DOP853",
        rtol=tol,
        atol=0.01 * tol,
        events=[_as_scipy_event(e) for e in events] + [near_saddle],
        dense_output=True,
    )
    if sol.status == -1:
        return None
    if sol.t_events[0].size:
        L = float(sol.t_events[0][0])
        beta = float(sol.y_events[0][0][1])
        return L, beta, sol.sol
    return None


def _as_scipy_event(ev: ZeroCrossing):
    def g(t, y):
        return y[ev.index] - ev.offset

    g.terminal = ev.terminal
    g.direction = float(ev.direction)
    return g


def solve_compact_wave(c: float, mu: float, tol: float = 1e-9) -> CompactWave:
    """Find the slope alpha with mu*|beta(alpha)| = c and tabulate V_c.

    The returning branch is scanned geometrically from alpha = 1e-6; when
    the scan runs into non-returning orbits before the residual changes
    sign, the returning endpoint is pushed toward the homoclinic slope by
    bisection.  Failure to bracket means c >= c*(mu): no compact wave.
    """
    if not 0.0 < c < C_MAX:
        raise ValueError(f"c must lie in (0, 2), got {c!r}")
    if mu <= 0:
        raise ValueError("mu must be positive")

    ivp_tol = min(tol, 1e-12)

    def resid(alpha):
        out = compact_wave_shoot(c, alpha, tol=ivp_tol)
        if out is None:
            return None
        return mu * abs(out[1]) - c

    a_lo = 1e-6
    r_lo = resid(a_lo)
    if r_lo is None:
        raise NoCompactWaveError(f"orbit from alpha={a_lo} did not return at c={c!r}")
    if r_lo > 0.0:
        raise NoCompactWaveError(
            f"residual already positive at alpha={a_lo}; no bracket below"
        )

    a_hi = None
    a = a_lo
    while a_hi is None:
        a *= 2.0
        r = resid(a)
        if r is None:
            # bisect the returning/non-returning boundary toward the homoclinic
            blo, bhi = a_lo, a
            while True:
                mid = 0.5 * (blo + bhi)
                rm = resid(mid)
                if rm is None:
                    bhi = mid
                elif rm > 0.0:
                    a_hi, r_hi = mid, rm
                    break
                else:
                    blo, a_lo, r_lo = mid, mid, rm
                if (bhi - blo) <= 1e-12 * max(blo, 1e-30):
                    raise NoCompactWaveError(
                        f"no sign change on the returning branch at c={c!r}, mu={mu!r}; "
                        "expected when c >= c*(mu)"
                    )
        elif r > 0.0:
            a_hi, r_hi = a, r
        else:
            a_lo, r_lo = a, r

    def resid_checked(alpha):
        r = resid(alpha)
        if r is None:
            raise NoCompactWaveError(
                f"orbit stopped returning inside the root bracket at alpha={alpha!r}"
            )
        return r

    alpha_root, _ = _bracketed_root(resid_checked, a_lo, a_hi, r_lo, r_hi, tol)

    out = compact_wave_shoot(c, alpha_root, tol=ivp_tol)
    if out is None:
        raise NoCompactWaveError("root orbit unexpectedly failed to return")
    L, beta, dense = out
    zg = np.linspace(0.0, L, GRID_NODES)
    vals = dense(np.clip(zg, 1e-10, L))
    V = vals[0]
    P = vals[1]
    V[0] = 0.0
    V[-1] = 0.0
    return CompactWave(
        c=c, mu=mu, L=L, z=zg, V=V, P=P, slopeL=beta, alpha=alpha_root, tol=tol
    )


def elliptic_profile(C: float, l: float, tol: float = 1e-9) -> EllipticProfile:
    """Positive solution on (-l, l) by shooting on the left slope w'(-l).

    Uses the same returning-branch machinery as the compact wave, rooting
    on the return length L(a) = 2l instead of the boundary slope.
    """
    if not 0.0 <= C < C_MAX:
        raise ValueError(f"C must lie in [0, 2), got {C!r}")
    if l <= 0:
        raise ValueError("l must be positive")
    span = 2.0 * l
    ivp_tol = min(tol, 1e-12)

    def length_gap(a):
        out = compact_wave_shoot(C, a, tol=ivp_tol)
        if out is None:
            return None
        return out[0] - span

    a_lo = 1e-6
    g_lo = length_gap(a_lo)
    if g_lo is None or g_lo > 0.0:
        raise EllipticExistenceError(
            f"no positive solution detected: half-length l={l!r} is below the "
            "small-amplitude return length"
        )
    a_hi = None
    a = a_lo
    while a_hi is None:
        a *= 2.0
        g = length_gap(a)
        if g is None:
            blo, bhi = a_lo, a
            while True:
                mid = 0.5 * (blo + bhi)
                gm = length_gap(mid)
                if gm is None:
                    bhi = mid
                elif gm > 0.0:
                    a_hi, g_hi = mid, gm
                    break
                else:
                    blo, a_lo, g_lo = mid, mid, gm
                if (bhi - blo) <= 1e-13 * max(blo, 1e-30):
                    raise EllipticExistenceError(
                        f"return length never reached 2l={span!r} on the returning branch"
                    )
        elif g > 0.0:
            a_hi, g_hi = a, g
        else:
            a_lo, g_lo = a, g

    def gap_checked(a):
        g = length_gap(a)
        if g is None:
            raise EllipticExistenceError(
                f"orbit stopped returning inside the root bracket at slope {a!r}"
            )
        return g

    a_root, _ = _bracketed_root(gap_checked, a_lo, a_hi, g_lo, g_hi, tol)
    out = compact_wave_shoot(C, a_root, tol=ivp_tol)
    if out is None:
        raise EllipticExistenceError("root orbit unexpectedly failed to return")
    L, beta, dense = out
    zg = np.linspace(0.0, span, GRID_NODES)
    vals = dense(np.clip(zg, 1e-10, L))
    w = vals[0]
    p = vals[1]
    w[0] = 0.0
    return EllipticProfile(C=C, l=l, x=zg - l, w=w, p=p, slope_left=a_root)
