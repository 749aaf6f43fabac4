# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled reference march (logistic nonlinearity).

Mirrors ``_refcore_py.ref_march``; fully explicit scheme, no code shared
with the main kernel.
"""

from libc.math cimport fabs, isfinite
from libc.stdlib cimport free, malloc

STATUS_T_STOP = 0
STATUS_FLOOR = 1
STATUS_NEGATIVE = 2
STATUS_NONFINITE = 3
STATUS_BUDGET = 4

cdef double ABORT_NEG = -1e-8
cdef double DT_MIN = 1e-10


def ref_march(
    double[::1] v,
    double H,
    double t,
    double c,
    double mu,
    double K,
    double diff_cfl,
    double react_cfl,
    double dt_max,
    double t_stop,
    double H_floor,
    long max_steps,
    double[:, ::1] rec,
    long stride=1,
):
    cdef long n = v.shape[0] - 1
    cdef double dy = 1.0 / n
    cdef long cap = rec.shape[0]
    cdef long nrec = 0
    cdef double Hdot_out = 0.0
    cdef long step_i, j
    cdef double flux, Hdot, dt, lap, adv, fv, vmin, umax, flux1, yj
    cdef bint landed

    cdef double* w = <double*> malloc((n + 1) * sizeof(double))
    if w == NULL:
        raise MemoryError()

    try:
        for step_i in range(max_steps):
            if t >= t_stop:
                return STATUS_T_STOP, nrec, t, H, Hdot_out
            if nrec >= cap:
                return STATUS_BUDGET, nrec, t, H, Hdot_out

            flux = -v[n - 1] / dy
            Hdot = -mu * flux / H - c

            dt = diff_cfl * (dy * H) * (dy * H)
            if react_cfl / K < dt:
                dt = react_cfl / K
            if dt_max < dt:
                dt = dt_max
            landed = False
            if t + dt >= t_stop:
                dt = t_stop - t
                landed = True
            if Hdot < 0.0:
                while dt > DT_MIN and H + 1.5 * dt * Hdot <= H_floor:
                    dt *= 0.5
                    landed = False

            vmin = 0.0
            for j in range(1, n):
                yj = j * dy
                lap = (v[j + 1] - 2.0 * v[j] + v[j - 1]) / (dy * dy * H * H)
                adv = (c + yj * Hdot) * (v[j + 1] - v[j - 1]) / (2.0 * dy * H)
                fv = v[j] * (1.0 - v[j])
                w[j] = v[j] + dt * (lap + adv + fv)
                if not isfinite(w[j]):
                    return STATUS_NONFINITE, nrec, t, H, Hdot_out
                if w[j] < vmin:
                    vmin = w[j]
            if vmin < ABORT_NEG:
                return STATUS_NEGATIVE, nrec, t, H, Hdot_out

            umax = 0.0
            for j in range(1, n):
                if w[j] < 0.0:
                    w[j] = 0.0
                v[j] = w[j]
                if v[j] > umax:
                    umax = v[j]
            v[0] = 0.0
            v[n] = 0.0

            H = H + dt * Hdot
            if not isfinite(H):
                return STATUS_NONFINITE, nrec, t, H, Hdot_out
            t = t_stop if landed else t + dt

            flux1 = -v[n - 1] / dy
            Hdot_out = -mu * flux1 / H - c

            if H <= H_floor or landed or (step_i % stride) == 0:
                rec[nrec, 0] = t
                rec[nrec, 1] = H
                rec[nrec, 2] = umax
                rec[nrec, 3] = flux1
                rec[nrec, 4] = Hdot_out
                nrec += 1

            if H <= H_floor:
                return STATUS_FLOOR, nrec, t, H, Hdot_out
            if landed:
                return STATUS_T_STOP, nrec, t, H, Hdot_out

        return STATUS_BUDGET, nrec, t, H, Hdot_out
    finally:
        free(w)
