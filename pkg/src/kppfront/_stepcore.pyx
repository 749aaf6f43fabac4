# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled march kernel (logistic nonlinearity).

Mirrors ``_stepcore_py.march`` step for step; keep the two in sync.  The
tridiagonal backward-Euler solve uses the Thomas algorithm (the system is
diagonally dominant).
"""

from libc.math cimport INFINITY, fabs, isfinite
from libc.stdlib cimport free, malloc

STATUS_T_STOP = 0
STATUS_FLOOR = 1
STATUS_NEGATIVE = 2
STATUS_NONFINITE = 3
STATUS_BUDGET = 4

cdef double ABORT_NEG = -1e-8
cdef double DT_MIN = 1e-10


def march(
    double[::1] v,
    double H,
    double t,
    double c,
    double mu,
    double K,
    double adv_cfl,
    double react_cfl,
    double dt_max,
    double dt_fixed,
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
    cdef double flux0, Hdot0, speed, dt, Hstar, r, flux1, Hdot1, umax
    cdef double yj, a, dv, fv, vmin
    cdef bint landed
    cdef int status = STATUS_BUDGET

    cdef double* w = <double*> malloc((n + 1) * sizeof(double))
    cdef double* cp = <double*> malloc((n + 1) * sizeof(double))
    if w == NULL or cp == NULL:
        if w != NULL:
            free(w)
        if cp != NULL:
            free(cp)
        raise MemoryError()

    try:
        for step_i in range(max_steps):
            if t >= t_stop:
                status = STATUS_T_STOP
                return status, nrec, t, H, Hdot_out
            if nrec >= cap:
                status = STATUS_BUDGET
                return status, nrec, t, H, Hdot_out

            flux0 = (v[n - 2] - 4.0 * v[n - 1]) / (2.0 * dy)
            Hdot0 = -mu * flux0 / H - c

            if dt_fixed > 0.0:
                dt = dt_fixed
            else:
                speed = fabs(c)
                if fabs(c + Hdot0) > speed:
                    speed = fabs(c + Hdot0)
                dt = adv_cfl * dy * H / speed if speed > 0.0 else INFINITY
                if react_cfl / K < dt:
                    dt = react_cfl / K
                if dt_max < dt:
                    dt = dt_max
            landed = False
            if t + dt >= t_stop:
                dt = t_stop - t
                landed = True
            if Hdot0 < 0.0:
                while dt > DT_MIN and H + 1.5 * dt * Hdot0 <= H_floor:
                    dt *= 0.5
                    landed = False

            # explicit advection (second-order upwind-biased) + reaction
            for j in range(1, n):
                yj = j * dy
                a = (c + yj * Hdot0) / H
                if a >= 0.0:
                    if j <= n - 2:
                        dv = (-3.0 * v[j] + 4.0 * v[j + 1] - v[j + 2]) / (2.0 * dy)
                    else:
                        dv = (v[j + 1] - v[j - 1]) / (2.0 * dy)
                else:
                    if j >= 2:
                        dv = (3.0 * v[j] - 4.0 * v[j - 1] + v[j - 2]) / (2.0 * dy)
                    else:
                        dv = (v[j + 1] - v[j - 1]) / (2.0 * dy)
                fv = v[j] * (1.0 - v[j])
                w[j] = v[j] + dt * (a * dv + fv)

            Hstar = H + dt * Hdot0
            if Hstar <= 0.0 or not isfinite(Hstar):
                status = STATUS_NONFINITE
                return status, nrec, t, H, Hdot_out

            # Thomas solve of (1 + 2r) x_j - r x_{j-1} - r x_{j+1} = w_j
            r = dt / (Hstar * Hstar * dy * dy)
            cp[1] = -r / (1.0 + 2.0 * r)
            w[1] = w[1] / (1.0 + 2.0 * r)
            for j in range(2, n):
                cp[j] = -r / (1.0 + 2.0 * r + r * cp[j - 1])
                w[j] = (w[j] + r * w[j - 1]) / (1.0 + 2.0 * r + r * cp[j - 1])
            for j in range(n - 2, 0, -1):
                w[j] = w[j] - cp[j] * w[j + 1]

            vmin = 0.0
            for j in range(1, n):
                if w[j] < vmin:
                    vmin = w[j]
                if not isfinite(w[j]):
                    status = STATUS_NONFINITE
                    return status, nrec, t, H, Hdot_out
            if vmin < ABORT_NEG:
                status = STATUS_NEGATIVE
                return status, nrec, t, H, Hdot_out

            umax = 0.0
            for j in range(1, n):
                if w[j] < 0.0:
                    w[j] = 0.0
                v[j] = w[j]
                if v[j] > umax:
                    umax = v[j]
            v[0] = 0.0
            v[n] = 0.0

            flux1 = (v[n - 2] - 4.0 * v[n - 1]) / (2.0 * dy)
            Hdot1 = -mu * flux1 / Hstar - c
            H = H + 0.5 * dt * (Hdot0 + Hdot1)
            if not isfinite(H):
                status = STATUS_NONFINITE
                return status, nrec, t, H, Hdot_out
            t = t_stop if landed else t + dt

            Hdot_out = -mu * flux1 / H - c

            if H <= H_floor or landed or (step_i % stride) == 0:
                rec[nrec, 0] = t
                rec[nrec, 1] = H
                rec[nrec, 2] = umax
                rec[nrec, 3] = flux1
                rec[nrec, 4] = Hdot_out
                nrec += 1

            if H <= H_floor:
                status = STATUS_FLOOR
                return status, nrec, t, H, Hdot_out
            if landed:
                status = STATUS_T_STOP
                return status, nrec, t, H, Hdot_out

        return status, nrec, t, H, Hdot_out
    finally:
        free(w)
        free(cp)
