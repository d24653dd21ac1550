# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled integration kernels.

Mirror of ``_pycore`` (same signatures, status codes and array layouts);
see that module for the conventions.
"""

from libc.math cimport sin, cos, pow, fabs, sqrt, log, fmod, isfinite, M_PI

import numpy as np

from .tableau import as_floats

cdef enum:
    C_COMPLETED = 0
    C_COLLAPSED = 1
    C_STEP_UNDERFLOW = 2
    C_STEP_LIMIT = 3
    C_SINGULAR = 4
    C_FIELD_OK = 0
    C_FIELD_RADIUS = 1
    C_FIELD_SINGULAR = 2

COMPLETED, COLLAPSED, STEP_UNDERFLOW, STEP_LIMIT, SINGULAR = range(5)
FIELD_OK, FIELD_RADIUS, FIELD_SINGULAR = range(3)

BACKEND = "cython"

cdef enum:
    NSTAGE = 7
    NDIM = 5
    MAXTAN = 5

cdef double _SINGULAR_REL = 1e-12
cdef double _TWO_PI = 2.0 * M_PI

cdef double A[NSTAGE][NSTAGE]
cdef double E[NSTAGE]

_nodes, _rows, _b5, _err = as_floats()
for _i in range(NSTAGE):
    for _j in range(NSTAGE):
        A[_i][_j] = _rows[_i][_j] if _j < len(_rows[_i]) else 0.0
    E[_i] = _err[_i]


cdef struct Coef:
    double cs, eta, kap, pg0, sig, p0, chi, pac, gam, dist, om


cdef struct Ctl:
    double atol, rtol, h_min, h_max, safety, r_floor
    long max_steps


cdef Coef _coef(double[::1] c):
    cdef Coef k
    k.cs = c[0]; k.eta = c[1]; k.kap = c[2]; k.pg0 = c[3]; k.sig = c[4]
    k.p0 = c[5]; k.chi = c[6]; k.pac = c[7]; k.gam = c[8]; k.dist = c[9]
    k.om = c[10]
    return k


cdef Ctl _ctl(double[::1] c):
    cdef Ctl t
    t.atol = c[0]; t.rtol = c[1]; t.h_min = c[2]; t.h_max = c[3]
    t.safety = c[4]; t.max_steps = <long>c[5]; t.r_floor = c[6]
    return t


cdef inline void _pressure(const Coef* k, double r, double u, double sth,
                           double* gas, double* p, double* pr, double* pu) noexcept nogil:
    cdef double ir = 1.0 / r
    cdef double ir2 = ir * ir
    gas[0] = k.pg0 * pow(r, -3.0 * k.gam)
    p[0] = (gas[0] - 4.0 * k.eta * u * ir - 2.0 * k.sig * ir - k.p0
            - 4.0 * k.chi * (1.0 - ir) - 4.0 * k.kap * u * ir2 - k.pac * sth)
    pr[0] = (-3.0 * k.gam * gas[0] * ir + 4.0 * k.eta * u * ir2 + 2.0 * k.sig * ir2
             - 4.0 * k.chi * ir2 + 8.0 * k.kap * u * ir2 * ir)
    pu[0] = -4.0 * k.eta * ir - 4.0 * k.kap * ir2


cdef inline void _partials(const Coef* k, double r, double u, double ro, double uo,
                           double sth, double cth, double gas, double p, double pr,
                           double pu, double* d) noexcept nogil:
    # d b_i / d(r_i, u_i, r_j, u_j, theta)
    cdef double ir = 1.0 / r
    cdef double ir2 = ir * ir
    cdef double ir3 = ir2 * ir
    cdef double g3 = 3.0 * k.gam
    cdef double prr = (g3 * (g3 + 1.0) * gas * ir2 - 8.0 * k.eta * u * ir3
                       - 4.0 * k.sig * ir3 + 8.0 * k.chi * ir3 - 24.0 * k.kap * u * ir3 * ir)
    cdef double pru = 4.0 * k.eta * ir2 + 8.0 * k.kap * ir3
    cdef double pth = -k.pac * cth
    cdef double cs = k.cs
    d[0] = (1.0 + u / cs) * pr + (pr * u + pth * k.om) / cs + r / cs * prr * u
    d[1] = p / cs + (1.0 + u / cs) * pu + r / cs * (pru * u + pr) - 3.0 * u + 1.5 * u * u / cs
    d[2] = -2.0 * uo * uo / k.dist
    d[3] = -4.0 * ro * uo / k.dist
    d[4] = (1.0 + u / cs) * pth + r / cs * k.pac * k.om * sth


cdef int _field(const Coef* k, const double* y, double* f, double* J) noexcept nogil:
    """Fill ``f`` (and the row-major Jacobian ``J`` unless NULL)."""
    cdef double r1 = y[0], u1 = y[1], r2 = y[2], u2 = y[3], th = y[4]
    cdef double cs = k.cs, om = k.om, dist = k.dist
    cdef double gas1, p1, pr1, pu1, gas2, p2, pr2, pu2
    cdef double m11, m12, m21, m22, b1, b2, det, mnorm, a1, a2, pth, sth, cth
    cdef double d1[NDIM]
    cdef double d2[NDIM]
    cdef double db1[NDIM]
    cdef double db2[NDIM]
    cdef double g1[NDIM]
    cdef double g2[NDIM]
    cdef double c1, c2
    cdef int j
    if not (r1 > 0.0 and r2 > 0.0):
        return C_FIELD_RADIUS
    sth = sin(th)
    cth = cos(th)
    pth = -k.pac * cth
    _pressure(k, r1, u1, sth, &gas1, &p1, &pr1, &pu1)
    _pressure(k, r2, u2, sth, &gas2, &p2, &pr2, &pu2)
    m11 = (1.0 - u1 / cs) * r1 - r1 / cs * pu1
    m22 = (1.0 - u2 / cs) * r2 - r2 / cs * pu2
    m12 = r2 * r2 / dist
    m21 = r1 * r1 / dist
    b1 = ((1.0 + u1 / cs) * p1 + r1 / cs * (pr1 * u1 + pth * om)
          - 1.5 * u1 * u1 + u1 * u1 * u1 / (2.0 * cs) - 2.0 * r2 * u2 * u2 / dist)
    b2 = ((1.0 + u2 / cs) * p2 + r2 / cs * (pr2 * u2 + pth * om)
          - 1.5 * u2 * u2 + u2 * u2 * u2 / (2.0 * cs) - 2.0 * r1 * u1 * u1 / dist)
    det = m11 * m22 - m12 * m21
    mnorm = fabs(m11) + fabs(m12)
    if fabs(m21) + fabs(m22) > mnorm:
        mnorm = fabs(m21) + fabs(m22)
    if fabs(det) < _SINGULAR_REL * mnorm * mnorm:
        return C_FIELD_SINGULAR
    a1 = (m22 * b1 - m12 * b2) / det
    a2 = (m11 * b2 - m21 * b1) / det
    f[0] = u1
    f[1] = a1
    f[2] = u2
    f[3] = a2
    f[4] = om
    if J == NULL:
        return C_FIELD_OK
    _partials(k, r1, u1, r2, u2, sth, cth, gas1, p1, pr1, pu1, d1)
    _partials(k, r2, u2, r1, u1, sth, cth, gas2, p2, pr2, pu2, d2)
    db1[0] = d1[0]; db1[1] = d1[1]; db1[2] = d1[2]; db1[3] = d1[3]; db1[4] = d1[4]
    db2[0] = d2[2]; db2[1] = d2[3]; db2[2] = d2[0]; db2[3] = d2[1]; db2[4] = d2[4]
    g1[0] = (1.0 - u1 / cs - 4.0 * k.kap / (cs * r1 * r1)) * a1
    g1[1] = -r1 / cs * a1
    g1[2] = 2.0 * r2 / dist * a2
    g1[3] = 0.0
    g1[4] = 0.0
    g2[0] = 2.0 * r1 / dist * a1
    g2[1] = 0.0
    g2[2] = (1.0 - u2 / cs - 4.0 * k.kap / (cs * r2 * r2)) * a2
    g2[3] = -r2 / cs * a2
    g2[4] = 0.0
    for j in range(NDIM):
        J[0 * NDIM + j] = 0.0
        J[2 * NDIM + j] = 0.0
        J[4 * NDIM + j] = 0.0
        c1 = db1[j] - g1[j]
        c2 = db2[j] - g2[j]
        J[1 * NDIM + j] = (m22 * c1 - m12 * c2) / det
        J[3 * NDIM + j] = (m11 * c2 - m21 * c1) / det
    J[0 * NDIM + 1] = 1.0
    J[2 * NDIM + 3] = 1.0
    return C_FIELD_OK


cdef inline int _eval(const Coef* k, const double* y, int ntan, const double* V,
                      double* f, double* dV) noexcept nogil:
    cdef double J[NDIM * NDIM]
    cdef int code, m, i, j
    cdef double s
    if ntan == 0:
        return _field(k, y, f, NULL)
    code = _field(k, y, f, J)
    if code:
        return code
    for m in range(ntan):
        for i in range(NDIM):
            s = 0.0
            for j in range(NDIM):
                s += J[i * NDIM + j] * V[m * NDIM + j]
            dV[m * NDIM + i] = s
    return C_FIELD_OK


cdef inline int _code_status(int code) noexcept nogil:
    return C_SINGULAR if code == C_FIELD_SINGULAR else C_COLLAPSED


cdef int _integrate(const Coef* k, const Ctl* ct, double* y, double t_end,
                    double theta_end, int ntan, double* V, double* h,
                    long* steps, long* rejected) noexcept nogil:
    cdef double K[NSTAGE][NDIM]
    cdef double KV[NSTAGE][MAXTAN * NDIM]
    cdef double yi[NDIM]
    cdef double vi[MAXTAN * NDIM]
    cdef int nv = ntan * NDIM
    cdef int i, j, c, code, ok, last
    cdef int status = C_COMPLETED
    cdef int fail = C_FIELD_OK
    cdef double t = 0.0, hs, err, acc, e, sc, fac, hn, s, ay, an
    cdef long nstep = 0, nrej = 0
    if y[0] <= ct.r_floor or y[2] <= ct.r_floor:
        return C_COLLAPSED
    code = _eval(k, y, ntan, V, K[0], KV[0])
    if code:
        return _code_status(code)
    if h[0] > ct.h_max:
        h[0] = ct.h_max
    while t < t_end:
        if nstep + nrej >= ct.max_steps:
            status = C_STEP_LIMIT
            break
        hs = h[0]
        last = t + hs >= t_end
        if last:
            hs = t_end - t
        ok = 1
        for i in range(1, NSTAGE):
            for c in range(NDIM):
                s = 0.0
                for j in range(i):
                    s += A[i][j] * K[j][c]
                yi[c] = y[c] + hs * s
            for c in range(nv):
                s = 0.0
                for j in range(i):
                    s += A[i][j] * KV[j][c]
                vi[c] = V[c] + hs * s
            code = _eval(k, yi, ntan, vi, K[i], KV[i])
            if code:
                fail = code
                ok = 0
                break
        err = 0.0
        if ok:
            acc = 0.0
            for c in range(NDIM):
                s = 0.0
                for j in range(1, NSTAGE):
                    s += E[j] * (K[j][c] - K[0][c])
                e = hs * s
                ay = fabs(y[c])
                an = fabs(yi[c])
                sc = ct.atol + ct.rtol * (ay if ay > an else an)
                acc += (e / sc) * (e / sc)
            err = sqrt(acc / NDIM)
            if not isfinite(err):
                ok = 0
        if ok and err <= 1.0:
            nstep += 1
            if err == 0.0:
                fac = 5.0
            else:
                fac = ct.safety * pow(err, -0.2)
                if fac > 5.0:
                    fac = 5.0
                elif fac < 0.2:
                    fac = 0.2
            if last:
                t = t_end
            else:
                t = t + hs
            for c in range(NDIM):
                y[c] = yi[c]
                K[0][c] = K[NSTAGE - 1][c]
            for c in range(nv):
                V[c] = vi[c]
                KV[0][c] = KV[NSTAGE - 1][c]
            hn = hs * fac
            if hn > ct.h_max:
                hn = ct.h_max
            if last and hs < h[0]:
                if hn > h[0]:
                    h[0] = hn
            else:
                h[0] = hn
            if y[0] <= ct.r_floor or y[2] <= ct.r_floor:
                status = C_COLLAPSED
                break
        else:
            nrej += 1
            if not ok:
                fac = 0.2
            else:
                fac = ct.safety * pow(err, -0.2)
                if fac < 0.2:
                    fac = 0.2
            h[0] = hs * fac
            if h[0] < ct.h_min:
                status = _code_status(fail) if fail else C_STEP_UNDERFLOW
                break
            fail = C_FIELD_OK
    if status == C_COMPLETED:
        y[4] = theta_end
    steps[0] += nstep
    rejected[0] += nrej
    return status


def field(double[::1] coef, y):
    """Return ``(code, f)`` with ``f`` the 5-component derivative."""
    cdef Coef k = _coef(coef)
    cdef double ys[NDIM]
    cdef double f[NDIM]
    cdef int c
    for c in range(NDIM):
        ys[c] = y[c]
    code = _field(&k, ys, f, NULL)
    if code:
        return code, None
    return code, [f[c] for c in range(NDIM)]


def field_jac(double[::1] coef, y):
    """Return ``(code, f, J)`` with the analytic 5x5 Jacobian as row lists."""
    cdef Coef k = _coef(coef)
    cdef double ys[NDIM]
    cdef double f[NDIM]
    cdef double J[NDIM * NDIM]
    cdef int c
    for c in range(NDIM):
        ys[c] = y[c]
    code = _field(&k, ys, f, J)
    if code:
        return code, None, None
    return (code, [f[c] for c in range(NDIM)],
            [[J[i * NDIM + j] for j in range(NDIM)] for i in range(NDIM)])


def integrate(double[::1] coef, double[::1] y, double t_end, double theta_end,
              double[::1] ctl, double h, double[:, ::1] V=None):
    """Advance ``y`` (and tangents ``V``) by ``t_end`` in tau; in place.

    Returns ``(status, steps, rejected, h_next)``.
    """
    cdef Coef k = _coef(coef)
    cdef Ctl ct = _ctl(ctl)
    cdef int ntan = 0
    cdef double* vp = NULL
    cdef double dummy[1]
    cdef long steps = 0, rej = 0
    cdef int status
    if V is not None and V.shape[0] > 0:
        if V.shape[0] > MAXTAN or V.shape[1] != NDIM:
            raise ValueError("tangent array must be (ntan <= 5, 5)")
        ntan = V.shape[0]
        vp = &V[0, 0]
    else:
        vp = dummy
    with nogil:
        status = _integrate(&k, &ct, &y[0], t_end, theta_end, ntan, vp, &h, &steps, &rej)
    return status, steps, rej, h


def run_periods(double[::1] coef, double[::1] y, long n, double period,
                double[::1] ctl, double h, double[:, ::1] out=None):
    """Advance ``n`` whole drive periods, optionally recording each end state.

    Returns ``(status, done, steps, rejected, h_next)``.
    """
    cdef Coef k = _coef(coef)
    cdef Ctl ct = _ctl(ctl)
    cdef long steps = 0, rej = 0, j, done = 0
    cdef int status = C_COMPLETED, c
    cdef double dummy[1]
    cdef bint record = out is not None
    with nogil:
        for j in range(n):
            status = _integrate(&k, &ct, &y[0], period, y[4], 0, dummy, &h, &steps, &rej)
            if status != C_COMPLETED:
                break
            if record:
                for c in range(NDIM):
                    out[j, c] = y[c]
            done += 1
    return status, done, steps, rej, h


def lyapunov(double[::1] coef, double[::1] y, double[:, ::1] V, long nseg,
             double seg_len, double seg_phase, double[::1] ctl, double h,
             double[:, ::1] logs):
    """Co-integrate ``y`` and tangents over ``nseg`` segments with
    modified Gram-Schmidt after each; ``logs[j, m]`` is the m-th log stretch.

    Returns ``(status, done, steps, rejected, h_next)``.
    """
    cdef Coef k = _coef(coef)
    cdef Ctl ct = _ctl(ctl)
    cdef int ntan = V.shape[0]
    cdef long steps = 0, rej = 0, j, done = 0
    cdef int status = C_COMPLETED, m, q, c
    cdef double theta_end, dot, norm
    cdef double* vp = &V[0, 0]
    if ntan > MAXTAN or V.shape[1] != NDIM:
        raise ValueError("tangent array must be (ntan <= 5, 5)")
    with nogil:
        for j in range(nseg):
            theta_end = fmod(y[4] + seg_phase, _TWO_PI)
            status = _integrate(&k, &ct, &y[0], seg_len, theta_end, ntan, vp, &h, &steps, &rej)
            if status != C_COMPLETED:
                break
            for m in range(ntan):
                for q in range(m):
                    dot = 0.0
                    for c in range(NDIM):
                        dot += vp[m * NDIM + c] * vp[q * NDIM + c]
                    for c in range(NDIM):
                        vp[m * NDIM + c] -= dot * vp[q * NDIM + c]
                norm = 0.0
                for c in range(NDIM):
                    norm += vp[m * NDIM + c] * vp[m * NDIM + c]
                norm = sqrt(norm)
                logs[j, m] = log(norm)
                for c in range(NDIM):
                    vp[m * NDIM + c] /= norm
            done += 1
    return status, done, steps, rej, h
