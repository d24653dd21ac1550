"""Pure-Python integration kernels.

Same call signatures and status codes as the compiled ``_ccore`` module.
Used when the extension is not built, and as a cross-check of it.

Array conventions shared with the compiled core:

* ``coef``: float64[11] = (cs, eta, kap, pg0, sig, p0, chi, pac, gamma, dist, Omega)
* ``ctl``: float64[7] = (atol, rtol, h_min, h_max, safety, max_steps, r_floor)
* ``y``: float64[5] state, updated in place
* ``V``: float64[ntan, 5] tangent vectors (rows), updated in place
"""

import math

from .tableau import as_floats

COMPLETED, COLLAPSED, STEP_UNDERFLOW, STEP_LIMIT, SINGULAR = range(5)
FIELD_OK, FIELD_RADIUS, FIELD_SINGULAR = range(3)

_C, _A, _B, _E = as_floats()
_TWO_PI = 2.0 * math.pi
_SINGULAR_REL = 1e-12

BACKEND = "python"


def _pressure(k, r, u, sth, cth):
    cs, eta, kap, pg0, sig, p0, chi, pac, gam = k[:9]
    gas = pg0 * r ** (-3.0 * gam)
    ir = 1.0 / r
    ir2 = ir * ir
    p = gas - 4.0 * eta * u * ir - 2.0 * sig * ir - p0 - 4.0 * chi * (1.0 - ir) \
        - 4.0 * kap * u * ir2 - pac * sth
    pr = -3.0 * gam * gas * ir + 4.0 * eta * u * ir2 + 2.0 * sig * ir2 \
        - 4.0 * chi * ir2 + 8.0 * kap * u * ir2 * ir
    pu = -4.0 * eta * ir - 4.0 * kap * ir2
    return gas, p, pr, pu


def _assemble(k, y):
    cs, eta, kap = k[0], k[1], k[2]
    pac, dist, om = k[7], k[9], k[10]
    r1, u1, r2, u2, th = y
    if not (r1 > 0.0 and r2 > 0.0):
        return None
    sth, cth = math.sin(th), math.cos(th)
    pth = -pac * cth
    gas1, p1, pr1, pu1 = _pressure(k, r1, u1, sth, cth)
    gas2, p2, pr2, pu2 = _pressure(k, r2, u2, sth, cth)
    m11 = (1.0 - u1 / cs) * r1 - r1 / cs * pu1
    m22 = (1.0 - u2 / cs) * r2 - r2 / cs * pu2
    m12 = r2 * r2 / dist
    m21 = r1 * r1 / dist
    b1 = (1.0 + u1 / cs) * p1 + r1 / cs * (pr1 * u1 + pth * om) \
        - 1.5 * u1 * u1 + u1 * u1 * u1 / (2.0 * cs) - 2.0 * r2 * u2 * u2 / dist
    b2 = (1.0 + u2 / cs) * p2 + r2 / cs * (pr2 * u2 + pth * om) \
        - 1.5 * u2 * u2 + u2 * u2 * u2 / (2.0 * cs) - 2.0 * r1 * u1 * u1 / dist
    det = m11 * m22 - m12 * m21
    mnorm = max(abs(m11) + abs(m12), abs(m21) + abs(m22))
    return (sth, cth, gas1, p1, pr1, pu1, gas2, p2, pr2, pu2,
            m11, m12, m21, m22, b1, b2, det, mnorm)


def field(coef, y):
    """Return ``(code, f)`` with ``f`` the 5-component derivative."""
    if not isinstance(coef, tuple):
        coef = tuple(map(float, coef))
    asm = _assemble(coef, y)
    if asm is None:
        return FIELD_RADIUS, None
    m11, m12, m21, m22, b1, b2, det, mnorm = asm[10:]
    if abs(det) < _SINGULAR_REL * mnorm * mnorm:
        return FIELD_SINGULAR, None
    a1 = (m22 * b1 - m12 * b2) / det
    a2 = (m11 * b2 - m21 * b1) / det
    return FIELD_OK, [y[1], a1, y[3], a2, coef[10]]


def _rhs_partials(k, r, u, ro, uo, sth, cth, gas, p, pr, pu):
    # d b_i / d(r_i, u_i, r_j, u_j, theta)
    cs, eta, kap, sig, chi, pac, gam, dist, om = (
        k[0], k[1], k[2], k[4], k[6], k[7], k[8], k[9], k[10])
    ir = 1.0 / r
    ir2 = ir * ir
    ir3 = ir2 * ir
    g3 = 3.0 * gam
    prr = g3 * (g3 + 1.0) * gas * ir2 - 8.0 * eta * u * ir3 - 4.0 * sig * ir3 \
        + 8.0 * chi * ir3 - 24.0 * kap * u * ir3 * ir
    pru = 4.0 * eta * ir2 + 8.0 * kap * ir3
    pth = -pac * cth
    return (
        (1.0 + u / cs) * pr + (pr * u + pth * om) / cs + r / cs * prr * u,
        p / cs + (1.0 + u / cs) * pu + r / cs * (pru * u + pr) - 3.0 * u + 1.5 * u * u / cs,
        -2.0 * uo * uo / dist,
        -4.0 * ro * uo / dist,
        (1.0 + u / cs) * pth + r / cs * pac * om * sth,
    )


def field_jac(coef, y):
    """Return ``(code, f, J)`` with the analytic 5x5 Jacobian as row lists."""
    if not isinstance(coef, tuple):
        coef = tuple(map(float, coef))
    asm = _assemble(coef, y)
    if asm is None:
        return FIELD_RADIUS, None, None
    (sth, cth, gas1, p1, pr1, pu1, gas2, p2, pr2, pu2,
     m11, m12, m21, m22, b1, b2, det, mnorm) = asm
    if abs(det) < _SINGULAR_REL * mnorm * mnorm:
        return FIELD_SINGULAR, None, None
    cs, kap, dist = coef[0], coef[2], coef[9]
    r1, u1, r2, u2, _ = y
    a1 = (m22 * b1 - m12 * b2) / det
    a2 = (m11 * b2 - m21 * b1) / det
    d1 = _rhs_partials(coef, r1, u1, r2, u2, sth, cth, gas1, p1, pr1, pu1)
    d2 = _rhs_partials(coef, r2, u2, r1, u1, sth, cth, gas2, p2, pr2, pu2)
    # state order (r1, u1, r2, u2, th); map bubble-local partials to it
    db1 = (d1[0], d1[1], d1[2], d1[3], d1[4])
    db2 = (d2[2], d2[3], d2[0], d2[1], d2[4])
    dm11_r1 = 1.0 - u1 / cs - 4.0 * kap / (cs * r1 * r1)
    dm22_r2 = 1.0 - u2 / cs - 4.0 * kap / (cs * r2 * r2)
    g1 = (dm11_r1 * a1, -r1 / cs * a1, 2.0 * r2 / dist * a2, 0.0, 0.0)
    g2 = (2.0 * r1 / dist * a1, 0.0, dm22_r2 * a2, -r2 / cs * a2, 0.0)
    row1 = [0.0] * 5
    row3 = [0.0] * 5
    for j in range(5):
        c1 = db1[j] - g1[j]
        c2 = db2[j] - g2[j]
        row1[j] = (m22 * c1 - m12 * c2) / det
        row3[j] = (m11 * c2 - m21 * c1) / det
    jac = [
        [0.0, 1.0, 0.0, 0.0, 0.0],
        row1,
        [0.0, 0.0, 0.0, 1.0, 0.0],
        row3,
        [0.0, 0.0, 0.0, 0.0, 0.0],
    ]
    return FIELD_OK, [u1, a1, u2, a2, coef[10]], jac


def _eval(coef, y, tangents):
    if tangents is None:
        code, f = field(coef, y)
        return code, f, None
    code, f, jac = field_jac(coef, y)
    if code:
        return code, None, None
    dv = [[sum(jr[j] * v[j] for j in range(5)) for jr in jac] for v in tangents]
    return code, f, dv


def _code_status(code):
    return SINGULAR if code == FIELD_SINGULAR else COLLAPSED


def _integrate(coef, y, t_end, theta_end, ctl, h, tangents):
    coef = tuple(map(float, coef))
    atol, rtol, h_min, h_max, safety = (float(c) for c in ctl[:5])
    max_steps = int(ctl[5])
    r_floor = float(ctl[6])
    ntan = 0 if tangents is None else len(tangents)
    steps = rejected = 0
    if y[0] <= r_floor or y[2] <= r_floor:
        return COLLAPSED, y, tangents, steps, rejected, h
    code, k1, kv1 = _eval(coef, y, tangents)
    if code:
        return _code_status(code), y, tangents, steps, rejected, h
    h = min(h, h_max)
    t = 0.0
    status = COMPLETED
    fail = FIELD_OK
    while t < t_end:
        if steps + rejected >= max_steps:
            status = STEP_LIMIT
            break
        hs = h
        last = t + hs >= t_end
        if last:
            hs = t_end - t
        ks = [k1]
        kvs = [kv1]
        ok = True
        for i in range(1, 7):
            row = _A[i]
            yi = [y[c] + hs * sum(row[j] * ks[j][c] for j in range(i)) for c in range(5)]
            vi = None
            if ntan:
                vi = [[tangents[m][c] + hs * sum(row[j] * kvs[j][m][c] for j in range(i))
                       for c in range(5)] for m in range(ntan)]
            code, fi, dvi = _eval(coef, yi, vi)
            if code:
                fail = code
                ok = False
                break
            ks.append(fi)
            kvs.append(dvi)
        if ok:
            ynew = yi
            vnew = vi
            acc = 0.0
            for c in range(5):
                e = hs * sum(_E[j] * (ks[j][c] - ks[0][c]) for j in range(1, 7))
                sc = atol + rtol * max(abs(y[c]), abs(ynew[c]))
                acc += (e / sc) ** 2
            err = math.sqrt(acc / 5.0)
            if not math.isfinite(err):
                ok = False
        if ok and err <= 1.0:
            steps += 1
            fac = 5.0 if err == 0.0 else min(5.0, max(0.2, safety * err ** -0.2))
            t = t_end if last else t + hs
            y = ynew
            tangents = vnew
            k1 = ks[6]
            kv1 = kvs[6]
            hn = min(hs * fac, h_max)
            h = hn if not (last and hs < h) else max(h, hn)
            if y[0] <= r_floor or y[2] <= r_floor:
                status = COLLAPSED
                break
        else:
            rejected += 1
            fac = 0.2 if not ok else max(0.2, safety * err ** -0.2)
            h = hs * fac
            if h < h_min:
                status = _code_status(fail) if fail else STEP_UNDERFLOW
                break
            fail = FIELD_OK
    if status == COMPLETED:
        y[4] = theta_end
    return status, y, tangents, steps, rejected, h


def integrate(coef, y, t_end, theta_end, ctl, h, V=None):
    """Advance ``y`` (and tangents ``V``) by ``t_end`` in tau; in place.

    Returns ``(status, steps, rejected, h_next)``. On completion the phase
    component is set to ``theta_end``.
    """
    tangents = None if V is None or len(V) == 0 else [list(map(float, v)) for v in V]
    status, yl, tangents, steps, rej, h = _integrate(
        coef, [float(v) for v in y], float(t_end), float(theta_end), ctl, float(h), tangents)
    y[:] = yl
    if tangents is not None:
        V[:] = tangents
    return status, steps, rej, h


def run_periods(coef, y, n, period, ctl, h, out=None):
    """Advance ``n`` whole drive periods, optionally recording each end state.

    Returns ``(status, done, steps, rejected, h_next)``.
    """
    steps = rej = 0
    yl = [float(v) for v in y]
    status = COMPLETED
    done = 0
    for j in range(n):
        status, yl, _, s, r, h = _integrate(coef, yl, period, yl[4], ctl, h, None)
        steps += s
        rej += r
        if status != COMPLETED:
            break
        if out is not None:
            out[j, :] = yl
        done += 1
    y[:] = yl
    return status, done, steps, rej, h


def lyapunov(coef, y, V, nseg, seg_len, seg_phase, ctl, h, logs):
    """Co-integrate ``y`` and tangents ``V`` over ``nseg`` segments.

    After each segment the tangents are re-orthonormalised by modified
    Gram-Schmidt in row order and ``logs[j, m]`` receives the log of the
    m-th stretch. Returns ``(status, done, steps, rejected, h_next)``.
    """
    ntan = V.shape[0]
    yl = [float(v) for v in y]
    tangents = [list(map(float, v)) for v in V]
    steps = rej = 0
    status = COMPLETED
    done = 0
    for j in range(nseg):
        theta_end = math.fmod(yl[4] + seg_phase, _TWO_PI)
        status, yl, tangents, s, r, h = _integrate(coef, yl, seg_len, theta_end, ctl, h, tangents)
        steps += s
        rej += r
        if status != COMPLETED:
            break
        for m in range(ntan):
            v = tangents[m]
            for q in range(m):
                w = tangents[q]
                dot = sum(v[c] * w[c] for c in range(5))
                for c in range(5):
                    v[c] -= dot * w[c]
            norm = math.sqrt(sum(x * x for x in v))
            logs[j, m] = math.log(norm)
            for c in range(5):
                v[c] /= norm
        done += 1
    y[:] = yl
    V[:] = tangents
    return status, done, steps, rej, h
