"""Compiled right-hand sides and the Runge-Kutta drivers.

Every right-hand side has the signature ``rhs(t, y, args, out)`` on real
state vectors; ``args`` is the flat float64 array built by :func:`pack`.
Post-step hooks ``hook(y) -> bool`` may rewrite the state in place after an
accepted step (used for stereographic chart switching) and report whether
they did.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .model import PhysicalParams, Pumping

# layout of the packed argument vector
I_OMEGA, I_OMEGA1, I_OMEGA2, I_GAMMA, I_P, I_C, I_HBAR = range(7)
I_PUMP = 7  # carrier re, carrier im, K, then (re, im, freq) * K

# chart-switch threshold: switch once the active coordinate exceeds this modulus
CHART_SWITCH = 2.0


def pack(params: PhysicalParams, pump: Pumping) -> np.ndarray:
    pump.validate(params.Omega)
    head = np.array([params.Omega, params.omega1, params.omega2, params.gamma,
                     params.p, params.c, params.hbar])
    return np.concatenate([head, pump.packed()])


@njit(cache=True, nogil=True)
def pump_value(t, args):
    phase = args[I_OMEGA] * t
    val = args[I_PUMP] * np.cos(phase) + args[I_PUMP + 1] * np.sin(phase)
    k = int(args[I_PUMP + 2])
    for j in range(k):
        base = I_PUMP + 3 + 3 * j
        ph = args[base + 2] * t
        val += args[base] * np.cos(ph) + args[base + 1] * np.sin(ph)
    return val


@njit(cache=True, nogil=True)
def mbe_rhs(t, y, args, out):
    Om, w1, w2, gam, p, c, hb = args[0], args[1], args[2], args[3], args[4], args[5], args[6]
    kappa = p * (w2 - w1)
    A, B = y[0], y[1]
    C1 = complex(y[2], y[3])
    C2 = complex(y[4], y[5])
    j = 2.0 * kappa * (C1.conjugate() * C2).imag
    ah = kappa / c * (A + pump_value(t, args)) / hb
    dC1 = -1j * w1 * C1 + ah * C2
    dC2 = -1j * w2 * C2 - ah * C1
    out[0] = B
    out[1] = -Om * Om * A - gam * B + c * j
    out[2] = dC1.real
    out[3] = dC1.imag
    out[4] = dC2.real
    out[5] = dC2.imag


@njit(cache=True, nogil=True)
def reduced_rhs(t, y, args, out):
    """(M, coord, chart sign); the North and South chart equations differ only by sign."""
    Om, w1, w2, gam, p, c, hb = args[0], args[1], args[2], args[3], args[4], args[5], args[6]
    w = w2 - w1
    kappa = p * w
    b = kappa / (c * hb)
    ktil = 2.0 * c * kappa / Om
    M = complex(y[0], y[1])
    z = complex(y[2], y[3])
    s = y[4]
    z2 = z.imag / (z.real * z.real + z.imag * z.imag + 1.0)
    dM = -1j * (Om * M + gam * M.imag - ktil * z2)
    beta = b * (M.real + pump_value(t, args))
    dz = -1j * w * z - s * beta * (z * z + 1.0)
    out[0] = dM.real
    out[1] = dM.imag
    out[2] = dz.real
    out[3] = dz.imag
    out[4] = 0.0


@njit(cache=True, nogil=True)
def envelope_rhs(t, y, args, out):
    Om, w1, w2, gam, p, c, hb = args[0], args[1], args[2], args[3], args[4], args[5], args[6]
    w = w2 - w1
    kappa = p * w
    b = kappa / (c * hb)
    ktil = 2.0 * c * kappa / Om
    Mm = complex(y[0], y[1])
    Qq = complex(y[2], y[3])
    em = complex(np.cos(Om * t), -np.sin(Om * t))
    eq = complex(np.cos(w * t), -np.sin(w * t))
    M = em * Mm
    Q = eq * Qq
    dMm = -1j * (gam * M.imag - ktil * Q.imag / (abs(Qq) ** 2 + 1.0)) / em
    dQq = -b * (M.real + pump_value(t, args)) * (Q * Q + 1.0) / eq
    out[0] = dMm.real
    out[1] = dMm.imag
    out[2] = dQq.real
    out[3] = dQq.imag


@njit(cache=True, nogil=True)
def averaged_rhs_slow(t, y, args, out):
    """Resonant averaged field in slow time tau = p t; args = (gamma1, kappa1, b1, Ae re, Ae im)."""
    g1, k1, b1 = args[0], args[1], args[2]
    Ae = complex(args[3], args[4])
    M = complex(y[0], y[1])
    Q = complex(y[2], y[3])
    q2 = Q.real * Q.real + Q.imag * Q.imag
    dM = -0.5 * g1 * M + 0.5 * k1 * Q / (q2 + 1.0)
    N = M + Ae
    dQ = 0.5 * b1 * (N * (q2 - 1.0) - 2.0 * Q * (N.conjugate() * Q).real)
    out[0] = dM.real
    out[1] = dM.imag
    out[2] = dQ.real
    out[3] = dQ.imag


@njit(cache=True, nogil=True)
def no_hook(y):
    return False


@njit(cache=True, nogil=True)
def chart_hook(y):
    z = complex(y[2], y[3])
    if abs(z) > CHART_SWITCH:
        w = 1.0 / z.conjugate()
        y[2] = w.real
        y[3] = w.imag
        y[4] = -y[4]
        return True
    return False


# Dormand-Prince 5(4) tableau with the quartic dense-output polynomial
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_A = np.array([
    [0.0, 0.0, 0.0, 0.0, 0.0],
    [1 / 5, 0.0, 0.0, 0.0, 0.0],
    [3 / 40, 9 / 40, 0.0, 0.0, 0.0],
    [44 / 45, -56 / 15, 32 / 9, 0.0, 0.0],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0.0],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
])
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
_E = np.array([-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40])
_P = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

STATUS_OK = 0
STATUS_UNDERFLOW = 1
STATUS_NONFINITE = 2


@njit(cache=True, nogil=True)
def dopri5(rhs, hook, y0, args, ts, rtol, atol, h_max, h_min):
    """Integrate on [ts[0], ts[-1]] and return the solution at every ``ts``.

    The embedded error is controlled per unit step (scaled by ``min(h, 1)``),
    which keeps the accumulated drift of conserved quantities near ``rtol``
    on long horizons rather than ``rtol`` times the step count.

    Returns ``(ys, status, n_accepted, n_rejected)``.
    """
    n = y0.size
    ns = ts.size
    ys = np.empty((ns, n))
    y = y0.copy()
    ys[0] = y
    t = ts[0]
    t_end = ts[-1]
    K = np.empty((7, n))
    ytmp = np.empty(n)
    ynew = np.empty(n)
    rhs(t, y, args, K[0])
    h = min(h_max, 0.01 * (t_end - t))
    if h <= 0.0:
        h = t_end - t
    isample = 1
    n_acc = 0
    n_rej = 0
    status = STATUS_OK
    while t < t_end and isample < ns:
        h = min(h, h_max)
        last = False
        if t + h >= t_end:
            h = t_end - t
            last = True
        for s in range(1, 6):
            for i in range(n):
                acc = 0.0
                for m in range(s):
                    acc += _A[s, m] * K[m, i]
                ytmp[i] = y[i] + h * acc
            rhs(t + _C[s] * h, ytmp, args, K[s])
        for i in range(n):
            acc = 0.0
            for m in range(6):
                acc += _B[m] * K[m, i]
            ynew[i] = y[i] + h * acc
        rhs(t + h, ynew, args, K[6])
        err = 0.0
        for i in range(n):
            e = 0.0
            for m in range(7):
                e += _E[m] * K[m, i]
            sc = (atol + rtol * max(abs(y[i]), abs(ynew[i]))) * min(h, 1.0)
            err += (h * e / sc) ** 2
        err = np.sqrt(err / n)
        if not np.isfinite(err):
            err = 1e10
        if err <= 1.0:
            t_new = t_end if last else t + h
            # dense output for samples inside (t, t_new]
            while isample < ns and ts[isample] <= t_new:
                theta = (ts[isample] - t) / h
                if isample == ns - 1 and last:
                    ys[isample] = ynew
                else:
                    th1 = theta
                    th2 = th1 * theta
                    th3 = th2 * theta
                    th4 = th3 * theta
                    for i in range(n):
                        acc = 0.0
                        for m in range(7):
                            q = _P[m, 0] * th1 + _P[m, 1] * th2 + _P[m, 2] * th3 + _P[m, 3] * th4
                            acc += K[m, i] * q
                        ys[isample, i] = y[i] + h * acc
                isample += 1
            t = t_new
            for i in range(n):
                y[i] = ynew[i]
                K[0, i] = K[6, i]
            n_acc += 1
            if hook(y):
                rhs(t, y, args, K[0])
            if err == 0.0:
                fac = 10.0
            else:
                fac = min(10.0, max(0.2, 0.9 * err ** -0.25))
            h = h * fac
        else:
            n_rej += 1
            h = h * max(0.2, 0.9 * err ** -0.25)
        if h < h_min and t < t_end:
            status = STATUS_UNDERFLOW
            break
    for k in range(isample, ns):
        for i in range(n):
            ys[k, i] = np.nan
    return ys, status, n_acc, n_rej


@njit(cache=True, nogil=True)
def rk4(rhs, hook, y0, args, ts, dt):
    """Classical RK4 with steps of at most ``dt`` landing on every sample time."""
    n = y0.size
    ns = ts.size
    ys = np.empty((ns, n))
    y = y0.copy()
    ys[0] = y
    k1 = np.empty(n)
    k2 = np.empty(n)
    k3 = np.empty(n)
    k4 = np.empty(n)
    tmp = np.empty(n)
    n_steps = 0
    for s in range(1, ns):
        t = ts[s - 1]
        span = ts[s] - t
        m = int(np.ceil(span / dt - 1e-12))
        if m < 1:
            m = 1
        h = span / m
        for _ in range(m):
            rhs(t, y, args, k1)
            for i in range(n):
                tmp[i] = y[i] + 0.5 * h * k1[i]
            rhs(t + 0.5 * h, tmp, args, k2)
            for i in range(n):
                tmp[i] = y[i] + 0.5 * h * k2[i]
            rhs(t + 0.5 * h, tmp, args, k3)
            for i in range(n):
                tmp[i] = y[i] + h * k3[i]
            rhs(t + h, tmp, args, k4)
            for i in range(n):
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            t += h
            n_steps += 1
            hook(y)
        ys[s] = y
    return ys, n_steps
