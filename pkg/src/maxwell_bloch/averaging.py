"""Interaction-picture fields, their time averages and the averaged flow.

Envelope amplitudes are defined by M = e^{-i Omega t} Mm and Q = e^{-i omega t} Qq.
The envelope field is ``p * (f_r, g_r)``; the averaged field is its time mean.
Closed forms exist for the North chart in resonance and for the Maxwell
component in non-resonance; everything else goes through Simpson quadrature.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson, simpson, solve_ivp

from . import _kernels
from .errors import InvalidParams
from .model import (ZERO_PUMP, Chart, EnvelopeState, PhysicalParams, Pumping,
                    pumping_eval)
from .solver import (AveragedTrajectory, EnvelopeTrajectory, SolverConfig, run_kernel,
                     step_cap)

#: quadrature nodes per period of the fastest frequency
POINTS_PER_PERIOD = 200
#: default averaging window in carrier periods
DEFAULT_PERIODS = 1000
_CHUNK = 1 << 18


class Regime(enum.Enum):
    RESONANCE = "Resonance"
    NON_RESONANCE = "NonResonance"


def regime_of(params: PhysicalParams) -> Regime:
    return Regime.RESONANCE if params.is_resonant else Regime.NON_RESONANCE


def _rates(params: PhysicalParams) -> tuple[float, float, float]:
    """(gamma1, kappa1, b1); gamma1 is read as gamma / p."""
    return params.gamma1, params.kappa1, params.b1


def f_r(Mm, Qq, t, params: PhysicalParams):
    """Maxwell component of the envelope field divided by p; vectorized in ``t``."""
    g1, k1, _ = _rates(params)
    t = np.asarray(t, dtype=float)
    em = np.exp(-1j * params.Omega * t)
    eq = np.exp(-1j * params.omega * t)
    inner = g1 * np.imag(em * Mm) - k1 * np.imag(eq * Qq) / (abs(Qq) ** 2 + 1.0)
    return -1j * inner / em


def g_r(Mm, Qq, t, params: PhysicalParams, pump: Pumping = ZERO_PUMP,
        chart: Chart = Chart.NORTH):
    """Bloch component of the envelope field divided by p, in ``chart``."""
    _, _, b1 = _rates(params)
    t = np.asarray(t, dtype=float)
    em = np.exp(-1j * params.Omega * t)
    eq = np.exp(-1j * params.omega * t)
    drive = np.real(em * Mm) + pumping_eval(pump, params, t)
    Q = eq * Qq
    return -Chart(chart).sign * b1 * drive * (Q * Q + 1.0) / eq


def envelope_rhs(E: EnvelopeState, t: float, params: PhysicalParams,
                 pump: Pumping = ZERO_PUMP) -> tuple[complex, complex]:
    """Tangent ``p * (f_r, g_r)`` of the envelope amplitudes."""
    out = np.empty(4)
    _kernels.envelope_rhs(float(t), E.as_array(), _kernels.pack(params, pump), out)
    return complex(out[0], out[1]), complex(out[2], out[3])


def fbar_resonant(Mm, Qq, params: PhysicalParams):
    g1, k1, _ = _rates(params)
    return -0.5 * g1 * Mm + 0.5 * k1 * Qq / (abs(Qq) ** 2 + 1.0)


def gbar_resonant(Mm, Qq, params: PhysicalParams, Ae: complex):
    _, _, b1 = _rates(params)
    N = Mm + Ae
    q2 = abs(Qq) ** 2
    return 0.5 * b1 * (N * (q2 - 1.0) - 2.0 * Qq * (np.conj(N) * Qq).real)


def fbar_nonresonant(Mm, params: PhysicalParams):
    return -0.5 * params.gamma1 * Mm


def _csimpson(y, h):
    return simpson(y.real, dx=h) + 1j * simpson(y.imag, dx=h)


def _ccumulative(y, h):
    return (cumulative_simpson(y.real, dx=h, initial=0)
            + 1j * cumulative_simpson(y.imag, dx=h, initial=0))


def _grid(params: PhysicalParams, pump: Pumping, T: float) -> tuple[int, float]:
    fastest = max([params.Omega, params.omega] + [abs(f) for f in pump.frequencies])
    step = 2.0 * math.pi / (POINTS_PER_PERIOD * fastest)
    n = int(math.ceil(T / step))
    n += n % 2  # Simpson wants an even number of intervals
    return n, T / n


def numeric_average(E: EnvelopeState, params: PhysicalParams, pump: Pumping = ZERO_PUMP,
                    T_avg: float | None = None, chart: Chart = Chart.NORTH) -> tuple[complex, complex]:
    """Simpson mean of ``p * (f_r, g_r)`` over ``[0, T_avg]``.

    ``E.Qq`` is read as the envelope of the coordinate of ``chart``.
    """
    if T_avg is None:
        T_avg = DEFAULT_PERIODS * 2.0 * math.pi / params.Omega
    if not T_avg > 0:
        raise InvalidParams("T_avg must be positive")
    n, h = _grid(params, pump, T_avg)
    sf = 0j
    sg = 0j
    # chunks share their end nodes and each spans an even number of intervals
    start = 0
    while start < n:
        stop = min(n, start + _CHUNK)
        t = np.arange(start, stop + 1) * h
        sf += _csimpson(f_r(E.Mm, E.Qq, t, params), h)
        sg += _csimpson(g_r(E.Mm, E.Qq, t, params, pump, chart), h)
        start = stop
    p = params.p
    return p * sf / T_avg, p * sg / T_avg


@dataclass(frozen=True)
class AveragedField:
    """Averaged field of one configuration; ``fbar``/``gbar`` exclude the factor p."""

    params: PhysicalParams
    Ae: complex
    regime: Regime
    T_avg: float | None = None

    @classmethod
    def of(cls, params: PhysicalParams, Ae: complex, T_avg: float | None = None) -> "AveragedField":
        return cls(params, complex(Ae), regime_of(params), T_avg)

    def fbar(self, Mm, Qq):
        if self.regime is Regime.RESONANCE:
            return fbar_resonant(Mm, Qq, self.params)
        return fbar_nonresonant(Mm, self.params)

    def gbar(self, Mm, Qq):
        if self.regime is Regime.RESONANCE:
            return gbar_resonant(Mm, Qq, self.params, self.Ae)
        unit = self.params.replace(p=1.0, gamma=self.params.gamma1)
        _, g = numeric_average(EnvelopeState(Mm, Qq), unit, Pumping(self.Ae), self.T_avg)
        return g


def averaged_rhs(E: EnvelopeState, params: PhysicalParams, Ae: complex,
                 T_avg: float | None = None) -> tuple[complex, complex]:
    """Averaged tangent ``p * (fbar, gbar)``; the Bloch part is numeric off resonance."""
    field = AveragedField.of(params, Ae, T_avg)
    p = params.p
    return p * complex(field.fbar(E.Mm, E.Qq)), p * complex(field.gbar(E.Mm, E.Qq))


def _mean_field(params: PhysicalParams, pump: Pumping, E: EnvelopeState) -> tuple[complex, complex]:
    if params.is_resonant:
        return (complex(fbar_resonant(E.Mm, E.Qq, params)),
                complex(gbar_resonant(E.Mm, E.Qq, params, pump.carrier)))
    unit = params.replace(p=1.0, gamma=params.gamma1)
    return numeric_average(E, unit, pump)


def order_function_sup(E: EnvelopeState, params: PhysicalParams, pump: Pumping,
                       T: float) -> float:
    """max over s in [0, T] of |int_0^s (v - vbar) dt| with v = (f_r, g_r)."""
    fm, gm = _mean_field(params, pump, E)
    n, h = _grid(params, pump, T)
    best = 0.0
    acc_f = 0j
    acc_g = 0j
    start = 0
    while start < n:
        stop = min(n, start + _CHUNK)
        t = np.arange(start, stop + 1) * h
        cf = acc_f + _ccumulative(f_r(E.Mm, E.Qq, t, params) - fm, h)
        cg = acc_g + _ccumulative(g_r(E.Mm, E.Qq, t, params, pump) - gm, h)
        best = max(best, float(np.max(np.sqrt(np.abs(cf) ** 2 + np.abs(cg) ** 2))))
        acc_f, acc_g = cf[-1], cg[-1]
        start = stop
    return best


def kbm_order(params: PhysicalParams, pump: Pumping, p: float,
              domain: list[EnvelopeState]) -> float:
    """Order function delta(p) = p * sup over domain and T <= 1/p of the running mean error.

    ``params`` fixes gamma1 = gamma / p; only the horizon 1/p depends on ``p``.
    The supremum over T is taken over every quadrature node.
    """
    if not domain:
        raise InvalidParams("domain must not be empty")
    if not p > 0:
        raise InvalidParams("p must be positive")
    pump.validate(params.Omega)
    return p * max(order_function_sup(E, params, pump, 1.0 / p) for E in domain)


def integrate_envelope(E0: EnvelopeState, cfg: SolverConfig, params: PhysicalParams,
                       pump: Pumping = ZERO_PUMP) -> EnvelopeTrajectory:
    ts = cfg.sample_times()
    ys = run_kernel(_kernels.envelope_rhs, _kernels.no_hook, E0.as_array(),
                    _kernels.pack(params, pump), ts, cfg, step_cap(params, pump))
    return EnvelopeTrajectory(ts, ys)


def integrate_averaged(E0: EnvelopeState, cfg: SolverConfig, params: PhysicalParams,
                       Ae: complex, T_avg: float | None = None) -> AveragedTrajectory:
    """Averaged flow, integrated in slow time tau = p t and sampled in physical time.

    Off resonance the Bloch part is averaged numerically at every evaluation,
    which is slow; ``T_avg`` trades accuracy for speed there.
    """
    p = params.p
    if not p > 0:
        raise InvalidParams("the averaged flow needs p > 0")
    ts = cfg.sample_times()
    taus = p * ts
    Ae = complex(Ae)
    if params.is_resonant:
        args = np.array([params.gamma1, params.kappa1, params.b1, Ae.real, Ae.imag])
        slow_cfg = cfg.replace(t_end=taus[-1], dt=cfg.dt * p)
        ys = run_kernel(_kernels.averaged_rhs_slow, _kernels.no_hook, E0.as_array(), args,
                        taus, slow_cfg, math.inf)
        return AveragedTrajectory(ts, ys, p)

    field = AveragedField.of(params, Ae, T_avg)

    def rhs(_, y):
        Mm, Qq = complex(y[0], y[1]), complex(y[2], y[3])
        f = complex(field.fbar(Mm, Qq))
        g = complex(field.gbar(Mm, Qq))
        return [f.real, f.imag, g.real, g.imag]

    sol = solve_ivp(rhs, (0.0, taus[-1]), E0.as_array(), t_eval=taus, rtol=cfg.rel_tol,
                    atol=cfg.abs_tol, method="RK45")
    return AveragedTrajectory(ts, sol.y.T, p)
