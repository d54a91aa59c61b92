"""Full Maxwell-Bloch flow on R^2 x S^3 with conservation and Lyapunov monitors."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import EpsOutOfRange
from .model import ZERO_PUMP, PhysicalParams, PureState, Pumping, pumping_eval
from .solver import FullTrajectory, SolverConfig, run_kernel, step_cap


def mbe_rhs(X: PureState, t: float, params: PhysicalParams, pump: Pumping = ZERO_PUMP):
    """Tangent ``(dA, dB, dC1, dC2)`` of the full system at ``(X, t)``."""
    out = np.empty(6)
    _kernels.mbe_rhs(float(t), X.as_array(), _kernels.pack(params, pump), out)
    return out[0], out[1], complex(out[2], out[3]), complex(out[4], out[5])


def default_eps(params: PhysicalParams) -> float:
    return min(params.gamma / 4.0, params.Omega / 2.0)


def lyapunov_value(A, B, params: PhysicalParams, eps: float | None = None):
    """V = (Omega^2 A^2 + B^2) / 2 + eps A B; vectorized over ``A`` and ``B``."""
    if eps is None:
        eps = default_eps(params)
    if eps >= params.Omega:
        raise EpsOutOfRange(f"eps={eps} must stay below Omega={params.Omega}")
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    V = 0.5 * (params.Omega ** 2 * A ** 2 + B ** 2) + eps * A * B
    return float(V) if V.ndim == 0 else V


def energy_series(ys: np.ndarray, ts: np.ndarray, params: PhysicalParams, pump: Pumping) -> np.ndarray:
    A, B = ys[:, 0], ys[:, 1]
    C1 = ys[:, 2] + 1j * ys[:, 3]
    C2 = ys[:, 4] + 1j * ys[:, 5]
    c, hb = params.c, params.hbar
    field = (B ** 2 + params.Omega ** 2 * A ** 2) / (2 * c * c)
    levels = hb * params.omega1 * np.abs(C1) ** 2 + hb * params.omega2 * np.abs(C2) ** 2
    dipole = (2 * params.kappa / c) * (A + pumping_eval(pump, params, ts)) * np.imag(np.conj(C1) * C2)
    return field + levels - dipole


def integrate_full(X0: PureState, cfg: SolverConfig, params: PhysicalParams,
                   pump: Pumping = ZERO_PUMP, eps: float | None = None) -> FullTrajectory:
    """Sampled solution on ``[0, cfg.t_end]``; charge is monitored, never renormalized."""
    args = _kernels.pack(params, pump)
    ts = cfg.sample_times()
    ys = run_kernel(_kernels.mbe_rhs, _kernels.no_hook, X0.as_array(), args, ts, cfg,
                    step_cap(params, pump))
    energy = energy_series(ys, ts, params, pump)
    lyap = lyapunov_value(ys[:, 0], ys[:, 1], params, eps)
    return FullTrajectory(ts, ys, energy, np.atleast_1d(lyap), params.Omega)


@dataclass(frozen=True)
class AprioriReport:
    """Boundedness summary of a damped trajectory.

    ``D`` is the observed ratio sup(A^2 + B^2) / (A(0)^2 + B(0)^2 + r^2).
    """

    sup_V: float
    V0: float
    ratio: float
    sup_field: float
    D: float
    bounded: bool


def apriori_bound_check(traj: FullTrajectory, params: PhysicalParams,
                        eps: float | None = None) -> AprioriReport:
    V = lyapunov_value(traj.A, traj.B, params, eps)
    V = np.atleast_1d(V)
    field = traj.A ** 2 + traj.B ** 2
    sup_V = float(np.max(V))
    V0 = float(V[0])
    r = params.r
    scale = field[0] + (r * r if math.isfinite(r) else 0.0)
    sup_field = float(np.max(field))
    D = sup_field / scale if scale > 0 else (0.0 if sup_field == 0 else math.inf)
    ratio = sup_V / V0 if V0 > 0 else (0.0 if sup_V == 0 else math.inf)
    bounded = bool(np.all(np.isfinite(V)) and math.isfinite(D))
    return AprioriReport(sup_V, V0, ratio, sup_field, D, bounded)


def random_pure_state(rng: np.random.Generator, field_scale: float = 1.0) -> PureState:
    """Maxwell pair ~ N(0, field_scale^2) and a uniformly random point of S^3."""
    A, B = rng.normal(scale=field_scale, size=2)
    c = rng.normal(size=4)
    c /= np.linalg.norm(c)
    return PureState(A, B, complex(c[0], c[1]), complex(c[2], c[3]))


def fit_apriori_constant(params: PhysicalParams, pump: Pumping = ZERO_PUMP, n_states: int = 20,
                         seed: int = 0, horizon_gamma: float = 10.0,
                         cfg: SolverConfig | None = None) -> tuple[float, list[AprioriReport]]:
    """Largest observed ``D`` over random initial states on ``[0, horizon_gamma / gamma]``."""
    rng = np.random.default_rng(seed)
    t_end = horizon_gamma / params.gamma
    if cfg is None:
        cfg = SolverConfig(t_end=t_end, sample_dt=0.1, rel_tol=1e-8, abs_tol=1e-10)
    else:
        cfg = cfg.replace(t_end=t_end)
    reports = []
    for _ in range(n_states):
        X0 = random_pure_state(rng)
        reports.append(apriori_bound_check(integrate_full(X0, cfg, params, pump), params))
    return max(rep.D for rep in reports), reports
