"""Scaling-law sweeps comparing true trajectories with harmonic orbits and averaged flows.

Every sweep returns plain dataclasses that serialize to JSON; randomized
inputs take an explicit seed that is echoed in the result.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .averaging import integrate_averaged, integrate_envelope, kbm_order
from .errors import ChartConversionFailure, InvalidParams
from .full_dynamics import (fit_apriori_constant, integrate_full, random_pure_state)
from .harmonic import Branch, get_branch, harmonic_states_for, stability_of
from .model import (ZERO_PUMP, Chart, EnvelopeState, PhysicalParams, PureState, Pumping,
                    ReducedState)
from .reduction import integrate_reduced, project_state
from .solver import ReducedTrajectory, SolverConfig

DEFAULT_P_LIST = (3e-3, 1e-3, 3e-4)
BASELINE_P_LIST = (1e-2, 1e-3, 1e-4)


class HorizonRule(enum.Enum):
    INV_SQRT_P = "InvSqrtP"
    INV_P = "InvP"
    MULTIPLE_INV_P = "MultipleInvP"


def default_config() -> SolverConfig:
    """Tolerances used by the sweeps; ``t_end`` is replaced per run."""
    return SolverConfig(t_end=1.0, sample_dt=0.05, rel_tol=1e-10, abs_tol=1e-12)


def fit_slope(p_values, errors) -> tuple[float, float]:
    """OLS slope of log(error) against log(p) and the RMS residual of the fit."""
    p = np.asarray(p_values, dtype=float)
    e = np.asarray(errors, dtype=float)
    if p.size < 3:
        raise InvalidParams("slope fitting needs at least 3 p values")
    if np.any(p <= 0) or np.any(e <= 0):
        raise InvalidParams("p values and errors must be positive")
    x, y = np.log(p), np.log(e)
    coef = np.polyfit(x, y, 1)
    resid = y - np.polyval(coef, x)
    return float(coef[0]), float(np.sqrt(np.mean(resid ** 2)))


def _json_value(v):
    if isinstance(v, enum.Enum):
        return v.value
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    if isinstance(v, dict):
        return {k: _json_value(x) for k, x in v.items()}
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.bool_):
        return bool(v)
    return v


@dataclass
class SweepResult:
    experiment: str
    params: dict
    p_values: list
    errors: list
    slope: float
    slope_ci: float
    horizon_rule: HorizonRule
    passed: bool
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.p_values) != len(self.errors):
            raise ValueError("p_values and errors differ in length")
        if any(a <= b for a, b in zip(self.p_values, self.p_values[1:])):
            raise ValueError("p_values must be strictly decreasing")

    @property
    def strictly_decreasing(self) -> bool:
        return all(a > b for a, b in zip(self.errors, self.errors[1:]))

    def summary(self) -> dict:
        return _json_value({
            "experiment": self.experiment, "params": self.params, "p_values": self.p_values,
            "errors": self.errors, "slope": self.slope, "slope_ci": self.slope_ci,
            "horizon_rule": self.horizon_rule, "pass": self.passed, **self.extra,
        })


def _fields(obj) -> dict:
    return {k: v for k, v in asdict(obj).items() if k != "passed"}


def _map(fn, items, workers: int | None):
    items = list(items)
    if workers is None:
        workers = min(len(items), os.cpu_count() or 1)
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _sorted_p(p_list) -> list[float]:
    return sorted((float(p) for p in p_list), reverse=True)


def error_metric(traj: ReducedTrajectory, Mr: complex, Qr: complex, Omega: float) -> float:
    """max over samples of |M(t) - e^{-i Omega t} Mr| + |Q(t) - e^{-i Omega t} Qr|."""
    try:
        Q = traj.north_Q()
    except ChartConversionFailure as exc:
        raise ChartConversionFailure("a sample sits at the North Pole") from exc
    rot = np.exp(-1j * Omega * traj.times)
    err = np.abs(traj.M - rot * Mr) + np.abs(Q - rot * Qr)
    return float(np.max(err))


def _resonant(r: float, p: float, c: float, omega: float) -> PhysicalParams:
    return PhysicalParams.resonant(r, p, omega=omega, c=c)


def _harmonic_sweep(name: str, rule: HorizonRule, r: float, Ae: complex, branch: Branch,
                    p_list, horizon_multiple: float, cfg: SolverConfig | None,
                    c: float, omega: float, workers: int | None):
    H = get_branch(r, Ae, branch, c)
    cfg = cfg or default_config()
    ps = _sorted_p(p_list)
    Y0 = ReducedState(H.Mr, H.Qr, Chart.NORTH)

    def one(p):
        params = _resonant(r, p, c, omega)
        traj = integrate_reduced(Y0, cfg.replace(t_end=horizon_multiple / p), params, Pumping(Ae))
        return error_metric(traj, H.Mr, H.Qr, params.Omega)

    errors = _map(one, ps, workers)
    slope, resid = fit_slope(ps, errors)
    info = {"r": r, "Ae": complex(Ae), "c": c, "omega": omega, "branch": H.branch,
            "horizon_multiple": horizon_multiple}
    return H, ps, errors, slope, resid, info


def run_adiabatic(r: float, Ae: complex, branch: Branch | str, p_list=DEFAULT_P_LIST,
                  cfg: SolverConfig | None = None, c: float = 1.0, omega: float = 1.0,
                  workers: int | None = None) -> SweepResult:
    """Sup distance to the rotating harmonic orbit on [0, 1/p], started on the orbit."""
    _, ps, errors, slope, resid, info = _harmonic_sweep(
        "adiabatic", HorizonRule.INV_P, r, Ae, Branch(branch), p_list, 1.0, cfg, c, omega, workers)
    res = SweepResult("adiabatic", info, ps, errors, slope, resid, HorizonRule.INV_P, False)
    res.passed = bool(res.strictly_decreasing and slope >= 0.4)
    return res


def run_uniform(r: float, Ae: complex, p_list=DEFAULT_P_LIST, cfg: SolverConfig | None = None,
                horizon_multiple: float = 10.0, c: float = 1.0, omega: float = 1.0,
                workers: int | None = None) -> SweepResult:
    """Same metric on the stable nonzero-inversion state over [0, horizon_multiple / p]."""
    _, ps, errors, slope, resid, info = _harmonic_sweep(
        "uniform", HorizonRule.MULTIPLE_INV_P, r, Ae, Branch.NONZERO_INV_PLUS, p_list,
        horizon_multiple, cfg, c, omega, workers)
    res = SweepResult("uniform", info, ps, errors, slope, resid, HorizonRule.MULTIPLE_INV_P, False)
    res.passed = bool(0.8 <= slope <= 1.2)
    return res


def run_baseline(p_list=BASELINE_P_LIST, r: float = 1.0, Ae: complex = 1.0, seed: int = 0,
                 X0: PureState | None = None, cfg: SolverConfig | None = None,
                 c: float = 1.0, omega: float = 1.0, workers: int | None = None) -> SweepResult:
    """Drift of M from its free rotation over [0, p^{-1/2}] from an arbitrary state."""
    cfg = cfg or default_config()
    ps = _sorted_p(p_list)
    if X0 is None:
        X0 = random_pure_state(np.random.default_rng(seed))

    def one(p):
        params = _resonant(r, p, c, omega)
        Y0 = project_state(X0, params)
        traj = integrate_reduced(Y0, cfg.replace(t_end=p ** -0.5), params, Pumping(Ae))
        rot = np.exp(-1j * params.Omega * traj.times)
        return float(np.max(np.abs(traj.M - rot * Y0.M)))

    errors = _map(one, ps, workers)
    slope, resid = fit_slope(ps, errors)
    info = {"r": r, "Ae": complex(Ae), "c": c, "omega": omega, "seed": seed}
    res = SweepResult("baseline", info, ps, errors, slope, resid, HorizonRule.INV_SQRT_P, False)
    res.passed = bool(res.strictly_decreasing and slope >= 0.4)
    return res


@dataclass
class AttractionReport:
    p: float
    d0_values: list
    rates: list
    expected_rate: float
    ratios: list
    passed: bool
    params: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return _json_value({"experiment": "attraction", **_fields(self), "pass": self.passed})


def _decay_rate(times: np.ndarray, dist: np.ndarray, window: float) -> float:
    """Exponential rate from the maxima of ``dist`` over consecutive windows."""
    edges = np.arange(times[0], times[-1] + 0.5 * window, window)
    tc, logs = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        sel = (times >= a) & (times < b)
        if np.count_nonzero(sel) < 2:
            continue
        k = np.argmax(dist[sel])
        tc.append(times[sel][k])
        logs.append(math.log(dist[sel][k]))
    if len(tc) < 2:
        raise InvalidParams("horizon too short for a decay fit")
    return -float(np.polyfit(tc, logs, 1)[0])


def run_attraction(r: float, Ae: complex, p: float, d0_list=(1e-2,), cfg: SolverConfig | None = None,
                   n_windows: int = 5, c: float = 1.0, omega: float = 1.0,
                   workers: int | None = None) -> AttractionReport:
    """Decay rate of perturbations of the stable harmonic orbit.

    The perturbed run is compared against the unperturbed one, which cancels
    the common O(p) oscillation; the distance is then sampled by its maxima
    over windows of one slow rotation period.
    """
    H = get_branch(r, Ae, Branch.NONZERO_INV_PLUS, c)
    rep = stability_of(H)
    nu = rep.nu
    lam = rep.eigenvalues[0]
    slow = abs(lam.imag)
    window = 2.0 * math.pi / (p * slow) if slow > 0 else 1.0 / (p * nu)
    cfg = (cfg or default_config()).replace(t_end=n_windows * window, sample_dt=0.5)
    params = _resonant(r, p, c, omega)
    pump = Pumping(Ae)

    def run(d0):
        Y0 = ReducedState(H.Mr, H.Qr + d0, Chart.NORTH)
        return integrate_reduced(Y0, cfg, params, pump)

    trajs = _map(run, [0.0] + list(d0_list), workers)
    ref = trajs[0]
    Qref = ref.north_Q()
    rates = []
    for tr in trajs[1:]:
        dist = np.abs(tr.M - ref.M) + np.abs(tr.north_Q() - Qref)
        rates.append(_decay_rate(tr.times, dist, window))
    expected = p * nu
    ratios = [mu / expected for mu in rates]
    passed = all(0.7 <= x <= 1.3 for x in ratios)
    info = {"r": r, "Ae": complex(Ae), "c": c, "omega": omega, "eigenvalue": lam,
            "window": window, "horizon": cfg.t_end}
    return AttractionReport(p, list(d0_list), rates, expected, ratios, passed, info)


def run_averaging_error(r: float, Ae: complex, Y0: EnvelopeState, p_list=DEFAULT_P_LIST,
                        cfg: SolverConfig | None = None, c: float = 1.0, omega: float = 1.0,
                        workers: int | None = None) -> SweepResult:
    """Sup gap between the envelope flow and the averaged flow on [0, 1/p]."""
    cfg = cfg or default_config()
    ps = _sorted_p(p_list)
    pump = Pumping(Ae)

    def one(p):
        params = _resonant(r, p, c, omega)
        run_cfg = cfg.replace(t_end=1.0 / p)
        env = integrate_envelope(Y0, run_cfg, params, pump)
        avg = integrate_averaged(Y0, run_cfg, params, Ae)
        return float(np.max(np.abs(env.Mm - avg.Mm) + np.abs(env.Qq - avg.Qq)))

    errors = _map(one, ps, workers)
    slope, resid = fit_slope(ps, errors)
    info = {"r": r, "Ae": complex(Ae), "c": c, "omega": omega, "Y0": [Y0.Mm, Y0.Qq]}
    res = SweepResult("averaging", info, ps, errors, slope, resid, HorizonRule.INV_P, False)
    res.passed = bool(slope >= 0.4)
    return res


@dataclass
class BasinPoint:
    Q0: complex
    converged: bool
    distance: float


def basin_grid(center: complex, radius: float = 0.5) -> list[complex]:
    """Nine deterministic points of the closed disk around ``center``."""
    pts = [center]
    for k in range(4):
        pts.append(center + 0.5 * radius * np.exp(1j * (math.pi / 4 + k * math.pi / 2)))
    for k in range(4):
        pts.append(center + radius * np.exp(1j * k * math.pi / 2))
    return [complex(z) for z in pts]


def basin_probe(r: float, Ae: complex, c: float = 1.0, radius: float = 0.5, tau_end: float = 200.0,
                tol: float = 1e-6) -> list[BasinPoint]:
    """Which grid points flow to the stable state under the averaged system (M starts at Mr)."""
    H = get_branch(r, Ae, Branch.NONZERO_INV_PLUS, c)
    params = _resonant(r, 1.0, c, 1.0)
    cfg = SolverConfig(t_end=tau_end, sample_dt=tau_end, rel_tol=1e-10, abs_tol=1e-12)
    out = []
    for Q0 in basin_grid(H.Qr, radius):
        traj = integrate_averaged(EnvelopeState(H.Mr, Q0), cfg, params, Ae)
        dist = abs(traj.Mm[-1] - H.Mr) + abs(traj.Qq[-1] - H.Qr)
        ok = bool(np.isfinite(dist) and dist < tol)
        out.append(BasinPoint(Q0, ok, float(dist)))
    return out


@dataclass
class NonresonanceReport:
    misfit: float
    measured: float
    predicted: float
    fitted_rate: float
    predicted_rate: float
    nontrivial_states: int
    passed: bool
    params: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return _json_value({"experiment": "nonresonance", **_fields(self), "pass": self.passed})


def run_nonresonance(omega: float = 1.0, Omega: float = 1.5, r: float = 1.0, p: float = 1e-3,
                     M0: complex = 1.0, gamma: float | None = None, pump: Pumping = ZERO_PUMP,
                     cfg: SolverConfig | None = None) -> NonresonanceReport:
    """Full-system decay of |M| against |M(0)| e^{-gamma t / 2} at t = 2 / gamma.

    ``gamma`` overrides p / r when given. The level system starts in the
    ground state.
    """
    if abs(Omega - omega) < 0.1 * omega:
        raise InvalidParams("non-resonance needs |Omega - omega| >= 0.1 omega")
    g = p / r if gamma is None else gamma
    params = PhysicalParams(Omega=Omega, omega1=0.0, omega2=omega, gamma=g, p=p)
    t_end = 2.0 / g
    cfg = (cfg or default_config()).replace(t_end=t_end, sample_dt=0.1, rel_tol=1e-9, abs_tol=1e-12)
    M0 = complex(M0)
    X0 = PureState(M0.real, Omega * M0.imag, 1.0, 0.0)
    traj = integrate_full(X0, cfg, params, pump)
    absM = np.abs(traj.M)
    period = 2.0 * math.pi / Omega
    tail = traj.times >= t_end - period
    measured = float(np.mean(absM[tail]))
    predicted = abs(M0) * math.exp(-0.5 * g * t_end)
    misfit = abs(measured / predicted - 1.0)
    fitted = -float(np.polyfit(traj.times, np.log(absM), 1)[0])
    n_states = len(harmonic_states_for(params, pump))
    info = {"omega": omega, "Omega": Omega, "r": r, "p": p, "gamma": g, "M0": M0}
    return NonresonanceReport(misfit, measured, predicted, fitted, 0.5 * g, n_states,
                              bool(misfit <= 0.2 and n_states == 0), info)


@dataclass
class KbmReport:
    p_values: list
    deltas: list
    ratio: float
    passed: bool
    params: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return _json_value({"experiment": "kbm-order", **_fields(self), "pass": self.passed})


def default_domain(seed: int = 0, n: int = 4, q_max: float = 1.5) -> list[EnvelopeState]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        M = complex(*rng.uniform(-1, 1, size=2))
        Q = q_max * math.sqrt(rng.uniform()) * np.exp(1j * rng.uniform(0, 2 * math.pi))
        out.append(EnvelopeState(M, complex(Q)))
    return out


def run_kbm(params: PhysicalParams, pump: Pumping, p: float = 1e-2, domain=None,
            seed: int = 0) -> KbmReport:
    """delta(p) and delta(p / 10); an O(p) order function gives a ratio near 0.1."""
    domain = default_domain(seed) if domain is None else domain
    ps = [p, p / 10.0]
    deltas = [kbm_order(params, pump, q, domain) for q in ps]
    ratio = deltas[1] / deltas[0]
    info = {**params.as_dict(), "carrier": pump.carrier, "harmonics": [list(h) for h in pump.harmonics],
            "seed": seed}
    return KbmReport(ps, deltas, ratio, bool(0.05 <= ratio <= 0.2), info)


@dataclass
class AprioriSweep:
    r_values: list
    D_values: list
    sup_fields: list
    bounded: bool
    seed: int

    def summary(self) -> dict:
        return _json_value({"experiment": "apriori", **_fields(self), "pass": self.bounded})


def run_apriori(r_values=(0.5, 1.0, 2.0), p: float = 1e-2, n_states: int = 20, seed: int = 0,
                pump: Pumping = Pumping(1.0)) -> AprioriSweep:
    """Fitted constant D of the field bound for random initial states over 10 / gamma."""
    Ds, sups, ok = [], [], True
    for r in r_values:
        params = _resonant(r, p, 1.0, 1.0)
        D, reports = fit_apriori_constant(params, pump, n_states=n_states, seed=seed)
        Ds.append(D)
        sups.append(max(rep.sup_field for rep in reports))
        ok = ok and all(rep.bounded for rep in reports)
    return AprioriSweep(list(r_values), Ds, sups, bool(ok), seed)
