"""Command-line entry point ``maxwell-bloch``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import experiments as ex
from .averaging import integrate_averaged, integrate_envelope
from .config import RunConfig, load_config
from .errors import MaxwellBlochError
from .full_dynamics import integrate_full, random_pure_state
from .harmonic import harmonic_states_for, numeric_spectrum, stability_of
from .model import Chart, EnvelopeState, PureState, ReducedState
from .reduction import integrate_reduced, project_state
from .solver import SolverConfig


def _pair(z: complex) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def _solver(cfg: RunConfig, t_end: float = 100.0, sample_dt: float = 0.1) -> SolverConfig:
    opts = {"t_end": t_end, "sample_dt": sample_dt, **cfg.solver}
    return SolverConfig(**opts)


def _seed(args, cfg: RunConfig) -> int:
    if args.seed is not None:
        return args.seed
    return int(cfg.experiment.get("seed", 0))


def _pure_initial(cfg: RunConfig, seed: int) -> PureState:
    ini = cfg.initial
    if "C1" in ini or "C2" in ini:
        return PureState(ini.get("A", 0.0), ini.get("B", 0.0), ini.get("C1", 0j), ini.get("C2", 0j))
    X = random_pure_state(np.random.default_rng(seed))
    return PureState(ini.get("A", X.A), ini.get("B", X.B), X.C1, X.C2)


def _p_list(args, cfg: RunConfig, default) -> list[float]:
    if args.p_list:
        return [float(s) for s in args.p_list.split(",")]
    return list(cfg.experiment.get("p_list", default))


def _emit(args, name: str, summary, traj=None) -> None:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.csv and traj is not None:
        traj.to_csv(out / f"{name}.csv")
    text = json.dumps(summary, indent=2)
    if args.json:
        (out / f"{name}.json").write_text(text + "\n")
    print(text)


def _harmonic_records(cfg: RunConfig) -> list[dict]:
    records = []
    for H in harmonic_states_for(cfg.params, cfg.pump):
        rep = stability_of(H, cfg.params)
        records.append({
            "branch": H.branch.value, "Mr": _pair(H.Mr), "Qr": _pair(H.Qr),
            "inversion": H.inversion, "alpha": H.alpha,
            "eigenvalues": [_pair(lam) for lam in rep.eigenvalues],
            "classification": rep.classification.value, "nu": rep.nu,
        })
    return records


def cmd_simulate_full(args, cfg):
    seed = _seed(args, cfg)
    X0 = _pure_initial(cfg, seed)
    traj = integrate_full(X0, _solver(cfg), cfg.params, cfg.pump)
    summary = {"experiment": "simulate-full", "params": cfg.params.as_dict(), "seed": seed,
               "samples": len(traj), "charge_drift": traj.charge_drift(),
               "energy_drift": traj.energy_drift()}
    _emit(args, "full", summary, traj)


def _reduced_initial(cfg, seed) -> ReducedState:
    ini = cfg.initial
    if "Q" in ini:
        return ReducedState(ini.get("M", 0j), ini["Q"], Chart.NORTH)
    return project_state(_pure_initial(cfg, seed), cfg.params)


def cmd_simulate_reduced(args, cfg):
    seed = _seed(args, cfg)
    traj = integrate_reduced(_reduced_initial(cfg, seed), _solver(cfg), cfg.params, cfg.pump)
    summary = {"experiment": "simulate-reduced", "params": cfg.params.as_dict(), "seed": seed,
               "samples": len(traj), "chart_switches": traj.n_switches}
    _emit(args, "reduced", summary, traj)


def _envelope_initial(cfg) -> EnvelopeState:
    return EnvelopeState(cfg.initial.get("M", 0j), cfg.initial.get("Q", 0.5 + 0j))


def cmd_simulate_envelope(args, cfg):
    traj = integrate_envelope(_envelope_initial(cfg), _solver(cfg), cfg.params, cfg.pump)
    summary = {"experiment": "simulate-envelope", "params": cfg.params.as_dict(), "samples": len(traj)}
    _emit(args, "envelope", summary, traj)


def cmd_simulate_averaged(args, cfg):
    traj = integrate_averaged(_envelope_initial(cfg), _solver(cfg), cfg.params, cfg.pump.carrier)
    summary = {"experiment": "simulate-averaged", "params": cfg.params.as_dict(), "samples": len(traj),
               "final": {"M": _pair(traj.Mm[-1]), "Q": _pair(traj.Qq[-1])}}
    _emit(args, "averaged", summary, traj)


def cmd_harmonic_states(args, cfg):
    records = _harmonic_records(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    text = json.dumps(records, indent=2)
    if args.json:
        (out / "harmonic_states.json").write_text(text + "\n")
    print(text)


def cmd_stability(args, cfg):
    rows = []
    for H in harmonic_states_for(cfg.params, cfg.pump):
        closed = stability_of(H, cfg.params)
        dense = numeric_spectrum(H, cfg.params)
        gap = max(min(abs(a - b) for b in dense.eigenvalues) for a in closed.eigenvalues)
        rows.append({"branch": H.branch.value, "classification": closed.classification.value,
                     "eigenvalues": [_pair(z) for z in closed.eigenvalues],
                     "physical_rates": [_pair(z) for z in closed.scaled(cfg.params.p)],
                     "max_gap_to_dense": gap})
    summary = {"experiment": "stability", "params": cfg.params.as_dict(), "states": rows,
               "pass": all(r["max_gap_to_dense"] <= 1e-8 for r in rows)}
    _emit(args, "stability", summary)


def _r_ae(cfg):
    return cfg.params.r, cfg.pump.carrier


def cmd_verify_adiabatic(args, cfg):
    r, Ae = _r_ae(cfg)
    branch = args.branch or cfg.experiment.get("branch", "NonZeroInvPlus")
    res = ex.run_adiabatic(r, Ae, branch, _p_list(args, cfg, ex.DEFAULT_P_LIST), c=cfg.params.c,
                           omega=cfg.params.omega)
    _emit(args, "adiabatic", res.summary())


def cmd_verify_uniform(args, cfg):
    r, Ae = _r_ae(cfg)
    mult = args.horizon_multiple or float(cfg.experiment.get("horizon_multiple", 10.0))
    res = ex.run_uniform(r, Ae, _p_list(args, cfg, ex.DEFAULT_P_LIST), horizon_multiple=mult,
                         c=cfg.params.c, omega=cfg.params.omega)
    _emit(args, "uniform", res.summary())


def cmd_verify_attraction(args, cfg):
    r, Ae = _r_ae(cfg)
    p = _p_list(args, cfg, [cfg.params.p])[0]
    d0 = cfg.experiment.get("d0", [1e-2])
    d0 = [d0] if np.isscalar(d0) else list(d0)
    rep = ex.run_attraction(r, Ae, p, d0, c=cfg.params.c, omega=cfg.params.omega)
    _emit(args, "attraction", rep.summary())


def cmd_verify_averaging(args, cfg):
    r, Ae = _r_ae(cfg)
    res = ex.run_averaging_error(r, Ae, _envelope_initial(cfg), _p_list(args, cfg, ex.DEFAULT_P_LIST),
                                 c=cfg.params.c, omega=cfg.params.omega)
    basin = ex.basin_probe(r, Ae, c=cfg.params.c)
    res.extra["basin"] = [{"Q0": _pair(b.Q0), "converged": b.converged, "distance": b.distance}
                          for b in basin]
    res.extra["basin_converged"] = sum(b.converged for b in basin)
    _emit(args, "averaging", res.summary())


def cmd_verify_nonresonance(args, cfg):
    P = cfg.params
    rep = ex.run_nonresonance(omega=P.omega, Omega=P.Omega, r=P.r, p=P.p, gamma=P.gamma, pump=cfg.pump)
    _emit(args, "nonresonance", rep.summary())


def cmd_kbm_order(args, cfg):
    p = _p_list(args, cfg, [1e-2])[0]
    seed = _seed(args, cfg)
    rep = ex.run_kbm(cfg.params, cfg.pump, p=p, seed=seed)
    _emit(args, "kbm_order", rep.summary())


COMMANDS = {
    "simulate-full": cmd_simulate_full,
    "simulate-reduced": cmd_simulate_reduced,
    "simulate-envelope": cmd_simulate_envelope,
    "simulate-averaged": cmd_simulate_averaged,
    "harmonic-states": cmd_harmonic_states,
    "stability": cmd_stability,
    "verify-adiabatic": cmd_verify_adiabatic,
    "verify-uniform": cmd_verify_uniform,
    "verify-attraction": cmd_verify_attraction,
    "verify-averaging": cmd_verify_averaging,
    "verify-nonresonance": cmd_verify_nonresonance,
    "kbm-order": cmd_kbm_order,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="maxwell-bloch",
                                     description="Simulate and analyse the damped driven Maxwell-Bloch system.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="flat key = value configuration file")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--csv", action="store_true", help="write trajectory CSV")
        sp.add_argument("--json", action="store_true", help="write the summary JSON file")
        sp.add_argument("--p-list", help="comma-separated coupling values")
        sp.add_argument("--horizon-multiple", type=float, help="horizon in units of 1/p")
        sp.add_argument("--seed", type=int, help="seed for random initial states")
        if name == "verify-adiabatic":
            sp.add_argument("--branch", help="harmonic branch name, e.g. ZeroInvPlus")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
        COMMANDS[args.command](args, cfg)
    except MaxwellBlochError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
