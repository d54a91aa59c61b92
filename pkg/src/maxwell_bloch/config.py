"""Flat ``key = value`` configuration files.

Values are Python literals (numbers, lists, strings). ``pump.harmonic`` may
repeat; every other key may appear once. Lines starting with ``#`` are
comments. Example::

    Omega = 1.0
    omega1 = 0.0
    omega2 = 1.0
    gamma = 5e-4
    p = 1e-3
    pump.carrier.re = 1.0
    pump.harmonic = [0.5, 0.0, 1.7]
"""

from __future__ import annotations

import ast
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InvalidParams
from .model import PhysicalParams, Pumping

PARAM_KEYS = ("Omega", "omega1", "omega2", "gamma", "p", "c", "hbar")
SOLVER_KEYS = ("t_end", "sample_dt", "method", "dt", "rel_tol", "abs_tol")
INITIAL_KEYS = ("initial.A", "initial.B", "initial.C1", "initial.C2", "initial.M", "initial.Q")
EXPERIMENT_KEYS = ("branch", "seed", "d0", "p_list", "horizon_multiple")
PUMP_KEYS = ("pump.carrier.re", "pump.carrier.im", "pump.harmonic")
KNOWN_KEYS = frozenset(PARAM_KEYS + SOLVER_KEYS + INITIAL_KEYS + EXPERIMENT_KEYS + PUMP_KEYS)


@dataclass
class RunConfig:
    params: PhysicalParams = field(default_factory=PhysicalParams)
    pump: Pumping = field(default_factory=Pumping)
    solver: dict = field(default_factory=dict)
    initial: dict = field(default_factory=dict)
    experiment: dict = field(default_factory=dict)


def _as_complex(value, key: str) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise InvalidParams(f"{key} expects [re, im]")
        return complex(float(value[0]), float(value[1]))
    return complex(value)


def parse_text(text: str) -> RunConfig:
    raw: dict = {}
    harmonics = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParams(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise InvalidParams(f"line {lineno}: unknown key {key!r}")
        try:
            value = ast.literal_eval(value)
        except (ValueError, SyntaxError):
            value = value.strip("'\"")
        if key == "pump.harmonic":
            if not (isinstance(value, (list, tuple)) and len(value) == 3):
                raise InvalidParams(f"line {lineno}: pump.harmonic expects [re, im, freq]")
            harmonics.append((complex(float(value[0]), float(value[1])), float(value[2])))
            continue
        if key in raw:
            raise InvalidParams(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value

    params = PhysicalParams(**{k: float(raw[k]) for k in PARAM_KEYS if k in raw})
    pump = Pumping(complex(float(raw.get("pump.carrier.re", 0.0)), float(raw.get("pump.carrier.im", 0.0))),
                   tuple(harmonics))
    pump.validate(params.Omega)
    solver = {k: raw[k] for k in SOLVER_KEYS if k in raw}
    initial = {}
    for k in INITIAL_KEYS:
        if k in raw:
            name = k.split(".", 1)[1]
            initial[name] = float(raw[k]) if name in ("A", "B") else _as_complex(raw[k], k)
    experiment = {k: raw[k] for k in EXPERIMENT_KEYS if k in raw}
    return RunConfig(params, pump, solver, initial, experiment)


def load_config(path) -> RunConfig:
    return parse_text(Path(path).read_text())
