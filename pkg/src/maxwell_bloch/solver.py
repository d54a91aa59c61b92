"""Solver configuration, the kernel driver and the trajectory containers."""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import InvalidParams, StepSizeUnderflow
from .model import Chart, EnvelopeState, PhysicalParams, PureState, Pumping, ReducedState

#: smallest adaptive step relative to the horizon before giving up
UNDERFLOW_FRACTION = 1e-14


class Method(enum.Enum):
    RK4_FIXED = "RK4Fixed"
    RK45_ADAPTIVE = "RK45Adaptive"


@dataclass(frozen=True)
class SolverConfig:
    """Integration horizon, output sampling and stepping policy."""

    t_end: float
    sample_dt: float
    method: Method = Method.RK45_ADAPTIVE
    dt: float = 1e-2
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        if not self.t_end > 0:
            raise InvalidParams("t_end must be positive")
        if not self.sample_dt > 0:
            raise InvalidParams("sample_dt must be positive")
        if not self.dt > 0:
            raise InvalidParams("dt must be positive")
        if not 0 < self.rel_tol < 1:
            raise InvalidParams("rel_tol must lie in (0, 1)")
        if not self.abs_tol > 0:
            raise InvalidParams("abs_tol must be positive")

    def replace(self, **changes) -> "SolverConfig":
        return replace(self, **changes)

    def sample_times(self) -> np.ndarray:
        n = max(1, int(math.ceil(self.t_end / self.sample_dt - 1e-9)))
        ts = np.arange(n + 1) * self.sample_dt
        ts[-1] = self.t_end
        return ts


def step_cap(params: PhysicalParams, pump: Pumping) -> float:
    """Largest admissible step: 50 steps per period of the fastest frequency."""
    fastest = max([params.Omega, params.omega] + [abs(f) for f in pump.frequencies])
    return 2.0 * math.pi / (50.0 * fastest)


def run_kernel(rhs, hook, y0: np.ndarray, args: np.ndarray, ts: np.ndarray,
               cfg: SolverConfig, h_max: float) -> np.ndarray:
    """Dispatch to the compiled integrator chosen by ``cfg``."""
    y0 = np.ascontiguousarray(y0, dtype=np.float64)
    args = np.ascontiguousarray(args, dtype=np.float64)
    ts = np.ascontiguousarray(ts, dtype=np.float64)
    if cfg.method is Method.RK4_FIXED:
        ys, _ = _kernels.rk4(rhs, hook, y0, args, ts, min(cfg.dt, h_max))
        return ys
    span = ts[-1] - ts[0]
    ys, status, _, _ = _kernels.dopri5(rhs, hook, y0, args, ts, cfg.rel_tol, cfg.abs_tol,
                                       h_max, UNDERFLOW_FRACTION * span)
    if status == _kernels.STATUS_UNDERFLOW:
        raise StepSizeUnderflow(f"adaptive step fell below {UNDERFLOW_FRACTION:g} * t_end")
    return ys


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


class Trajectory:
    """Sampled solution: strictly increasing ``times`` and aligned state rows."""

    header: tuple = ()

    def __init__(self, times, data):
        self.times = np.asarray(times, dtype=float)
        self.data = np.asarray(data, dtype=float)
        if self.data.shape[0] != self.times.size:
            raise ValueError("times and states differ in length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("sample times must be strictly increasing")

    def __len__(self) -> int:
        return self.times.size

    def rows(self) -> np.ndarray:
        raise NotImplementedError

    def to_csv(self, path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.header)
            for row in self.rows():
                writer.writerow([_fmt(v) for v in row])
        return path


class FullTrajectory(Trajectory):
    header = ("t", "A", "B", "ReC1", "ImC1", "ReC2", "ImC2", "charge", "energy", "lyapunov")

    def __init__(self, times, data, energy, lyapunov, Omega: float):
        super().__init__(times, data)
        self.energy = np.asarray(energy, dtype=float)
        self.lyapunov = np.asarray(lyapunov, dtype=float)
        self.Omega = Omega

    @property
    def A(self):
        return self.data[:, 0]

    @property
    def B(self):
        return self.data[:, 1]

    @property
    def C1(self):
        return self.data[:, 2] + 1j * self.data[:, 3]

    @property
    def C2(self):
        return self.data[:, 4] + 1j * self.data[:, 5]

    @property
    def M(self):
        return self.A + 1j * self.B / self.Omega

    @property
    def charge(self):
        return np.sum(self.data[:, 2:6] ** 2, axis=1)

    @property
    def states(self) -> list[PureState]:
        return [PureState.from_array(row) for row in self.data]

    def charge_drift(self) -> float:
        return float(np.max(np.abs(self.charge - 1.0)))

    def energy_drift(self) -> float:
        return float(np.max(np.abs(self.energy - self.energy[0])))

    def rows(self):
        return np.column_stack([self.times, self.data, self.charge, self.energy, self.lyapunov])


class ReducedTrajectory(Trajectory):
    """Columns: Re M, Im M, Re coord, Im coord, chart sign (+1 North, -1 South)."""

    header = ("t", "ReM", "ImM", "chart", "ReCoord", "ImCoord", "Z1", "Z2", "Z3", "inversion")

    @property
    def M(self):
        return self.data[:, 0] + 1j * self.data[:, 1]

    @property
    def coord(self):
        return self.data[:, 2] + 1j * self.data[:, 3]

    @property
    def chart_sign(self):
        return self.data[:, 4]

    @property
    def charts(self) -> list[Chart]:
        return [Chart.from_sign(s) for s in self.chart_sign]

    @property
    def n_switches(self) -> int:
        return int(np.count_nonzero(np.diff(self.chart_sign)))

    def bloch(self) -> np.ndarray:
        """Bloch coordinates (Z1, Z2, Z3) per sample, independent of the chart."""
        z = self.coord
        s = np.abs(z) ** 2
        Z = z / (s + 1.0)
        # North: Z3 = 1/2 - 1/(s+1); South: Z3 = -(1/2 - 1/(s+1))
        Z3 = self.chart_sign * (0.5 - 1.0 / (s + 1.0))
        return np.column_stack([Z.real, Z.imag, Z3])

    @property
    def inversion(self):
        return 2.0 * self.bloch()[:, 2]

    def north_Q(self):
        """Q per sample; raises ChartConversionFailure at the North Pole."""
        from .reduction import switch_coord

        z = self.coord
        out = z.copy()
        south = self.chart_sign < 0
        for i in np.flatnonzero(south):
            out[i] = switch_coord(complex(z[i]), Chart.SOUTH)
        return out

    @property
    def states(self) -> list[ReducedState]:
        return [ReducedState(complex(r[0], r[1]), complex(r[2], r[3]), Chart.from_sign(r[4]))
                for r in self.data]

    def rows(self):
        Z = self.bloch()
        return np.column_stack([self.times, self.data[:, 0], self.data[:, 1], self.chart_sign,
                                self.data[:, 2], self.data[:, 3], Z, 2.0 * Z[:, 2]])

    def to_csv(self, path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.header)
            for row in self.rows():
                chart = Chart.from_sign(row[3]).value
                writer.writerow([_fmt(row[0]), _fmt(row[1]), _fmt(row[2]), chart]
                                + [_fmt(v) for v in row[4:]])
        return path


class EnvelopeTrajectory(Trajectory):
    """Interaction-picture amplitudes (Mm, Qq) sampled in physical time."""

    header = ("t", "ReM", "ImM", "ReQ", "ImQ", "inversion")

    @property
    def Mm(self):
        return self.data[:, 0] + 1j * self.data[:, 1]

    @property
    def Qq(self):
        return self.data[:, 2] + 1j * self.data[:, 3]

    @property
    def states(self) -> list[EnvelopeState]:
        return [EnvelopeState(complex(r[0], r[1]), complex(r[2], r[3])) for r in self.data]

    @property
    def inversion(self):
        s = np.abs(self.Qq) ** 2
        return (s - 1.0) / (s + 1.0)

    def rows(self):
        return np.column_stack([self.times, self.data[:, :4], self.inversion])


class AveragedTrajectory(EnvelopeTrajectory):
    """Averaged-system solution; ``times`` is physical time, ``tau = p t``."""

    header = ("tau", "t", "ReM", "ImM", "ReQ", "ImQ", "inversion")

    def __init__(self, times, data, p: float):
        super().__init__(times, data)
        self.p = p

    @property
    def tau(self):
        return self.p * self.times

    def rows(self):
        return np.column_stack([self.tau, self.times, self.data[:, :4], self.inversion])
