"""Hopf projection, stereographic charts and the reduced flow on R^2 x S^2."""

from __future__ import annotations

import math

import numpy as np

from . import _kernels
from .errors import AtNorthPole, AtSouthPole, ChartConversionFailure, NotNormalized
from .model import (ZERO_PUMP, BlochPoint, Chart, PhysicalParams, PureState, Pumping,
                    ReducedState, maxwell_amplitude)
from .solver import ReducedTrajectory, SolverConfig, run_kernel, step_cap

POLE_TOL = 1e-12
CHARGE_TOL = 1e-9


def hopf_project(C1: complex, C2: complex) -> BlochPoint:
    C1, C2 = complex(C1), complex(C2)
    charge = abs(C1) ** 2 + abs(C2) ** 2
    if abs(charge - 1.0) > CHARGE_TOL:
        raise NotNormalized(f"|C1|^2 + |C2|^2 = {charge!r}")
    s = math.sqrt(charge)
    C1, C2 = C1 / s, C2 / s
    Z = C1.conjugate() * C2
    return BlochPoint(Z.real, Z.imag, 0.5 * (abs(C2) ** 2 - abs(C1) ** 2))


def north_coord(Zp: BlochPoint) -> complex:
    den = 0.5 - Zp.Z3
    if den < POLE_TOL:
        raise AtNorthPole("the North Pole has no North-chart coordinate")
    return Zp.Z / den


def south_coord(Zp: BlochPoint) -> complex:
    den = 0.5 + Zp.Z3
    if den < POLE_TOL:
        raise AtSouthPole("the South Pole has no South-chart coordinate")
    return Zp.Z / den


def _bloch(coord: complex, sign: int) -> BlochPoint:
    coord = complex(coord)
    s = abs(coord) ** 2 + 1.0
    Z = coord / s
    Z3 = sign * (0.5 - 1.0 / s)
    # renormalize away rounding so the sphere invariant holds at 1e-12
    n = math.sqrt(Z.real ** 2 + Z.imag ** 2 + Z3 ** 2)
    if n > 0:
        Z, Z3 = Z * (0.5 / n), Z3 * (0.5 / n)
    return BlochPoint(Z.real, Z.imag, Z3)


def bloch_from_north(Q: complex) -> BlochPoint:
    return _bloch(Q, 1)


def bloch_from_south(Sigma: complex) -> BlochPoint:
    return _bloch(Sigma, -1)


def switch_coord(coord: complex, chart: Chart) -> complex:
    """Express ``coord`` given in ``chart`` in the other chart: Q = 1 / conj(Sigma)."""
    coord = complex(coord)
    if coord == 0:
        pole = "South" if Chart(chart) is Chart.NORTH else "North"
        raise ChartConversionFailure(f"the {pole} Pole has no coordinate in the other chart")
    return 1.0 / coord.conjugate()


def inversion_of(Q: complex) -> float:
    s = abs(complex(Q)) ** 2
    return (s - 1.0) / (s + 1.0)


def project_state(X: PureState, params: PhysicalParams, chart: Chart | None = None) -> ReducedState:
    """Reduction map; the North chart is used on the lower hemisphere, the South chart above."""
    M = maxwell_amplitude(X.A, X.B, params.Omega)
    Zp = hopf_project(X.C1, X.C2)
    if chart is None:
        chart = Chart.NORTH if Zp.Z3 <= 0 else Chart.SOUTH
    chart = Chart(chart)
    coord = north_coord(Zp) if chart is Chart.NORTH else south_coord(Zp)
    return ReducedState(M, coord, chart)


def lift_state(Y: ReducedState, params: PhysicalParams) -> PureState:
    """Section of the fibration with C1 real and non-negative."""
    Zp = Y.bloch
    n1 = max(0.5 - Zp.Z3, 0.0)
    n2 = max(0.5 + Zp.Z3, 0.0)
    C1 = math.sqrt(n1)
    Z = Zp.Z
    if C1 > 0 and abs(Z) > 0:
        C2 = math.sqrt(n2) * Z / abs(Z)
    else:
        C2 = complex(math.sqrt(n2), 0.0)
    M = Y.M
    return PureState(M.real, params.Omega * M.imag, complex(C1, 0.0), C2)


def _pack_reduced(Y: ReducedState) -> np.ndarray:
    return np.array([Y.M.real, Y.M.imag, Y.coord.real, Y.coord.imag, float(Y.chart.sign)])


def reduced_rhs(Y: ReducedState, t: float, params: PhysicalParams,
                pump: Pumping = ZERO_PUMP) -> tuple[complex, complex]:
    """Tangent ``(dM, dcoord)`` in the active chart of ``Y``."""
    out = np.empty(5)
    _kernels.reduced_rhs(float(t), _pack_reduced(Y), _kernels.pack(params, pump), out)
    return complex(out[0], out[1]), complex(out[2], out[3])


def integrate_reduced(Y0: ReducedState, cfg: SolverConfig, params: PhysicalParams,
                      pump: Pumping = ZERO_PUMP, t0: float = 0.0) -> ReducedTrajectory:
    """Reduced flow with automatic chart switching once the coordinate leaves the disk of radius 2."""
    y0 = _pack_reduced(Y0)
    _kernels.chart_hook(y0)
    ts = t0 + cfg.sample_times()
    ys = run_kernel(_kernels.reduced_rhs, _kernels.chart_hook, y0, _kernels.pack(params, pump),
                    ts, cfg, step_cap(params, pump))
    return ReducedTrajectory(ts, ys)
