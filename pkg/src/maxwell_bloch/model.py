"""Parameters, pumping signal and the state types shared by every module.

All types are frozen dataclasses. Complex amplitudes are stored as Python
``complex``; array-valued helpers accept numpy arrays where noted.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidParams, NotNormalized

#: relative tolerance under which Omega and omega count as equal
RESONANCE_RTOL = 1e-12
#: PureState renormalizes silently below this charge deviation, rejects above
CHARGE_RENORM_TOL = 1e-6
BLOCH_TOL = 1e-12


@dataclass(frozen=True)
class PhysicalParams:
    """Model constants of the damped driven Maxwell-Bloch system.

    ``p`` and ``gamma`` may be zero (free or undamped flows); the derived
    ratios then become ``inf`` where they divide by zero.
    """

    Omega: float = 1.0
    omega1: float = 0.0
    omega2: float = 1.0
    gamma: float = 1e-3
    p: float = 1e-3
    c: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("Omega", "c", "hbar"):
            if not getattr(self, name) > 0:
                raise InvalidParams(f"{name} must be positive, got {getattr(self, name)}")
        if not self.omega2 > self.omega1:
            raise InvalidParams("omega2 must exceed omega1")
        if self.gamma < 0 or self.p < 0:
            raise InvalidParams("gamma and p must be non-negative")

    @classmethod
    def resonant(cls, r: float, p: float, omega: float = 1.0, c: float = 1.0,
                 hbar: float = 1.0) -> "PhysicalParams":
        """Resonant configuration Omega = omega with gamma = p / r."""
        if r <= 0:
            raise InvalidParams("r must be positive")
        return cls(Omega=omega, omega1=0.0, omega2=omega, gamma=p / r, p=p, c=c, hbar=hbar)

    def replace(self, **changes) -> "PhysicalParams":
        return replace(self, **changes)

    @property
    def omega(self) -> float:
        return self.omega2 - self.omega1

    @property
    def kappa(self) -> float:
        return self.p * self.omega

    @property
    def b(self) -> float:
        return self.kappa / (self.c * self.hbar)

    @property
    def r(self) -> float:
        return self.p / self.gamma if self.gamma > 0 else math.inf

    @property
    def gamma1(self) -> float:
        return self.gamma / self.p if self.p > 0 else math.inf

    @property
    def kappa1(self) -> float:
        return 2.0 * self.c * self.omega / self.Omega

    @property
    def b1(self) -> float:
        return self.omega / (self.c * self.hbar)

    @property
    def kappa_tilde(self) -> float:
        """Coupling 2 c kappa / Omega of the complex Maxwell equation."""
        return 2.0 * self.c * self.kappa / self.Omega

    @property
    def is_resonant(self) -> bool:
        return abs(self.Omega - self.omega) <= RESONANCE_RTOL * max(self.Omega, self.omega)

    def as_dict(self) -> dict:
        return {"Omega": self.Omega, "omega1": self.omega1, "omega2": self.omega2,
                "gamma": self.gamma, "p": self.p, "c": self.c, "hbar": self.hbar}


@dataclass(frozen=True)
class Pumping:
    """Quasiperiodic field Re[carrier e^{-i Omega t} + sum_k a_k e^{-i Omega_k t}].

    The carrier frequency is ``PhysicalParams.Omega``; it is kept apart from
    the off-carrier ``harmonics`` so the carrier coefficient is read exactly.
    """

    carrier: complex = 0j
    harmonics: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "carrier", complex(self.carrier))
        object.__setattr__(
            self, "harmonics",
            tuple((complex(a), float(f)) for a, f in self.harmonics),
        )

    def validate(self, Omega: float, gap: float = 1e-9) -> None:
        # a harmonic at -Omega is a carrier term too: Re[a e^{i Omega t}] = Re[conj(a) e^{-i Omega t}]
        for a, freq in self.harmonics:
            if abs(abs(freq) - Omega) < gap * Omega:
                raise InvalidParams(
                    f"harmonic frequency {freq} coincides with the carrier {Omega} (|gap| < {gap} relative)"
                )

    @property
    def frequencies(self) -> list[float]:
        return [f for _, f in self.harmonics]

    def packed(self) -> np.ndarray:
        out = [self.carrier.real, self.carrier.imag, float(len(self.harmonics))]
        for a, f in self.harmonics:
            out.extend((a.real, a.imag, f))
        return np.array(out, dtype=np.float64)


ZERO_PUMP = Pumping()


@dataclass(frozen=True)
class PureState:
    """Point (A, B, C1, C2) of R^2 x S^3."""

    A: float
    B: float
    C1: complex
    C2: complex

    def __post_init__(self):
        C1, C2 = complex(self.C1), complex(self.C2)
        charge = abs(C1) ** 2 + abs(C2) ** 2
        if abs(charge - 1.0) > CHARGE_RENORM_TOL:
            raise NotNormalized(f"|C1|^2 + |C2|^2 = {charge!r}")
        s = math.sqrt(charge)
        object.__setattr__(self, "A", float(self.A))
        object.__setattr__(self, "B", float(self.B))
        object.__setattr__(self, "C1", C1 / s)
        object.__setattr__(self, "C2", C2 / s)

    @classmethod
    def from_array(cls, y) -> "PureState":
        return cls(y[0], y[1], complex(y[2], y[3]), complex(y[4], y[5]))

    def as_array(self) -> np.ndarray:
        return np.array([self.A, self.B, self.C1.real, self.C1.imag, self.C2.real, self.C2.imag])

    @property
    def charge(self) -> float:
        return abs(self.C1) ** 2 + abs(self.C2) ** 2


@dataclass(frozen=True)
class BlochPoint:
    """Point of the model sphere |Z| = 1/2 in R^3."""

    Z1: float
    Z2: float
    Z3: float

    def __post_init__(self):
        norm2 = self.Z1 ** 2 + self.Z2 ** 2 + self.Z3 ** 2
        if abs(norm2 - 0.25) > BLOCH_TOL:
            raise InvalidParams(f"Bloch point off the sphere: |Z|^2 = {norm2!r}")

    @property
    def Z(self) -> complex:
        return complex(self.Z1, self.Z2)

    @property
    def inversion(self) -> float:
        return 2.0 * self.Z3


class Chart(enum.Enum):
    NORTH = "N"  # projection from the North Pole, coordinate Q
    SOUTH = "S"  # projection from the South Pole, coordinate Sigma

    @property
    def sign(self) -> int:
        return 1 if self is Chart.NORTH else -1

    @classmethod
    def from_sign(cls, s: float) -> "Chart":
        return cls.NORTH if s > 0 else cls.SOUTH

    @property
    def other(self) -> "Chart":
        return Chart.SOUTH if self is Chart.NORTH else Chart.NORTH


@dataclass(frozen=True)
class ReducedState:
    """Maxwell amplitude M and a Bloch-sphere point in an active chart."""

    M: complex
    coord: complex
    chart: Chart = Chart.NORTH

    def __post_init__(self):
        object.__setattr__(self, "M", complex(self.M))
        object.__setattr__(self, "coord", complex(self.coord))
        object.__setattr__(self, "chart", Chart(self.chart))

    def in_chart(self, chart: Chart) -> "ReducedState":
        """Same point expressed in ``chart`` (Q = 1 / conj(Sigma))."""
        from .reduction import switch_coord

        if chart is self.chart:
            return self
        return ReducedState(self.M, switch_coord(self.coord, self.chart), chart)

    @property
    def Q(self) -> complex:
        return self.in_chart(Chart.NORTH).coord

    @property
    def bloch(self) -> BlochPoint:
        from .reduction import bloch_from_north, bloch_from_south

        if self.chart is Chart.NORTH:
            return bloch_from_north(self.coord)
        return bloch_from_south(self.coord)

    @property
    def inversion(self) -> float:
        s = abs(self.coord) ** 2
        return self.chart.sign * (s - 1.0) / (s + 1.0)


@dataclass(frozen=True)
class EnvelopeState:
    """Slowly varying amplitudes of M = e^{-i Omega t} Mm, Q = e^{-i omega t} Qq."""

    Mm: complex
    Qq: complex

    def __post_init__(self):
        object.__setattr__(self, "Mm", complex(self.Mm))
        object.__setattr__(self, "Qq", complex(self.Qq))
        if not (np.isfinite(self.Mm) and np.isfinite(self.Qq)):
            raise InvalidParams("envelope amplitudes must be finite")

    def rotated(self, phi: float) -> "EnvelopeState":
        u = complex(math.cos(phi), math.sin(phi))
        return EnvelopeState(u * self.Mm, u * self.Qq)

    def as_array(self) -> np.ndarray:
        return np.array([self.Mm.real, self.Mm.imag, self.Qq.real, self.Qq.imag])


def pumping_eval(pump: Pumping, params: PhysicalParams, t):
    """Real pumping field A^e(t); ``t`` may be a scalar or an array."""
    t = np.asarray(t, dtype=float)
    z = pump.carrier * np.exp(-1j * params.Omega * t)
    for a, freq in pump.harmonics:
        z = z + a * np.exp(-1j * freq * t)
    out = np.real(z)
    return float(out) if out.ndim == 0 else out


def carrier_coefficient(pump: Pumping) -> complex:
    return pump.carrier


def gauge_action(theta: float, X: PureState) -> PureState:
    u = complex(math.cos(theta), math.sin(theta))
    return PureState(X.A, X.B, u * X.C1, u * X.C2)


def maxwell_amplitude(A, B, Omega: float):
    """Complex Maxwell amplitude M = A + i B / Omega."""
    if Omega <= 0:
        raise InvalidParams("Omega must be positive")
    return A + 1j * (B / Omega)


def hamiltonian(X: PureState, t: float, params: PhysicalParams, pump: Pumping = ZERO_PUMP) -> float:
    c, hb = params.c, params.hbar
    field_energy = (X.B ** 2 + params.Omega ** 2 * X.A ** 2) / (2 * c * c)
    levels = hb * params.omega1 * abs(X.C1) ** 2 + hb * params.omega2 * abs(X.C2) ** 2
    dipole = (2 * params.kappa / c) * (X.A + pumping_eval(pump, params, t)) * (X.C1.conjugate() * X.C2).imag
    return field_energy + levels - dipole
