"""Stationary states of the resonant averaged system and their linear spectra.

All eigenvalues are those of the averaged field without the factor p; the
physical rates are ``p`` times these.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .averaging import fbar_resonant, gbar_resonant
from .errors import BranchMismatch, BranchUnavailable, InvalidParams
from .model import PhysicalParams, Pumping
from .reduction import inversion_of

DEGENERACY_RTOL = 1e-12


class Branch(enum.Enum):
    ZERO_INV_PLUS = "ZeroInvPlus"
    ZERO_INV_MINUS = "ZeroInvMinus"
    DEGENERATE = "Degenerate"
    NONZERO_INV_PLUS = "NonZeroInvPlus"
    NONZERO_INV_MINUS = "NonZeroInvMinus"
    TRIVIAL = "Trivial"

    @property
    def zero_inversion(self) -> bool:
        return self in (Branch.ZERO_INV_PLUS, Branch.ZERO_INV_MINUS)

    @property
    def nonzero_inversion(self) -> bool:
        return self in (Branch.NONZERO_INV_PLUS, Branch.NONZERO_INV_MINUS)


class Classification(enum.Enum):
    LINEARLY_STABLE = "LinearlyStable"
    UNSTABLE = "Unstable"
    NOT_LINEARLY_STABLE = "NotLinearlyStable"


@dataclass(frozen=True)
class HarmonicState:
    """Stationary point (Mr, Qr) of the averaged system for given (r, Ae, c)."""

    Mr: complex
    Qr: complex
    branch: Branch
    r: float
    Ae: complex
    c: float = 1.0
    alpha: float | None = None

    @property
    def inversion(self) -> float:
        return inversion_of(self.Qr)


@dataclass(frozen=True)
class StabilityReport:
    """Spectrum of the unscaled linearization and its classification.

    ``nu`` is minus the spectral abscissa for stable states and ``None`` otherwise.
    """

    eigenvalues: tuple
    classification: Classification
    nu: float | None

    def scaled(self, p: float) -> tuple:
        """Eigenvalues of the physical, p-scaled linearization."""
        return tuple(p * lam for lam in self.eigenvalues)


def harmonic_states(r: float, Ae: complex, c: float = 1.0) -> list[HarmonicState]:
    """All stationary states of the resonant averaged system, in a fixed order."""
    if not r > 0 or not c > 0:
        raise InvalidParams("r and c must be positive")
    Ae = complex(Ae)
    a = abs(Ae)
    cr = c * r
    if a == 0:
        return [HarmonicState(0j, 0j, Branch.TRIVIAL, r, Ae, c)]
    if abs(cr - a) <= DEGENERACY_RTOL * max(cr, a):
        u = Ae / a
        return [HarmonicState(-Ae, -u, Branch.DEGENERATE, r, Ae, c)]
    if cr < a:
        phi = cmath.phase(Ae)
        theta = math.acos(-cr / a)
        out = []
        for branch, ang in ((Branch.ZERO_INV_PLUS, phi + theta), (Branch.ZERO_INV_MINUS, phi - theta)):
            Q = cmath.exp(1j * ang)
            out.append(HarmonicState(cr * Q, Q, branch, r, Ae, c))
        return out
    root = math.sqrt((cr - a) * (cr + a))
    # Q+ = (-cr + root) Ae / |Ae|^2, written without the cancellation
    q_minus = (-cr - root) * Ae / (a * a)
    q_plus = Ae / (-cr - root)
    out = []
    for branch, Q in ((Branch.NONZERO_INV_PLUS, q_plus), (Branch.NONZERO_INV_MINUS, q_minus)):
        alpha = 2.0 * cr / (abs(Q) ** 2 + 1.0)
        out.append(HarmonicState(alpha * Q, Q, branch, r, Ae, c, alpha))
    return out


def harmonic_states_for(params: PhysicalParams, pump: Pumping) -> list[HarmonicState]:
    """States with nonzero Maxwell field for a configuration.

    Off resonance the averaged Maxwell equation forces M = 0, so none exist.
    """
    if not params.is_resonant:
        return []
    return [H for H in harmonic_states(params.r, pump.carrier, params.c) if H.branch is not Branch.TRIVIAL]


def get_branch(r: float, Ae: complex, branch: Branch, c: float = 1.0) -> HarmonicState:
    branch = Branch(branch)
    for H in harmonic_states(r, Ae, c):
        if H.branch is branch:
            return H
    raise BranchUnavailable(f"branch {branch.value} does not exist for c r = {c * r}, |Ae| = {abs(Ae)}")


def _unit_params(r: float, c: float) -> PhysicalParams:
    return PhysicalParams.resonant(r, 1.0, c=c)


def jacobian_averaged(Mm: complex, Qq: complex, params: PhysicalParams, Ae: complex,
                      at_harmonic: bool = False) -> np.ndarray:
    """Jacobian of (fbar, gbar) in the real coordinates (M1, M2, Q1, Q2).

    With ``at_harmonic`` the Bloch block uses M = alpha Q, valid only at a
    stationary state; otherwise plain chain-rule derivatives are returned.
    """
    g1, k1, b1 = params.gamma1, params.kappa1, params.b1
    Q = np.array([Qq.real, Qq.imag])
    M = np.array([Mm.real, Mm.imag])
    A = np.array([complex(Ae).real, complex(Ae).imag])
    q2 = Q @ Q
    eye = np.eye(2)
    QQ = np.outer(Q, Q)
    J = np.zeros((4, 4))
    J[:2, :2] = -0.5 * g1 * eye
    J[:2, 2:] = 0.5 * k1 * (eye / (q2 + 1.0) - 2.0 * QQ / (q2 + 1.0) ** 2)
    J[2:, :2] = 0.5 * b1 * (q2 - 1.0) * eye - b1 * QQ
    if at_harmonic:
        J[2:, 2:] = -b1 * (eye * (M @ Q + A @ Q) + np.outer(Q, A) - np.outer(A, Q))
    else:
        N = M + A
        J[2:, 2:] = b1 * (np.outer(N, Q) - eye * (N @ Q) - np.outer(Q, N))
    return J


def _classify(eigs) -> tuple[Classification, float | None]:
    abscissa = max(lam.real for lam in eigs)
    if abscissa < 0:
        return Classification.LINEARLY_STABLE, -abscissa
    if abscissa > 0:
        return Classification.UNSTABLE, None
    return Classification.NOT_LINEARLY_STABLE, None


def eigenvalues_harmonic(H: HarmonicState, params: PhysicalParams | None = None) -> StabilityReport:
    """Closed-form spectrum at a harmonic state.

    Zero inversion: {-gamma1/2, -gamma1/2, +-i b1 w} with w = Im[conj(Ae) Q].
    Nonzero inversion (and the degenerate state, where I(Q) = 0 is not reached
    but the same block structure holds): roots of multiplicity two,
    (-gamma1 +- sqrt(gamma1^2 + 4 b1 kappa1 I)) / 4.
    """
    if H.branch is Branch.TRIVIAL:
        raise BranchMismatch("no closed form at the trivial state; use numeric_spectrum")
    if params is None:
        params = _unit_params(H.r, H.c)
    g1, k1, b1 = params.gamma1, params.kappa1, params.b1
    if H.branch.zero_inversion:
        w = (H.Ae.conjugate() * H.Qr).imag
        eigs = (complex(-0.5 * g1), complex(-0.5 * g1), complex(0, b1 * w), complex(0, -b1 * w))
        return StabilityReport(eigs, Classification.NOT_LINEARLY_STABLE, None)
    if H.branch.nonzero_inversion:
        disc = cmath.sqrt(g1 * g1 + 4.0 * b1 * k1 * H.inversion)
        lp = 0.25 * (-g1 + disc)
        lm = 0.25 * (-g1 - disc)
        eigs = (lp, lp, lm, lm)
        cls, nu = _classify(eigs)
        return StabilityReport(eigs, cls, nu)
    # degenerate: fall back to the dense spectrum
    return numeric_spectrum(H, params)


def numeric_spectrum(H: HarmonicState, params: PhysicalParams | None = None) -> StabilityReport:
    if params is None:
        params = _unit_params(H.r, H.c)
    J = jacobian_averaged(H.Mr, H.Qr, params, H.Ae, at_harmonic=True)
    eigs = tuple(complex(v) for v in sorted(np.linalg.eigvals(J), key=lambda z: (-z.real, z.imag)))
    cls, nu = _classify(eigs)
    if H.branch.zero_inversion:
        cls, nu = Classification.NOT_LINEARLY_STABLE, None
    return StabilityReport(eigs, cls, nu)


def stability_of(H: HarmonicState, params: PhysicalParams | None = None) -> StabilityReport:
    """Closed form where available, dense eigensolver otherwise."""
    try:
        return eigenvalues_harmonic(H, params)
    except BranchMismatch:
        return numeric_spectrum(H, params)


def verify_stationary(H: HarmonicState, params: PhysicalParams | None = None,
                      Ae: complex | None = None) -> float:
    """Norm of the averaged field (without the factor p) at ``H``."""
    if params is None:
        params = _unit_params(H.r, H.c)
    Ae = H.Ae if Ae is None else complex(Ae)
    f = fbar_resonant(H.Mr, H.Qr, params)
    g = gbar_resonant(H.Mr, H.Qr, params, Ae)
    return math.sqrt(abs(f) ** 2 + abs(g) ** 2)
