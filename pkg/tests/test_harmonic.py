import cmath
import math

import numpy as np
import pytest

from maxwell_bloch.averaging import fbar_resonant, gbar_resonant
from maxwell_bloch.errors import BranchMismatch, BranchUnavailable, InvalidParams
from maxwell_bloch.harmonic import (Branch, Classification, eigenvalues_harmonic, get_branch,
                                    harmonic_states, harmonic_states_for, jacobian_averaged,
                                    numeric_spectrum, stability_of, verify_stationary)
from maxwell_bloch.model import PhysicalParams, Pumping

SQ3 = math.sqrt(3)


def test_zero_inversion_example():
    states = harmonic_states(1.0, 2.0)
    assert [H.branch for H in states] == [Branch.ZERO_INV_PLUS, Branch.ZERO_INV_MINUS]
    for H, sign in zip(states, (1, -1)):
        assert H.Qr == pytest.approx(cmath.exp(sign * 2j * math.pi / 3), abs=1e-15)
        assert H.Mr == pytest.approx(H.Qr, abs=1e-15)
        assert abs(H.Qr) == pytest.approx(1, abs=1e-12)
        assert H.inversion == pytest.approx(0, abs=1e-12)
        assert (2.0 * H.Qr).real == pytest.approx(-1.0)


def test_degenerate_example():
    (H,) = harmonic_states(1.0, 1.0)
    assert H.branch is Branch.DEGENERATE
    assert H.Qr == -1 and H.Mr == -1


def test_nonzero_inversion_example():
    plus, minus = harmonic_states(2.0, 1.0)
    assert plus.Qr == pytest.approx(-2 + SQ3, abs=1e-15)
    assert plus.Mr == pytest.approx(-1, abs=1e-15)
    assert minus.Qr == pytest.approx(-2 - SQ3, abs=1e-14)
    assert minus.Mr == pytest.approx(-1, abs=1e-14)
    assert abs(plus.Qr) * abs(minus.Qr) == pytest.approx(1, abs=1e-14)
    assert plus.alpha == pytest.approx(2 + SQ3)
    assert abs(plus.Qr) < 1 < abs(minus.Qr)
    assert plus.inversion == pytest.approx(-SQ3 / 2, abs=1e-15)


def test_trivial_state_without_pump():
    (H,) = harmonic_states(1.0, 0)
    assert H.branch is Branch.TRIVIAL and H.Mr == 0 and H.Qr == 0


def test_invalid_inputs():
    with pytest.raises(InvalidParams):
        harmonic_states(0, 1)
    with pytest.raises(BranchUnavailable):
        get_branch(1.0, 2.0, Branch.NONZERO_INV_PLUS)


def test_existence_dichotomy_and_stationarity_on_grid():
    for r in np.linspace(0.3, 3.0, 10):
        for a in np.linspace(0.2, 3.1, 10):
            states = harmonic_states(r, a)
            expected = 1 if abs(r - a) <= 1e-12 * max(r, a) else 2
            assert len(states) == expected
            for H in states:
                assert verify_stationary(H) <= 1e-12


def test_rotation_covariance():
    rng = np.random.default_rng(0)
    for _ in range(50):
        r, a, phi = rng.uniform(0.3, 3), rng.uniform(0.2, 3), rng.uniform(0, 2 * math.pi)
        u = cmath.exp(1j * phi)
        for H0, H1 in zip(harmonic_states(r, a), harmonic_states(r, u * a)):
            assert H1.Qr == pytest.approx(u * H0.Qr, abs=1e-12)
            assert H1.Mr == pytest.approx(u * H0.Mr, abs=1e-12)


def test_p_scaled_spectrum_is_linear_in_p():
    H = get_branch(2.0, 1.0, Branch.NONZERO_INV_PLUS)
    rep = eigenvalues_harmonic(H)
    assert rep.scaled(1e-3) == pytest.approx(tuple(1e-3 * z for z in rep.eigenvalues))
    for p in (1e-2, 1e-4):
        again = eigenvalues_harmonic(H, PhysicalParams.resonant(2.0, p))
        assert again.eigenvalues == pytest.approx(rep.eigenvalues)


def _fd_jacobian(M, Q, params, Ae, h=1e-6):
    def F(v):
        Mm, Qq = complex(v[0], v[1]), complex(v[2], v[3])
        f, g = fbar_resonant(Mm, Qq, params), gbar_resonant(Mm, Qq, params, Ae)
        return np.array([f.real, f.imag, g.real, g.imag])

    v0 = np.array([M.real, M.imag, Q.real, Q.imag])
    J = np.empty((4, 4))
    for j in range(4):
        e = np.zeros(4)
        e[j] = h
        J[:, j] = (F(v0 + e) - F(v0 - e)) / (2 * h)
    return J


def test_jacobian_matches_finite_differences():
    rng = np.random.default_rng(1)
    P = PhysicalParams.resonant(1.3, 1.0)
    for _ in range(100):
        M = complex(*rng.normal(size=2))
        Q = complex(*rng.normal(size=2))
        Ae = complex(*rng.normal(size=2))
        assert np.max(np.abs(jacobian_averaged(M, Q, P, Ae) - _fd_jacobian(M, Q, P, Ae))) < 1e-6


def test_harmonic_form_agrees_with_raw_jacobian_at_states():
    P = PhysicalParams.resonant(2.0, 1.0)
    for H in harmonic_states(2.0, 0.7 + 0.5j):
        raw = jacobian_averaged(H.Mr, H.Qr, P, H.Ae)
        sub = jacobian_averaged(H.Mr, H.Qr, P, H.Ae, at_harmonic=True)
        assert np.max(np.abs(raw - sub)) < 1e-13


def test_zero_inversion_jacobian_structure():
    # rotate so that Q = 1: the Maxwell-to-Bloch coupling reduces to -b1 e2 e2^T
    H = harmonic_states(1.0, 2.0)[0]
    u = H.Qr.conjugate()
    P = PhysicalParams.resonant(1.0, 1.0)
    J = jacobian_averaged(u * H.Mr, 1.0 + 0j, P, u * H.Ae, at_harmonic=True)
    assert J[2:, :2] == pytest.approx(np.array([[-1.0, 0.0], [0.0, 0.0]]) * P.b1 * 1.0, abs=1e-12)
    assert J[2, 2] == pytest.approx(0, abs=1e-12) and J[3, 3] == pytest.approx(0, abs=1e-12)


def test_nonzero_inversion_jacobian_lower_right_block_vanishes():
    P = PhysicalParams.resonant(2.0, 1.0)
    for H in harmonic_states(2.0, 1.0):
        u = abs(H.Qr) / H.Qr
        J = jacobian_averaged(u * H.Mr, u * H.Qr, P, u * H.Ae, at_harmonic=True)
        assert np.max(np.abs(J[2:, 2:])) < 1e-14


def test_zero_inversion_spectrum_example():
    rep = eigenvalues_harmonic(harmonic_states(1.0, 2.0)[0])
    assert sorted(rep.eigenvalues, key=lambda z: (z.real, z.imag)) == pytest.approx(
        [-0.5, -0.5, -1j * SQ3, 1j * SQ3])
    assert rep.classification is Classification.NOT_LINEARLY_STABLE and rep.nu is None


def test_nonzero_inversion_spectra():
    plus, minus = harmonic_states(2.0, 1.0)
    rp = eigenvalues_harmonic(plus)
    assert rp.classification is Classification.LINEARLY_STABLE
    assert all(z.real == pytest.approx(-0.125) for z in rp.eigenvalues)
    assert rp.nu == pytest.approx(0.125)
    rm = eigenvalues_harmonic(minus)
    assert rm.classification is Classification.UNSTABLE
    assert max(z.real for z in rm.eigenvalues) == pytest.approx((-0.5 + math.sqrt(0.25 + 4 * SQ3)) / 4)


def test_closed_form_matches_dense_spectrum():
    rng = np.random.default_rng(2)
    for _ in range(100):
        r, a, phi = rng.uniform(0.3, 3), rng.uniform(0.2, 3), rng.uniform(0, 2 * math.pi)
        for H in harmonic_states(r, a * cmath.exp(1j * phi)):
            closed = eigenvalues_harmonic(H).eigenvalues
            dense = numeric_spectrum(H).eigenvalues
            for z in closed:
                assert min(abs(z - w) for w in dense) < 1e-8


def test_trivial_state_spectrum_is_numeric():
    (H,) = harmonic_states(1.0, 0)
    with pytest.raises(BranchMismatch):
        eigenvalues_harmonic(H)
    rep = stability_of(H)
    assert rep.classification is Classification.LINEARLY_STABLE


def test_nonresonant_configuration_has_no_states():
    P = PhysicalParams(Omega=1.5, omega1=0, omega2=1, gamma=1e-3, p=1e-3)
    assert harmonic_states_for(P, Pumping(1.0)) == []
    assert len(harmonic_states_for(PhysicalParams.resonant(2, 1e-3), Pumping(1.0))) == 2
