"""Numerical laboratory for the damped driven Maxwell-Bloch equations.

Full dynamics on R^2 x S^3, the reduced flow on the Bloch sphere, envelope
and averaged systems, harmonic states with their spectra, and sweeps that
measure how true trajectories approach the harmonic orbits as p -> 0.
"""

from .averaging import (AveragedField, Regime, averaged_rhs, envelope_rhs, integrate_averaged,
                        integrate_envelope, kbm_order, numeric_average)
from .errors import (AtNorthPole, AtSouthPole, BranchMismatch, BranchUnavailable,
                     ChartConversionFailure, EpsOutOfRange, InvalidParams, MaxwellBlochError,
                     NotNormalized, StepSizeUnderflow)
from .full_dynamics import (apriori_bound_check, fit_apriori_constant, integrate_full,
                            lyapunov_value, mbe_rhs)
from .harmonic import (Branch, Classification, HarmonicState, StabilityReport,
                       eigenvalues_harmonic, get_branch, harmonic_states, harmonic_states_for,
                       jacobian_averaged, numeric_spectrum, stability_of, verify_stationary)
from .model import (BlochPoint, Chart, EnvelopeState, PhysicalParams, PureState, Pumping,
                    ReducedState, carrier_coefficient, gauge_action, hamiltonian,
                    maxwell_amplitude, pumping_eval)
from .reduction import (bloch_from_north, bloch_from_south, hopf_project, integrate_reduced,
                        inversion_of, lift_state, north_coord, project_state, reduced_rhs,
                        south_coord)
from .solver import Method, SolverConfig

__version__ = "0.1.0"
