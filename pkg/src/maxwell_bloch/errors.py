"""Exception types raised across the package."""

from __future__ import annotations


class MaxwellBlochError(Exception):
    """Base class for all errors raised by :mod:`maxwell_bloch`."""


class InvalidParams(MaxwellBlochError, ValueError):
    pass


class NotNormalized(MaxwellBlochError, ValueError):
    """Level amplitudes violate |C1|^2 + |C2|^2 = 1 beyond tolerance."""


class AtNorthPole(MaxwellBlochError, ValueError):
    pass


class AtSouthPole(MaxwellBlochError, ValueError):
    pass


class ChartConversionFailure(MaxwellBlochError, ValueError):
    pass


class EpsOutOfRange(MaxwellBlochError, ValueError):
    pass


class StepSizeUnderflow(MaxwellBlochError, RuntimeError):
    """Adaptive step fell below ``1e-14 * t_end``."""


class BranchMismatch(MaxwellBlochError, ValueError):
    pass


class BranchUnavailable(MaxwellBlochError, ValueError):
    pass
