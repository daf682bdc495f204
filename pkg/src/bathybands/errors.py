"""Exception types shared across the package."""

from __future__ import annotations


class BathybandsError(Exception):
    """Base class for all package-specific errors."""


class DomainDegeneracyError(BathybandsError, ValueError):
    """The bottom touches or crosses the surface: epsilon * max|b| >= 1."""


class NumericalBreakdownError(BathybandsError, RuntimeError):
    """The assembled coercive form failed its positive-definiteness check.

    Carries the smallest Rayleigh quotient observed so the caller can tell
    a genuine physics violation from rounding noise.
    """

    def __init__(self, message: str, min_rayleigh: float):
        super().__init__(f"{message} (min Rayleigh quotient {min_rayleigh:.3e})")
        self.min_rayleigh = min_rayleigh


class GridTooSmallError(BathybandsError, ValueError):
    """A requested Fourier mode falls outside the trace grid."""


class CertificationError(BathybandsError, RuntimeError):
    """No computed resolvent eigenvalue lies within the quasimode residual."""


class SolverError(BathybandsError, RuntimeError):
    """A band-sweep column failed; the message carries (theta, epsilon)."""


class ConfigError(BathybandsError, ValueError):
    """Experiment configuration is malformed; message names the field."""
