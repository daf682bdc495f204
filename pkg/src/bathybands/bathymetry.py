"""Periodic bottom profiles stored as finite sets of Fourier coefficients.

The bottom of the fluid strip sits at z = -1 + epsilon*b(x) with b real,
2*pi-periodic and of zero mean (depth is normalized to 1).  A profile keeps
the complex coefficients b_k of b(x) = sum_k b_k e^{ikx}; reality forces
b_{-k} = conj(b_k) and the zero-mean normalization forbids k = 0.  Profiles
are band-limited by construction, which keeps every coefficient sum used by
the gap predictors an exact finite sum.

Instances are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Dict, Iterable, Sequence, Tuple

import numpy as np

MAGNITUDE_FLOOR = 1e-14


@dataclass(frozen=True)
class BathymetryProfile:
    """Band-limited zero-mean bottom variation on the 2*pi torus."""

    coeffs: Dict[int, complex] = field(default_factory=dict)

    def __post_init__(self):
        for k, c in self.coeffs.items():
            if k == 0:
                raise ValueError("zero-mean profile cannot carry a k=0 coefficient")
            partner = self.coeffs.get(-k)
            if partner is None or abs(np.conj(c) - partner) > 1e-12 * max(1.0, abs(c)):
                raise ValueError(f"coefficients violate reality at mode {k}")

    @property
    def max_mode(self) -> int:
        return max((abs(k) for k in self.coeffs), default=0)

    @property
    def is_flat(self) -> bool:
        return not self.coeffs

    def fourier_coefficient(self, k: int) -> complex:
        """Coefficient b_k, zero for modes not stored."""
        return complex(self.coeffs.get(int(k), 0.0))

    def evaluate(self, x, derivative: int = 0):
        """Evaluate d^n b / dx^n at x (scalar or array); the result is real.

        The imaginary part left over by rounding is checked against
        1e-13 * sum|b_k| and then discarded.
        """
        x = np.asarray(x, dtype=float)
        total = np.zeros(x.shape, dtype=complex)
        for k, c in self.coeffs.items():
            total += c * (1j * k) ** derivative * np.exp(1j * k * x)
        scale = sum(abs(k) ** derivative * abs(c) for k, c in self.coeffs.items())
        if scale > 0 and np.max(np.abs(total.imag)) > 1e-13 * scale:
            raise AssertionError("profile evaluation produced a non-real value")
        real = total.real
        return real if real.ndim else float(real)

    def max_abs(self, n_samples: int = 4096) -> float:
        """Dense-grid estimate of max|b|; exact enough for domain checks."""
        if self.is_flat:
            return 0.0
        x = np.linspace(0.0, 2.0 * np.pi, n_samples, endpoint=False)
        return float(np.max(np.abs(self.evaluate(x))))

    def digest(self) -> str:
        """Stable short hash of the coefficient table, for provenance."""
        items = sorted((k, repr(complex(c))) for k, c in self.coeffs.items())
        return hashlib.sha256(repr(items).encode()).hexdigest()[:12]

    def __call__(self, x):
        return self.evaluate(x)


def flat_profile() -> BathymetryProfile:
    return BathymetryProfile({})


def from_cosine_series(terms: Iterable[Tuple[int, float, float]]) -> BathymetryProfile:
    """Profile for b(x) = sum a_k cos(k x + phi_k), given (k, a_k, phi_k) terms.

    Each cosine contributes b_{+-k} = (a_k/2) e^{-+ i phi_k}.  Modes must be
    positive and distinct.
    """
    coeffs: Dict[int, complex] = {}
    for k, amplitude, phase in terms:
        k = int(k)
        if k < 1:
            raise ValueError(f"cosine mode must be >= 1, got {k}")
        if k in coeffs:
            raise ValueError(f"duplicate cosine mode {k}")
        c = 0.5 * amplitude * np.exp(1j * phase)
        if abs(c) > 0.0:
            coeffs[k] = complex(c)
            coeffs[-k] = complex(np.conj(c))
    return BathymetryProfile(coeffs)


def from_samples(samples: Sequence[float], floor: float = MAGNITUDE_FLOOR) -> BathymetryProfile:
    """Profile from values of the bottom on a uniform grid of even size M >= 4.

    The discrete Fourier transform supplies coefficients for |k| <= M/2 - 1;
    the mean is removed and modes below ``floor`` in magnitude are dropped.
    """
    values = np.asarray(samples, dtype=float)
    if values.ndim != 1 or values.size < 4 or values.size % 2:
        raise ValueError("need a 1-D sample array of even length >= 4")
    if not np.all(np.isfinite(values)):
        raise ValueError("samples must be finite")
    m = values.size
    spectrum = np.fft.fft(values) / m
    coeffs: Dict[int, complex] = {}
    for k in range(1, m // 2):
        # Symmetrize so reality holds exactly despite FFT rounding.
        c = 0.5 * (spectrum[k] + np.conj(spectrum[-k % m]))
        if abs(c) > floor:
            coeffs[k] = complex(c)
            coeffs[-k] = complex(np.conj(c))
    return BathymetryProfile(coeffs)
