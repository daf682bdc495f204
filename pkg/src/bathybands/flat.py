"""Closed-form spectrum of the flat-bottom operator at unit depth.

For a flat bottom the surface-to-normal-derivative map diagonalizes over
Fourier modes e^{ipx} with eigenvalues kappa_p(theta) = (p+theta)tanh(p+theta),
theta being the quasi-momentum in (-1/2, 1/2].  Sorted by size, the
eigenvalues form continuous bands lambda_n(theta) that touch pairwise at
theta = 0 and theta = 1/2; the explicit relabeling table (not a sort) is
implemented here so that labels stay correct at the double points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def reduce_theta(theta: float) -> float:
    """Fold the quasi-momentum into (-1/2, 1/2] by periodicity."""
    t = theta - np.round(theta)
    if t <= -0.5:
        t += 1.0
    return float(t)


def kappa(p: int, theta: float) -> float:
    """Dispersion eigenvalue (p+theta)tanh(p+theta) of the Fourier mode p."""
    a = p + theta
    return float(a * np.tanh(a))


def band_label(n: int, theta: float) -> int:
    """Fourier label p such that lambda_n(theta) = kappa_p(theta).

    Bands with even index n = 2p follow kappa_p for theta >= 0 and kappa_{-p}
    for theta < 0; odd bands n = 2p-1 do the opposite.
    """
    if n < 0:
        raise ValueError("band index must be >= 0")
    theta = reduce_theta(theta)
    if n % 2 == 0:
        p = n // 2
        return p if theta >= 0 else -p
    p = (n + 1) // 2
    return -p if theta >= 0 else p


def lambda0(n: int, theta: float) -> float:
    """Flat band n at quasi-momentum theta, per the relabeling table."""
    theta = reduce_theta(theta)
    return kappa(band_label(n, theta), theta)


def tau0(n: int, theta: float) -> float:
    """Flat resolvent eigenvalue 1/(1 + lambda_n(theta)); lies in (0, 1]."""
    return 1.0 / (1.0 + lambda0(n, theta))


def flat_eigenfunction(p: int, theta: float, x, z):
    """Harmonic extension e^{ipx} cosh((p+theta)(z+1))/cosh(p+theta).

    Its trace at z = 0 is e^{ipx} and its vertical derivative there equals
    kappa_p(theta) e^{ipx}.  Accepts scalar or array x, z in [-1, 0].
    """
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    if np.any(z < -1.0 - 1e-12) or np.any(z > 1e-12):
        raise ValueError("vertical coordinate must lie in [-1, 0]")
    a = p + theta
    out = np.exp(1j * p * x) * np.cosh(a * (z + 1.0)) / np.cosh(a)
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class FlatEigen:
    """One flat-bottom eigenvalue with both of its labels."""

    p: int
    theta: float
    value: float
    band_index: int


def flat_eigen(n: int, theta: float) -> FlatEigen:
    theta = reduce_theta(theta)
    p = band_label(n, theta)
    return FlatEigen(p=p, theta=theta, value=kappa(p, theta), band_index=n)
