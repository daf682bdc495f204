"""Closed-form predictors for gap locations and widths.

Near a flat double eigenvalue the two interacting Fourier modes reduce the
eigenvalue problem to a Hermitian 2x2 matrix.  At first order in the bottom
amplitude the off-diagonal entry couples modes +-p through the coefficient
b_{2p} with strength ``half_gap_coupling(2p)``, and the quasi-momentum enters
through ``band_slope_coefficient(p)``; the eigenvalue splitting predicts a
spectral gap of half-width F_{2p} |b_{2p}| eps centred at the unperturbed
double point.  When b_{2p} = 0 the splitting is second order: a mean shift
J_p eps^2 displaces the gap centre and a coupling S_p (an exact finite sum
over intermediate modes for band-limited bottoms) opens a gap of half-width
|S_p| eps^2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bathymetry import BathymetryProfile
from .flat import kappa, lambda0


def half_gap_coupling(m: int) -> float:
    """Gap half-width per unit eps*|b_m| for the pair split by mode m:
    (m/2)^2 / cosh^2(m/2)."""
    if m < 1:
        raise ValueError("coupling mode must be >= 1")
    h = 0.5 * m
    return float(h**2 / np.cosh(h) ** 2)


def band_slope_coefficient(p: int) -> float:
    """Quasi-momentum slope of the reduced 2x2 problem at the pair +-p:
    p/cosh^2(p) * (1 + sinh(2p)/(2p))."""
    if p < 1:
        raise ValueError("mode must be >= 1")
    return float(p / np.cosh(p) ** 2 * (1.0 + np.sinh(2.0 * p) / (2.0 * p)))


def interaction_matrix_order1(
    p: int, delta: float, profile: BathymetryProfile
) -> np.ndarray:
    """Hermitian trace-free 2x2 matrix governing the order-eps splitting.

    ``delta`` is the quasi-momentum measured in units of eps (theta = delta*eps).
    """
    if p < 1:
        raise ValueError("mode must be >= 1")
    kd = band_slope_coefficient(p) * delta
    c = profile.fourier_coefficient(2 * p) * half_gap_coupling(2 * p)
    return np.array([[kd, c], [np.conj(c), -kd]])


def level_shifts_order1(p: int, delta: float, profile: BathymetryProfile):
    """Eigenvalue pair (-s, +s) with s = sqrt(K_p^2 delta^2 + F_{2p}^2 |b_{2p}|^2)."""
    if delta < 0:
        raise ValueError("delta must be >= 0")
    kd = band_slope_coefficient(p) * delta
    c = half_gap_coupling(2 * p) * abs(profile.fourier_coefficient(2 * p))
    s = float(np.hypot(kd, c))
    return -s, s


def _summand_weight(k: int, p: int) -> float:
    """Weight (k^2 - kappa_k kappa_p)/(kappa_p - kappa_k) of one intermediate mode."""
    assert k not in (p, -p), "intermediate mode collides with the resonant pair"
    kk, kp = kappa(k, 0.0), kappa(p, 0.0)
    return (k**2 - kk * kp) / (kp - kk)


def second_order_mean_shift(p: int, profile: BathymetryProfile) -> float:
    """Mean displacement J_p of the pair at second order (always real)."""
    if p < 1:
        raise ValueError("mode must be >= 1")
    kb = profile.max_mode
    total = 0.0
    for k in range(p - kb, p + kb + 1):
        if k in (0, p, -p):
            continue
        total += _summand_weight(k, p) * abs(profile.fourier_coefficient(k - p)) ** 2
    # Band-limitedness makes the sum exact; spot-check the tail.
    for k in list(range(p + kb + 1, p + kb + 11)) + list(range(p - kb - 10, p - kb)):
        assert profile.fourier_coefficient(k - p) == 0
    pref = p**2 / np.cosh(p) ** 2
    return float(pref * total)


def second_order_coupling(p: int, profile: BathymetryProfile) -> complex:
    """Pair coupling S_p at second order; real when all b_k are real."""
    if p < 1:
        raise ValueError("mode must be >= 1")
    kb = profile.max_mode
    total = 0.0 + 0.0j
    for k in range(-p - kb, p + kb + 1):
        if k in (0, p, -p):
            continue
        total += (
            _summand_weight(k, p)
            * profile.fourier_coefficient(k + p)
            * np.conj(profile.fourier_coefficient(k - p))
        )
    pref = p**2 / np.cosh(p) ** 2
    return complex(pref * total)


def interaction_matrix_order2(
    p: int, delta: float, profile: BathymetryProfile
) -> np.ndarray:
    """Hermitian 2x2 matrix of the order-eps^2 splitting (theta = delta*eps^2)."""
    kd = band_slope_coefficient(p) * delta
    j = second_order_mean_shift(p, profile)
    s = second_order_coupling(p, profile)
    return np.array([[kd + j, -s], [-np.conj(s), -kd + j]])


def level_shifts_order2(p: int, delta: float, profile: BathymetryProfile):
    """Eigenvalue pair J_p -+ sqrt(K_p^2 delta^2 + |S_p|^2), ascending."""
    kd = band_slope_coefficient(p) * delta
    j = second_order_mean_shift(p, profile)
    s = abs(second_order_coupling(p, profile))
    root = float(np.hypot(kd, s))
    return j - root, j + root


@dataclass(frozen=True)
class GapPrediction:
    """Predicted gap interval [lower_edge, upper_edge] for one band pair."""

    p: int
    order: int
    center: float
    half_width: float
    lower_edge: float
    upper_edge: float
    location_theta: float
    inconclusive: bool = False


def gap_edges_order1(
    p: int, epsilon: float, profile: BathymetryProfile, location: float = 0.0
) -> GapPrediction:
    """Order-eps gap prediction at the double point theta = 0 or 1/2.

    At location 0 the pair (2p-1, 2p) splits through mode m = 2p; at
    location 1/2 the pair (2p, 2p+1) splits through m = 2p+1 (p >= 0).
    Accurate up to O(eps^2) corrections.
    """
    if location not in (0.0, 0.5):
        raise ValueError("location must be 0 or 1/2")
    if location == 0.0:
        if p < 1:
            raise ValueError("order-1 prediction at theta=0 needs p >= 1")
        m = 2 * p
        center = lambda0(2 * p, 0.0)
    else:
        if p < 0:
            raise ValueError("mode must be >= 0")
        m = 2 * p + 1
        center = lambda0(2 * p, 0.5)
    half = half_gap_coupling(m) * abs(profile.fourier_coefficient(m)) * epsilon
    return GapPrediction(
        p=p,
        order=1,
        center=center,
        half_width=half,
        lower_edge=center - half,
        upper_edge=center + half,
        location_theta=location,
        inconclusive=(half == 0.0),
    )


def gap_edges_order2(p: int, epsilon: float, profile: BathymetryProfile) -> GapPrediction:
    """Order-eps^2 gap prediction at theta = 0, valid only when b_{2p} = 0.

    The centre shifts to lambda_{2p}(0) + J_p eps^2 and the half-width is
    |S_p| eps^2, up to O(eps^3).  A vanishing coupling S_p gives no
    prediction and is flagged inconclusive.
    """
    if p < 1:
        raise ValueError("mode must be >= 1")
    if profile.fourier_coefficient(2 * p) != 0:
        raise ValueError(
            f"b_{2 * p} != 0: the gap opens at first order, use gap_edges_order1"
        )
    j = second_order_mean_shift(p, profile)
    s = abs(second_order_coupling(p, profile))
    center = lambda0(2 * p, 0.0) + j * epsilon**2
    half = s * epsilon**2
    return GapPrediction(
        p=p,
        order=2,
        center=center,
        half_width=half,
        lower_edge=center - half,
        upper_edge=center + half,
        location_theta=0.0,
        inconclusive=(s == 0.0),
    )
