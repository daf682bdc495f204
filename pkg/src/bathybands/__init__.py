"""Band structure and gap analysis for water waves over a periodic bottom."""

from .bands import BandStructure, GapRecord, ThetaGrid, detect_gap, spectrum_union, sweep
from .bathymetry import BathymetryProfile, flat_profile, from_cosine_series, from_samples
from .flat import FlatEigen, band_label, flat_eigenfunction, kappa, lambda0, reduce_theta, tau0
from .predictors import (
    GapPrediction,
    band_slope_coefficient,
    gap_edges_order1,
    gap_edges_order2,
    half_gap_coupling,
    level_shifts_order1,
    level_shifts_order2,
    second_order_coupling,
    second_order_mean_shift,
)
from .quasimodes import Quasimode, build_quasimode, certify_eigenvalue, residual, surface_trace
from .solver import (
    DnoSpectrum,
    SpectralGrid,
    TransformCoefficients,
    apply_resolvent,
    assemble_dno,
    build_coefficients,
    q_series_term,
)

__all__ = [
    "BandStructure",
    "GapRecord",
    "ThetaGrid",
    "detect_gap",
    "spectrum_union",
    "sweep",
    "BathymetryProfile",
    "flat_profile",
    "from_cosine_series",
    "from_samples",
    "FlatEigen",
    "band_label",
    "flat_eigenfunction",
    "kappa",
    "lambda0",
    "reduce_theta",
    "tau0",
    "GapPrediction",
    "band_slope_coefficient",
    "gap_edges_order1",
    "gap_edges_order2",
    "half_gap_coupling",
    "level_shifts_order1",
    "level_shifts_order2",
    "second_order_coupling",
    "second_order_mean_shift",
    "Quasimode",
    "build_quasimode",
    "certify_eigenvalue",
    "residual",
    "surface_trace",
    "DnoSpectrum",
    "SpectralGrid",
    "TransformCoefficients",
    "apply_resolvent",
    "assemble_dno",
    "build_coefficients",
    "q_series_term",
]

__version__ = "0.1.0"
