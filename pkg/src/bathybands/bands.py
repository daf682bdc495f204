"""Band sweeps over the quasi-momentum and gap measurement.

Evenness of the spectrum in theta reduces the Bloch cell to [0, 1/2]; a sweep
solves the surface eigenproblem on a grid of quasi-momenta and stacks the
lowest eigenvalues into bands.  Band labels are sort indices per column (no
eigenvector continuation), so a gap between consecutive bands is simply
max_theta lambda_n versus min_theta lambda_{n+1}.  Extrema are taken over
the grid; monotonicity of the bands in theta is not assumed anywhere.

Columns are independent solves and may run in parallel.  Workers pin the
BLAS pool to one thread so every column is computed by an identical
arithmetic path, which keeps sweep output bit-reproducible no matter how
many workers are used.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import numpy as np
from threadpoolctl import threadpool_limits

from .bathymetry import BathymetryProfile
from .errors import SolverError
from .solver import SpectralGrid, _Assembler, assemble_dno


@dataclass(frozen=True)
class ThetaGrid:
    """Sorted quasi-momentum samples in [0, 1/2] with both endpoints."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.size < 9:
            raise ValueError("theta grid needs at least 9 points")
        if np.any(np.diff(v) <= 0):
            raise ValueError("theta grid must be strictly increasing")
        if v[0] != 0.0 or v[-1] != 0.5:
            raise ValueError("theta grid must include both endpoints 0 and 1/2")

    @property
    def count(self) -> int:
        return int(self.values.size)

    @staticmethod
    def uniform(count: int = 65) -> "ThetaGrid":
        return ThetaGrid(np.linspace(0.0, 0.5, count))

    @staticmethod
    def chebyshev(count: int = 65) -> "ThetaGrid":
        """Endpoint-clustered grid; band extrema sit near theta = 0 and 1/2."""
        i = np.arange(count)
        return ThetaGrid(0.25 * (1.0 - np.cos(np.pi * i / (count - 1))))


@dataclass(frozen=True)
class BandStructure:
    """Table of the lowest bands over a theta grid at one epsilon.

    ``table[i, n]`` is band n at theta_grid.values[i]; each row is ascending.
    """

    theta_grid: ThetaGrid
    epsilon: float
    table: np.ndarray
    grid: SpectralGrid
    profile_digest: str = ""

    @property
    def n_bands(self) -> int:
        return int(self.table.shape[1])

    def band(self, n: int) -> np.ndarray:
        return self.table[:, n]


def sweep(
    profile: BathymetryProfile,
    epsilon: float,
    grid: SpectralGrid,
    theta_grid: ThetaGrid,
    n_bands: int,
    threads: int = 0,
) -> BandStructure:
    """Lowest ``n_bands`` eigenvalues per quasi-momentum column.

    ``n_bands`` must stay within the trusted part of the discretization,
    n_x/2 - 2.  ``threads`` = 0 picks the CPU count; columns are reduced in
    theta order so output does not depend on scheduling.
    """
    if n_bands < 1 or n_bands > grid.n_x // 2 - 2:
        raise ValueError(
            f"n_bands must be in [1, {grid.n_x // 2 - 2}] for n_x={grid.n_x}"
        )
    workers = threads if threads > 0 else (os.cpu_count() or 1)
    assembler = _Assembler(profile, epsilon, grid)

    def column(i: int) -> np.ndarray:
        theta = float(theta_grid.values[i])
        try:
            with threadpool_limits(limits=1):
                spec = assemble_dno(profile, epsilon, theta, grid, assembler=assembler)
        except Exception as exc:
            raise SolverError(
                f"band column failed at theta={theta}, epsilon={epsilon}: {exc}"
            ) from exc
        return spec.eigenvalues[:n_bands]

    if workers == 1:
        columns = [column(i) for i in range(theta_grid.count)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            columns = list(pool.map(column, range(theta_grid.count)))
    table = np.vstack(columns)
    return BandStructure(
        theta_grid=theta_grid,
        epsilon=float(epsilon),
        table=table,
        grid=grid,
        profile_digest=profile.digest(),
    )


@dataclass(frozen=True)
class GapRecord:
    """Measured gap between bands n_lower and n_lower + 1.

    ``width`` is clamped at zero; it is positive exactly when the two closed
    band intervals are disjoint.  ``resolution_bound`` estimates how much the
    grid extrema can miss a true extremum: local band slope times the grid
    step around the extremal points.
    """

    p: int
    n_lower: int
    lower_max: float
    upper_min: float
    width: float
    center: float
    argmax_theta: float
    argmin_theta: float
    resolution_bound: float = 0.0


def _parabolic_peak(thetas: np.ndarray, values: np.ndarray, i: int, mode: str) -> float:
    """Refine an extremum through the parabola on the three nearest points."""
    if i == 0 or i == values.size - 1:
        return float(values[i])
    x0, x1, x2 = thetas[i - 1 : i + 2]
    y0, y1, y2 = values[i - 1 : i + 2]
    denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
    b = (x2**2 * (y0 - y1) + x1**2 * (y2 - y0) + x0**2 * (y1 - y2)) / denom
    if a == 0.0:
        return float(y1)
    xv = -b / (2.0 * a)
    if not min(x0, x2) <= xv <= max(x0, x2):
        return float(y1)
    c = y1 - a * x1**2 - b * x1
    yv = a * xv**2 + b * xv + c
    if mode == "max":
        return float(max(y1, yv)) if a < 0 else float(y1)
    return float(min(y1, yv)) if a > 0 else float(y1)


def _local_slope_bound(thetas: np.ndarray, values: np.ndarray, i: int) -> float:
    lo, hi = max(i - 1, 0), min(i + 1, values.size - 1)
    if hi == lo:
        return 0.0
    slopes = np.abs(np.diff(values[lo : hi + 1]) / np.diff(thetas[lo : hi + 1]))
    step = float(np.max(np.diff(thetas[lo : hi + 1])))
    return float(np.max(slopes)) * step


def detect_gap(bands: BandStructure, n_lower: int, refine: bool = False) -> GapRecord:
    """Gap record for the pair (n_lower, n_lower + 1) from grid extrema.

    ``refine`` switches on the opt-in parabolic refinement of interior
    extrema; by default the raw grid extrema are reported together with a
    slope-based resolution bound.
    """
    if n_lower + 1 >= bands.n_bands:
        raise ValueError("need n_lower + 1 < n_bands")
    thetas = bands.theta_grid.values
    lower = bands.band(n_lower)
    upper = bands.band(n_lower + 1)
    i_max = int(np.argmax(lower))
    i_min = int(np.argmin(upper))
    lower_max = float(lower[i_max])
    upper_min = float(upper[i_min])
    if refine:
        lower_max = _parabolic_peak(thetas, lower, i_max, "max")
        upper_min = _parabolic_peak(thetas, upper, i_min, "min")
    bound = max(
        _local_slope_bound(thetas, lower, i_max),
        _local_slope_bound(thetas, upper, i_min),
    )
    width = max(0.0, upper_min - lower_max)
    return GapRecord(
        p=(n_lower + 1) // 2,
        n_lower=n_lower,
        lower_max=lower_max,
        upper_min=upper_min,
        width=width,
        center=0.5 * (lower_max + upper_min),
        argmax_theta=float(thetas[i_max]),
        argmin_theta=float(thetas[i_min]),
        resolution_bound=bound,
    )


def spectrum_union(bands: BandStructure, tol: float = 1e-10) -> list[tuple[float, float]]:
    """Merge the per-band intervals [min_theta, max_theta] into disjoint pieces.

    Bands that touch within ``tol`` coalesce; double points are exact only in
    infinite precision, so a rounding-level tolerance keeps a gapless
    spectrum a single interval.
    """
    intervals = sorted(
        (float(bands.band(n).min()), float(bands.band(n).max()))
        for n in range(bands.n_bands)
    )
    merged: list[tuple[float, float]] = []
    for lo, hi in intervals:
        if merged and lo <= merged[-1][1] + tol:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return merged
