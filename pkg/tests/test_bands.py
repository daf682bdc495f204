from __future__ import annotations

import numpy as np
import pytest

from bathybands import kappa, lambda0
from bathybands.bands import BandStructure, ThetaGrid, detect_gap, spectrum_union, sweep
from bathybands.errors import SolverError

F2 = 0.41997434161402607


@pytest.fixture(scope="module")
def swept(cos2x, flat, small_grid):
    """Shared sweeps for this module (17-point grid keeps them cheap)."""
    tg = ThetaGrid.uniform(17)
    return {
        "flat": sweep(flat, 0.0, small_grid, tg, 6, threads=1),
        "cos2x": sweep(cos2x, 0.02, small_grid, tg, 6, threads=1),
    }


def test_theta_grid_validation():
    with pytest.raises(ValueError):
        ThetaGrid(np.linspace(0.0, 0.5, 5))  # too few
    with pytest.raises(ValueError):
        ThetaGrid(np.linspace(0.0, 0.4, 9))  # missing endpoint
    with pytest.raises(ValueError):
        ThetaGrid(np.concatenate([[0.0, 0.3, 0.3], np.linspace(0.35, 0.5, 7)]))
    tg = ThetaGrid.uniform(33)
    assert tg.count == 33 and tg.values[0] == 0.0 and tg.values[-1] == 0.5
    tc = ThetaGrid.chebyshev(33)
    assert tc.values[0] == 0.0 and tc.values[-1] == 0.5
    # clustering: first interior step smaller than uniform spacing
    assert tc.values[1] - tc.values[0] < tg.values[1] - tg.values[0]


def test_sweep_flat_matches_dispersion(swept, small_grid):
    bands = swept["flat"]
    thetas = bands.theta_grid.values
    k0 = np.array([kappa(0, t) for t in thetas])
    assert np.abs(bands.band(0) - k0).max() < 1e-8
    for n in range(4):
        exact = np.array([lambda0(n, t) for t in thetas])
        assert np.abs(bands.band(n) - exact).max() < 1e-8


def test_sweep_flat_double_points(swept):
    bands = swept["flat"]
    # pairs touch at theta = 0 and theta = 1/2
    assert bands.table[0, 1] == pytest.approx(bands.table[0, 2], abs=1e-8)
    assert bands.table[0, 3] == pytest.approx(bands.table[0, 4], abs=1e-8)
    assert bands.table[-1, 0] == pytest.approx(bands.table[-1, 1], abs=1e-8)


def test_sweep_columns_sorted_finite(swept):
    for bands in swept.values():
        assert np.all(np.isfinite(bands.table))
        assert np.all(np.diff(bands.table, axis=1) >= -1e-14)


def test_sweep_rejects_excess_bands(cos2x, small_grid):
    with pytest.raises(ValueError):
        sweep(cos2x, 0.02, small_grid, ThetaGrid.uniform(9), small_grid.n_x, threads=1)


def test_sweep_rejects_degenerate_domain(cos2x, small_grid):
    from bathybands.errors import DomainDegeneracyError

    with pytest.raises(DomainDegeneracyError):
        sweep(cos2x, 0.7, small_grid, ThetaGrid.uniform(9), 4, threads=1)


def test_sweep_tags_column_failures_with_theta(cos2x, small_grid, monkeypatch):
    import bathybands.bands as bands_mod

    real = bands_mod.assemble_dno

    def flaky(profile, epsilon, theta, grid, **kwargs):
        if abs(theta - 0.25) < 1e-12:
            raise RuntimeError("synthetic breakdown")
        return real(profile, epsilon, theta, grid, **kwargs)

    monkeypatch.setattr(bands_mod, "assemble_dno", flaky)
    with pytest.raises(SolverError, match="theta=0.25"):
        sweep(cos2x, 0.02, small_grid, ThetaGrid.uniform(9), 4, threads=1)


def test_sweep_thread_counts_agree(cos2x, small_grid):
    tg = ThetaGrid.uniform(9)
    one = sweep(cos2x, 0.02, small_grid, tg, 4, threads=1)
    four = sweep(cos2x, 0.02, small_grid, tg, 4, threads=4)
    assert np.array_equal(one.table, four.table)


def test_detect_gap_flat_touching(swept):
    for n in range(4):
        record = detect_gap(swept["flat"], n)
        assert record.width == 0.0


def test_detect_gap_cos2x(swept):
    record = detect_gap(swept["cos2x"], 1)
    assert record.p == 1 and record.n_lower == 1
    assert record.width == pytest.approx(2 * F2 * 0.02, rel=0.2)
    assert record.argmax_theta == 0.0 and record.argmin_theta == 0.0
    assert record.center == pytest.approx(np.tanh(1.0), abs=0.01)
    assert record.upper_min - record.lower_max == pytest.approx(record.width)


def test_detect_gap_clamps_overlap():
    # synthetic overlapping bands: upper dips below the lower band's max
    tg = ThetaGrid.uniform(9)
    table = np.column_stack(
        [np.linspace(0.0, 1.0, 9), np.linspace(0.9, 1.9, 9)]
    )
    from bathybands.solver import SpectralGrid

    bands = BandStructure(tg, 0.0, table, SpectralGrid(16, 8, 2))
    record = detect_gap(bands, 0)
    assert record.width == 0.0
    assert record.upper_min < record.lower_max


def test_detect_gap_parabolic_refinement(swept):
    raw = detect_gap(swept["cos2x"], 1, refine=False)
    refined = detect_gap(swept["cos2x"], 1, refine=True)
    # extrema at grid endpoints: refinement cannot move them here
    assert refined.width == pytest.approx(raw.width, abs=raw.resolution_bound + 1e-12)


def test_gap_stable_under_grid_refinement(cos2x, small_grid):
    coarse = sweep(cos2x, 0.02, small_grid, ThetaGrid.uniform(33), 4, threads=1)
    fine = sweep(cos2x, 0.02, small_grid, ThetaGrid.uniform(65), 4, threads=1)
    g_coarse = detect_gap(coarse, 1)
    g_fine = detect_gap(fine, 1)
    # extrema sit at theta = 0, shared by both grids
    assert g_coarse.width == pytest.approx(g_fine.width, abs=1e-10)
    assert abs(g_coarse.width - g_fine.width) <= max(
        g_coarse.resolution_bound, g_fine.resolution_bound
    )


def test_spectrum_union(swept):
    flat_union = spectrum_union(swept["flat"])
    assert len(flat_union) == 1
    assert flat_union[0][0] == pytest.approx(0.0, abs=1e-10)
    # first four bands split into two pieces around the opened gap
    bands = swept["cos2x"]
    first_four = BandStructure(
        bands.theta_grid, bands.epsilon, bands.table[:, :4], bands.grid
    )
    split = spectrum_union(first_four)
    assert len(split) == 2
    gap_lo, gap_hi = split[0][1], split[1][0]
    assert gap_lo < np.tanh(1.0) < gap_hi


def test_spectrum_union_single_band(swept):
    bands = swept["flat"]
    only = BandStructure(
        bands.theta_grid, bands.epsilon, bands.table[:, :1], bands.grid
    )
    assert len(spectrum_union(only)) == 1


def test_band_closeness_to_flat(cos2x, small_grid):
    # eigenvalues move at most O(eps) away from the flat bands
    tg = ThetaGrid.uniform(9)
    for eps in (0.01, 0.02):
        bands = sweep(cos2x, eps, small_grid, tg, 5, threads=1)
        worst = 0.0
        for i, theta in enumerate(tg.values):
            for n in range(5):
                worst = max(worst, abs(bands.table[i, n] - lambda0(n, theta)))
        assert worst <= 3.0 * eps
