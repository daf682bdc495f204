from __future__ import annotations

import numpy as np
import pytest

from bathybands import from_cosine_series
from bathybands.predictors import (
    band_slope_coefficient,
    gap_edges_order1,
    gap_edges_order2,
    half_gap_coupling,
    interaction_matrix_order1,
    interaction_matrix_order2,
    level_shifts_order1,
    level_shifts_order2,
    second_order_coupling,
    second_order_mean_shift,
)
from oracles import coupling_f, second_order_sums, slope_k, weight as mp_weight

# Frozen from tests/oracles.py.
F1 = 0.19661193324148185
F2 = 0.41997434161402607
K1 = 1.181568497569791
J1_13 = -3.504520607009402  # 2cos x + 2cos 3x, pair p = 1
S1_13 = -1.8229652110303855
TANH1 = 0.7615941559557649
KAPPA_0_H = 0.23105857863000488


def test_half_gap_coupling_values():
    assert half_gap_coupling(2) == pytest.approx(F2, rel=1e-15)
    assert half_gap_coupling(1) == pytest.approx(F1, rel=1e-15)
    assert half_gap_coupling(20) < 1e-6
    for m in range(1, 21):
        assert half_gap_coupling(m) > 0.0
        assert half_gap_coupling(m) == pytest.approx(float(coupling_f(m)), rel=1e-13)


def test_band_slope_values():
    assert band_slope_coefficient(1) == pytest.approx(K1, rel=1e-14)
    for p in range(1, 21):
        assert band_slope_coefficient(p) > 0.0
        assert band_slope_coefficient(p) == pytest.approx(float(slope_k(p)), rel=1e-13)


def test_interaction_matrix_order1(cos2x, flat):
    m = interaction_matrix_order1(1, 0.0, cos2x)
    assert m == pytest.approx(np.array([[0.0, F2], [F2, 0.0]]), abs=1e-15)
    assert np.linalg.eigvalsh(m) == pytest.approx([-F2, F2], rel=1e-14)
    d = interaction_matrix_order1(1, 0.7, flat)
    assert d == pytest.approx(np.diag([K1 * 0.7, -K1 * 0.7]), abs=1e-14)


def test_interaction_matrices_hermitian_traceless():
    rng = np.random.default_rng(11)
    for _ in range(100):
        p = int(rng.integers(1, 6))
        delta = float(rng.uniform(0.0, 10.0))
        terms = [
            (int(k), float(rng.uniform(0.1, 2.0)), float(rng.uniform(0, 2 * np.pi)))
            for k in rng.choice(np.arange(1, 9), size=3, replace=False)
        ]
        profile = from_cosine_series(terms)
        m1 = interaction_matrix_order1(p, delta, profile)
        assert np.allclose(m1, m1.conj().T)
        assert m1[0, 0] + m1[1, 1] == pytest.approx(0.0, abs=1e-14)
        # closed-form eigenvalues match a direct Hermitian solve
        lo, hi = level_shifts_order1(p, delta, profile)
        assert np.linalg.eigvalsh(m1) == pytest.approx([lo, hi], abs=1e-14)
        m2 = interaction_matrix_order2(p, delta, profile)
        assert np.allclose(m2, m2.conj().T)
        lo2, hi2 = level_shifts_order2(p, delta, profile)
        assert np.linalg.eigvalsh(m2) == pytest.approx([lo2, hi2], abs=1e-12)


def test_level_shifts_order1(cos2x, flat):
    lo, hi = level_shifts_order1(1, 0.0, cos2x)
    assert (lo, hi) == pytest.approx((-F2, F2), rel=1e-14)
    lo, hi = level_shifts_order1(1, 0.9, flat)
    assert (lo, hi) == pytest.approx((-K1 * 0.9, K1 * 0.9), rel=1e-14)
    # monotone in delta and bounded below by the coupling
    prev = 0.0
    for delta in np.linspace(0.0, 4.0, 9):
        _, hi = level_shifts_order1(1, float(delta), cos2x)
        assert hi >= F2 - 1e-15
        assert hi >= prev
        prev = hi
    assert level_shifts_order1(1, 0.0, cos2x)[1] == pytest.approx(F2, abs=1e-15)


def test_second_order_sums(cos13x, cos2x, flat):
    assert second_order_mean_shift(1, cos13x) == pytest.approx(J1_13, rel=1e-13)
    s = second_order_coupling(1, cos13x)
    assert s == pytest.approx(S1_13, rel=1e-13)
    assert s.imag == 0.0
    assert second_order_coupling(1, cos2x) == 0.0  # no chained pair of harmonics
    assert second_order_mean_shift(1, flat) == 0.0
    assert second_order_coupling(1, flat) == 0.0


def test_second_order_sums_match_oracle_for_random_profiles():
    rng = np.random.default_rng(5)
    for _ in range(5):
        terms = [
            (int(k), float(rng.uniform(0.1, 1.0)), float(rng.uniform(0, 2 * np.pi)))
            for k in rng.choice(np.arange(1, 7), size=3, replace=False)
        ]
        profile = from_cosine_series(terms)
        table = {
            k: complex(profile.fourier_coefficient(k)) for k in range(-8, 9) if k != 0
        }
        for p in (1, 2):
            j_ref, s_ref = second_order_sums(p, table, k_range=60)
            assert second_order_mean_shift(p, profile) == pytest.approx(
                float(j_ref), rel=1e-12
            )
            got = second_order_coupling(p, profile)
            assert got == pytest.approx(complex(s_ref), abs=1e-12 * (1 + abs(s_ref)))


def test_level_shifts_order2_no_coupling(cos1x):
    # S_2 = 0 for a single harmonic: the pair moves rigidly, J +- K delta
    from bathybands.predictors import second_order_coupling as s_of

    assert s_of(2, cos1x) == 0.0
    j2 = second_order_mean_shift(2, cos1x)
    k2 = band_slope_coefficient(2)
    for delta in (0.0, 0.7, 3.0):
        lo, hi = level_shifts_order2(2, delta, cos1x)
        assert lo == pytest.approx(j2 - k2 * delta, rel=1e-13)
        assert hi == pytest.approx(j2 + k2 * delta, rel=1e-13)


def test_coupling_conjugation_symmetry():
    base = [(1, 0.5, 0.3), (2, 0.8, -1.1), (3, 0.4, 2.0)]
    mirrored = [(k, a, -ph) for k, a, ph in base]  # conjugates every coefficient
    p1 = from_cosine_series(base)
    p2 = from_cosine_series(mirrored)
    for p in (1, 2):
        assert second_order_mean_shift(p, p2) == pytest.approx(
            second_order_mean_shift(p, p1), rel=1e-13
        )
        assert second_order_coupling(p, p2) == pytest.approx(
            np.conj(second_order_coupling(p, p1)), rel=1e-13
        )


def test_summand_weight_finite():
    from bathybands.predictors import _summand_weight

    for p in range(1, 11):
        for k in range(-50, 51):
            if k in (0, p, -p):
                continue
            w = _summand_weight(k, p)
            assert np.isfinite(w)
            assert w == pytest.approx(float(mp_weight(k, p)), rel=1e-12)


def test_gap_edges_order1(cos2x, cos1x):
    pred = gap_edges_order1(1, 0.02, cos2x, location=0.0)
    assert pred.center == pytest.approx(TANH1, rel=1e-15)
    assert pred.half_width == pytest.approx(F2 * 0.02, rel=1e-14)
    assert pred.upper_edge - pred.lower_edge == pytest.approx(2 * pred.half_width)
    # missing harmonic: order-1 prediction is silent (zero width, flagged)
    silent = gap_edges_order1(1, 0.02, cos1x, location=0.0)
    assert silent.half_width == 0.0 and silent.inconclusive
    half = gap_edges_order1(0, 0.01, cos1x, location=0.5)
    assert half.center == pytest.approx(KAPPA_0_H, rel=1e-15)
    assert half.half_width == pytest.approx(F1 * 0.01, rel=1e-14)


def test_gap_edges_order2(cos13x, cos2x, cos1x):
    pred = gap_edges_order2(1, 0.05, cos13x)
    assert pred.center == pytest.approx(TANH1 + J1_13 * 0.0025, rel=1e-12)
    assert pred.half_width == pytest.approx(abs(S1_13) * 0.0025, rel=1e-12)
    with pytest.raises(ValueError, match="order1"):
        gap_edges_order2(1, 0.05, cos2x)  # b_2 != 0 belongs to the order-1 law
    # S = 0 with b_{2p} = 0: inconclusive flag, zero width (single harmonic
    # cannot chain two steps from -2 to +2)
    pred2 = gap_edges_order2(2, 0.05, cos1x)
    assert pred2.inconclusive and pred2.half_width == 0.0


def test_gap_edges_shrink_with_epsilon(cos13x):
    edges = []
    for eps in (0.08, 0.04, 0.02, 0.01):
        pred = gap_edges_order2(1, eps, cos13x)
        edges.append((pred.lower_edge, pred.upper_edge))
    lows, highs = zip(*edges)
    widths = np.subtract(highs, lows)
    assert all(np.diff(widths) < 0)
    # both edges converge to the unperturbed double point as eps -> 0
    # (at rate (|J| + |S|) eps^2, about 5.3e-4 at eps = 0.01)
    assert abs(lows[-1] - TANH1) < 1e-3 and abs(highs[-1] - TANH1) < 1e-3
