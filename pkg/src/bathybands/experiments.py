"""Experiment configuration, orchestration and file emission.

A single JSON document configures every experiment family: band sweeps,
gap measurement against the closed-form predictions, quasimode residuals
and certification, and the validation suite.  All emitted artifacts are
plain text (CSV for band tables, JSON for reports, SVG 1.1 for charts)
with deterministic bytes: floats use their shortest round-trip
representation (at most 17 significant digits), JSON keys are sorted and
line endings are LF.  Writes happen after the parallel solves are reduced
in order, so output is identical for any thread count.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import quasimodes
from .bands import BandStructure, GapRecord, ThetaGrid, detect_gap, sweep
from .bathymetry import BathymetryProfile, from_cosine_series
from .errors import ConfigError
from .flat import kappa
from .predictors import (
    GapPrediction,
    band_slope_coefficient,
    gap_edges_order1,
    gap_edges_order2,
    half_gap_coupling,
    second_order_coupling,
    second_order_mean_shift,
)
from .solver import SpectralGrid, assemble_dno

SCHEMA_VERSION = 1

_DEFAULTS = {
    "n_x": 64,
    "n_z": 32,
    "oversample": 4,
    "theta_count": 65,
    "n_bands": 8,
    "gap_rel_tolerance": 0.25,
}


@dataclass(frozen=True)
class ExperimentConfig:
    profile: BathymetryProfile
    epsilon_list: Tuple[float, ...]
    theta_grid: ThetaGrid
    grid: SpectralGrid
    n_bands: int
    gap_pairs: Tuple[int, ...]  # lower band indices of the pairs to analyze
    order1: bool
    order2: bool
    outputs: str
    thread_count: int
    gap_rel_tolerance: float


def _reject_unknown(obj: dict, allowed: set, where: str):
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"{where}: unknown field {key!r}")


def _build_profile(spec) -> BathymetryProfile:
    if not isinstance(spec, dict):
        raise ConfigError("bathymetry: expected an object")
    _reject_unknown(spec, {"kind", "terms", "coeffs"}, "bathymetry")
    kind = spec.get("kind")
    if kind == "cosine_series":
        terms = spec.get("terms")
        if not isinstance(terms, list):
            raise ConfigError("bathymetry.terms: expected a list")
        parsed = []
        for i, term in enumerate(terms):
            if not isinstance(term, list) or len(term) not in (2, 3):
                raise ConfigError(
                    f"bathymetry.terms[{i}]: expected [mode, amplitude] or "
                    "[mode, amplitude, phase]"
                )
            k, amp = term[0], term[1]
            phase = term[2] if len(term) == 3 else 0.0
            parsed.append((int(k), float(amp), float(phase)))
        try:
            return from_cosine_series(parsed)
        except ValueError as exc:
            raise ConfigError(f"bathymetry.terms: {exc}") from exc
    if kind == "fourier":
        coeffs = spec.get("coeffs")
        if not isinstance(coeffs, list):
            raise ConfigError("bathymetry.coeffs: expected a list")
        table = {}
        for i, entry in enumerate(coeffs):
            if not isinstance(entry, list) or len(entry) != 3:
                raise ConfigError(f"bathymetry.coeffs[{i}]: expected [mode, re, im]")
            k = int(entry[0])
            if k < 1:
                raise ConfigError(f"bathymetry.coeffs[{i}]: mode must be >= 1")
            c = complex(float(entry[1]), float(entry[2]))
            if k in table:
                raise ConfigError(f"bathymetry.coeffs[{i}]: duplicate mode {k}")
            if c != 0:
                table[k] = c
                table[-k] = c.conjugate()
        return BathymetryProfile(table)
    raise ConfigError("bathymetry.kind: expected 'cosine_series' or 'fourier'")


def parse_config(text: str) -> ExperimentConfig:
    """Validate a JSON configuration and fill in defaults.

    Raises ConfigError naming the offending field; malformed JSON reports
    the byte offset.  A physically impossible epsilon (bottom reaching the
    surface) is rejected here rather than at solve time.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at byte {exc.pos}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("top level: expected an object")
    allowed = {
        "schema_version",
        "bathymetry",
        "epsilon_list",
        "theta_grid",
        "grid",
        "n_bands",
        "gap_pairs",
        "predictors",
        "outputs",
        "thread_count",
        "tolerances",
    }
    _reject_unknown(raw, allowed, "top level")
    version = raw.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"schema_version: expected {SCHEMA_VERSION}, got {version}")
    if "bathymetry" not in raw:
        raise ConfigError("bathymetry: required field missing")
    profile = _build_profile(raw["bathymetry"])

    eps = raw.get("epsilon_list")
    if not isinstance(eps, list) or not eps:
        raise ConfigError("epsilon_list: expected a non-empty list")
    epsilon_list = tuple(float(e) for e in eps)
    if any(e < 0 for e in epsilon_list):
        raise ConfigError("epsilon_list: entries must be >= 0")
    bmax = profile.max_abs()
    for e in epsilon_list:
        if e * bmax >= 1.0:
            raise ConfigError(
                f"epsilon_list: epsilon={e} gives epsilon*max|b|={e * bmax:.3f} >= 1"
            )

    tg_spec = raw.get("theta_grid", {})
    if not isinstance(tg_spec, dict):
        raise ConfigError("theta_grid: expected an object")
    _reject_unknown(tg_spec, {"kind", "count"}, "theta_grid")
    tg_kind = tg_spec.get("kind", "uniform")
    tg_count = int(tg_spec.get("count", _DEFAULTS["theta_count"]))
    if tg_kind == "uniform":
        theta_grid = ThetaGrid.uniform(tg_count)
    elif tg_kind == "chebyshev":
        theta_grid = ThetaGrid.chebyshev(tg_count)
    else:
        raise ConfigError("theta_grid.kind: expected 'uniform' or 'chebyshev'")

    g_spec = raw.get("grid", {})
    if not isinstance(g_spec, dict):
        raise ConfigError("grid: expected an object")
    _reject_unknown(g_spec, {"n_x", "n_z", "oversample"}, "grid")
    try:
        grid = SpectralGrid(
            n_x=int(g_spec.get("n_x", _DEFAULTS["n_x"])),
            n_z=int(g_spec.get("n_z", _DEFAULTS["n_z"])),
            oversample=int(g_spec.get("oversample", _DEFAULTS["oversample"])),
        )
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}") from exc
    try:
        grid.check_profile(profile)
    except ValueError as exc:
        raise ConfigError(f"grid.n_x: {exc}") from exc

    n_bands = int(raw.get("n_bands", _DEFAULTS["n_bands"]))
    if not 1 <= n_bands <= grid.n_x // 2 - 2:
        raise ConfigError(f"n_bands: must be in [1, {grid.n_x // 2 - 2}]")

    gap_pairs = raw.get("gap_pairs", [1])
    if not isinstance(gap_pairs, list) or not all(isinstance(p, int) for p in gap_pairs):
        raise ConfigError("gap_pairs: expected a list of integers")
    for n_lower in gap_pairs:
        if not 0 <= n_lower < n_bands - 1:
            raise ConfigError(f"gap_pairs: pair ({n_lower},{n_lower + 1}) outside n_bands")

    pred = raw.get("predictors", {})
    if not isinstance(pred, dict):
        raise ConfigError("predictors: expected an object")
    _reject_unknown(pred, {"order1", "order2"}, "predictors")

    tol = raw.get("tolerances", {})
    if not isinstance(tol, dict):
        raise ConfigError("tolerances: expected an object")
    _reject_unknown(tol, {"gap_rel"}, "tolerances")

    thread_count = int(raw.get("thread_count", 0))
    if thread_count < 0:
        raise ConfigError("thread_count: must be >= 0")

    return ExperimentConfig(
        profile=profile,
        epsilon_list=epsilon_list,
        theta_grid=theta_grid,
        grid=grid,
        n_bands=n_bands,
        gap_pairs=tuple(gap_pairs),
        order1=bool(pred.get("order1", True)),
        order2=bool(pred.get("order2", True)),
        outputs=str(raw.get("outputs", "out")),
        thread_count=thread_count,
        gap_rel_tolerance=float(tol.get("gap_rel", _DEFAULTS["gap_rel_tolerance"])),
    )


# ----------------------------------------------------------------------------
# Serialization helpers.


def _fmt(x: float) -> str:
    """Shortest round-trip decimal form, capped at 17 significant digits."""
    return repr(float(x))


def _eps_tag(epsilon: float) -> str:
    return _fmt(epsilon).replace("-", "m").replace(".", "p")


def _write_text(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as handle:
        handle.write(text)


def _write_json(path: Path, payload: dict):
    _write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_band_csv(path: Path, bands: BandStructure):
    """theta,lambda_0,... rows in ascending theta, 17-digit round-trip floats."""
    header = "theta," + ",".join(f"lambda_{n}" for n in range(bands.n_bands))
    lines = [header]
    for i, theta in enumerate(bands.theta_grid.values):
        row = [_fmt(theta)] + [_fmt(v) for v in bands.table[i]]
        lines.append(",".join(row))
    _write_text(path, "\n".join(lines) + "\n")


def read_band_csv(path: Path) -> Tuple[np.ndarray, np.ndarray]:
    """Parse a band CSV back into (thetas, table); exact round trip."""
    with open(path, "r", newline="") as handle:
        lines = [line.rstrip("\n") for line in handle if line.strip()]
    rows = [[float(cell) for cell in line.split(",")] for line in lines[1:]]
    data = np.array(rows)
    return data[:, 0], data[:, 1:]


_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def write_band_svg(path: Path, bands: BandStructure, title: str):
    """Static SVG chart of the bands over theta in [0, 1/2]."""
    width, height = 720.0, 480.0
    left, right, top, bottom = 64.0, 16.0, 28.0, 44.0
    plot_w, plot_h = width - left - right, height - top - bottom
    thetas = bands.theta_grid.values
    ymax = float(bands.table.max()) * 1.05 or 1.0

    def px(theta):
        return left + plot_w * (theta / 0.5)

    def py(lam):
        return top + plot_h * (1.0 - lam / ymax)

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.0f} {height:.0f}">',
        f'<rect width="{width:.0f}" height="{height:.0f}" fill="white"/>',
        f'<text x="{left:.1f}" y="18" font-family="sans-serif" font-size="13">{title}</text>',
    ]
    axis = f'stroke="black" stroke-width="1"'
    parts.append(
        f'<line x1="{left:.1f}" y1="{top + plot_h:.1f}" x2="{left + plot_w:.1f}" '
        f'y2="{top + plot_h:.1f}" {axis}/>'
    )
    parts.append(
        f'<line x1="{left:.1f}" y1="{top:.1f}" x2="{left:.1f}" y2="{top + plot_h:.1f}" {axis}/>'
    )
    for i in range(6):
        theta = 0.1 * i
        x = px(theta)
        parts.append(f'<line x1="{x:.1f}" y1="{top + plot_h:.1f}" x2="{x:.1f}" y2="{top + plot_h + 5:.1f}" {axis}/>')
        parts.append(
            f'<text x="{x:.1f}" y="{top + plot_h + 18:.1f}" font-family="sans-serif" '
            f'font-size="11" text-anchor="middle">{theta:.1f}</text>'
        )
    for i in range(6):
        lam = ymax * i / 5.0
        y = py(lam)
        parts.append(f'<line x1="{left - 5:.1f}" y1="{y:.1f}" x2="{left:.1f}" y2="{y:.1f}" {axis}/>')
        parts.append(
            f'<text x="{left - 8:.1f}" y="{y + 4:.1f}" font-family="sans-serif" '
            f'font-size="11" text-anchor="end">{lam:.3g}</text>'
        )
    parts.append(
        f'<text x="{left + plot_w / 2:.1f}" y="{height - 8:.1f}" font-family="sans-serif" '
        f'font-size="12" text-anchor="middle">quasi-momentum</text>'
    )
    for n in range(bands.n_bands):
        pts = " ".join(
            f"{px(t):.2f},{py(v):.2f}" for t, v in zip(thetas, bands.table[:, n])
        )
        color = _PALETTE[n % len(_PALETTE)]
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
    parts.append("</svg>")
    _write_text(path, "\n".join(parts) + "\n")


# ----------------------------------------------------------------------------
# Experiment drivers.


def _sweep_all(config: ExperimentConfig) -> Dict[float, BandStructure]:
    return {
        eps: sweep(
            config.profile,
            eps,
            config.grid,
            config.theta_grid,
            config.n_bands,
            threads=config.thread_count,
        )
        for eps in config.epsilon_list
    }


def run_bands(config: ExperimentConfig, out_dir: Optional[Path] = None) -> List[Path]:
    """One CSV and one SVG chart per epsilon; returns the paths written."""
    out = Path(out_dir if out_dir is not None else config.outputs)
    written = []
    for eps, bands in _sweep_all(config).items():
        csv_path = out / f"bands_eps_{_eps_tag(eps)}.csv"
        write_band_csv(csv_path, bands)
        svg_path = out / f"bands_eps_{_eps_tag(eps)}.svg"
        write_band_svg(svg_path, bands, title=f"bands at epsilon = {_fmt(eps)}")
        written += [csv_path, svg_path]
    return written


def _pair_prediction(config: ExperimentConfig, n_lower: int, eps: float) -> Optional[GapPrediction]:
    """Dispatch the gap predictor for the band pair (n_lower, n_lower+1).

    Odd lower index: double point at theta = 0 with p = (n_lower+1)/2; the
    second-order formula takes over when the first-order coupling b_{2p}
    vanishes.  Even lower index: double point at theta = 1/2 with p =
    n_lower/2 (first order only).
    """
    p = (n_lower + 1) // 2
    if n_lower % 2:
        if config.order1 and config.profile.fourier_coefficient(2 * p) != 0:
            return gap_edges_order1(p, eps, config.profile, location=0.0)
        if config.order2:
            return gap_edges_order2(p, eps, config.profile)
        return None
    if config.order1:
        return gap_edges_order1(p, eps, config.profile, location=0.5)
    return None


def _gap_entry(config: ExperimentConfig, record: GapRecord, prediction, eps: float) -> dict:
    entry = {
        "p": record.p,
        "n_lower": record.n_lower,
        "epsilon": eps,
        "measured": {
            "lower_max": record.lower_max,
            "upper_min": record.upper_min,
            "width": record.width,
            "center": record.center,
            "argmax_theta": record.argmax_theta,
            "argmin_theta": record.argmin_theta,
        },
    }
    if prediction is None:
        entry["predicted"] = None
        entry["deviation"] = 0.0
        entry["passed"] = True
        return entry
    entry["predicted"] = {
        "order": prediction.order,
        "center": prediction.center,
        "half_width": prediction.half_width,
        "lower_edge": prediction.lower_edge,
        "upper_edge": prediction.upper_edge,
        "location_theta": prediction.location_theta,
        "inconclusive": prediction.inconclusive,
    }
    scale = max(record.width, 2.0 * prediction.half_width)
    deviation = abs(record.width - 2.0 * prediction.half_width) / scale if scale else 0.0
    entry["deviation"] = deviation
    entry["passed"] = bool(
        prediction.inconclusive or deviation <= config.gap_rel_tolerance
    )
    return entry


def run_gaps(config: ExperimentConfig, out_dir: Optional[Path] = None) -> Path:
    """Measured versus predicted gaps for every configured pair and epsilon."""
    out = Path(out_dir if out_dir is not None else config.outputs)
    entries = []
    for eps, bands in _sweep_all(config).items():
        for n_lower in config.gap_pairs:
            record = detect_gap(bands, n_lower)
            prediction = _pair_prediction(config, n_lower, eps)
            entries.append(_gap_entry(config, record, prediction, eps))
    payload = {
        "schema_version": SCHEMA_VERSION,
        "profile_digest": config.profile.digest(),
        "gap_rel_tolerance": config.gap_rel_tolerance,
        "entries": entries,
        "all_passed": all(e["passed"] for e in entries),
    }
    path = out / "gap_report.json"
    _write_json(path, payload)
    return path


_GAP_REPORT_KEYS = {"schema_version", "profile_digest", "gap_rel_tolerance", "entries", "all_passed"}
_GAP_ENTRY_KEYS = {"p", "n_lower", "epsilon", "measured", "predicted", "deviation", "passed"}


def read_gap_report(path) -> dict:
    """Parse a gap report, enforcing the schema version of this writer.

    Unknown fields are rejected: a report written by a future schema must not
    be silently reinterpreted.
    """
    payload = json.loads(Path(path).read_text())
    version = payload.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"gap report: schema_version {version} != {SCHEMA_VERSION}")
    _reject_unknown(payload, _GAP_REPORT_KEYS, "gap report")
    for i, entry in enumerate(payload.get("entries", [])):
        _reject_unknown(entry, _GAP_ENTRY_KEYS, f"gap report entries[{i}]")
    return payload


def run_predict(config: ExperimentConfig, out_dir: Optional[Path] = None) -> Path:
    """Closed-form predictor table (no solves)."""
    out = Path(out_dir if out_dir is not None else config.outputs)
    entries = []
    for n_lower in config.gap_pairs:
        p = (n_lower + 1) // 2
        at_zero = bool(n_lower % 2)
        m = 2 * p if at_zero else 2 * p + 1
        constants = {
            "coupling": half_gap_coupling(m),
            "coupling_mode": m,
            "slope": band_slope_coefficient(p) if p >= 1 else None,
        }
        if at_zero and p >= 1:
            constants["mean_shift"] = second_order_mean_shift(p, config.profile)
            s = second_order_coupling(p, config.profile)
            constants["cross_coupling"] = [s.real, s.imag]
        for eps in config.epsilon_list:
            prediction = _pair_prediction(config, n_lower, eps)
            entries.append(
                {
                    "n_lower": n_lower,
                    "p": p,
                    "epsilon": eps,
                    "constants": constants,
                    "prediction": None
                    if prediction is None
                    else {
                        "order": prediction.order,
                        "center": prediction.center,
                        "half_width": prediction.half_width,
                        "lower_edge": prediction.lower_edge,
                        "upper_edge": prediction.upper_edge,
                        "location_theta": prediction.location_theta,
                        "inconclusive": prediction.inconclusive,
                    },
                }
            )
    payload = {
        "schema_version": SCHEMA_VERSION,
        "profile_digest": config.profile.digest(),
        "entries": entries,
    }
    path = out / "predictions.json"
    _write_json(path, payload)
    return path


def run_quasimode(config: ExperimentConfig, out_dir: Optional[Path] = None) -> Path:
    """Quasimode residuals and eigenvalue certification at theta = 0 pairs."""
    out = Path(out_dir if out_dir is not None else config.outputs)
    entries = []
    pairs = [n for n in config.gap_pairs if n % 2] or [1]
    for eps in config.epsilon_list:
        spectrum = assemble_dno(config.profile, eps, 0.0, config.grid)
        for n_lower in pairs:
            p = (n_lower + 1) // 2
            for branch in (-1, +1):
                qm = quasimodes.build_quasimode(p, 0.0, eps, config.profile, branch)
                cert = quasimodes.certify_eigenvalue(qm, spectrum)
                entries.append(
                    {
                        "p": p,
                        "epsilon": eps,
                        "branch": branch,
                        "lambda_app": qm.lambda_app,
                        "tau_app": qm.tau_app,
                        "residual": cert.residual,
                        "matched_lambda": cert.matched_lambda,
                        "error_bound": cert.error_bound,
                        "band_index": cert.band_index,
                        "informative": cert.informative,
                        "degenerate": qm.degenerate,
                    }
                )
    payload = {
        "schema_version": SCHEMA_VERSION,
        "profile_digest": config.profile.digest(),
        "entries": entries,
    }
    path = out / "quasimode_report.json"
    _write_json(path, payload)
    return path


def run_validate(config: ExperimentConfig, out_dir: Optional[Path] = None) -> Path:
    """Machine-readable pass/fail for the package's analytic invariants."""
    out = Path(out_dir if out_dir is not None else config.outputs)
    checks = []

    def check(name: str, measured: float, tolerance: float, **details):
        checks.append(
            {
                "name": name,
                "measured": float(measured),
                "tolerance": tolerance,
                "passed": bool(measured <= tolerance),
                **details,
            }
        )

    grid = config.grid
    profile = config.profile

    # Flat-bottom eigenvalues against the dispersion relation.
    worst = 0.0
    for theta in (0.0, 0.25):
        spectrum = assemble_dno(BathymetryProfile({}), 0.0, theta, grid)
        exact = np.sort([kappa(k, theta) for k in grid.modes])
        count = min(17, grid.n_x // 2 - 2)
        err = np.abs(spectrum.eigenvalues[:count] - exact[:count]) / np.maximum(
            1.0, exact[:count]
        )
        worst = max(worst, float(err.max()))
    check("flat_bottom_exactness", worst, 1e-8)

    # The constant mode stays an exact kernel vector at theta = 0.
    eps0 = config.epsilon_list[0]
    spectrum = assemble_dno(profile, eps0, 0.0, grid)
    check("kernel_mode", abs(float(spectrum.eigenvalues[0])), 1e-8, epsilon=eps0)

    # Spectrum is even in the quasi-momentum (trusted bands).
    trust = grid.n_x // 2 - 2
    worst = 0.0
    for theta in (0.1, 0.3):
        plus = assemble_dno(profile, eps0, theta, grid)
        minus = assemble_dno(profile, eps0, -theta, grid)
        worst = max(
            worst,
            float(np.abs(plus.eigenvalues[:trust] - minus.eigenvalues[:trust]).max()),
        )
    check("evenness", worst, 1e-10, epsilon=eps0)

    # Quadrature of the coupling integrals against their closed forms.
    worst = 0.0
    for p in (1, 2):
        got = quasimodes.first_order_coupling_integrals(p, profile)
        ref = 2.0 * np.pi * (p / np.cosh(p)) ** 2
        expected_cross = ref * np.conj(profile.fourier_coefficient(2 * p))
        worst = max(
            worst,
            abs(got.diagonal),
            abs(got.cross - expected_cross),
            abs(got.cross_conj - np.conj(expected_cross)),
        )
    check("coupling_integrals", worst, 1e-8)

    # Exact identities satisfied by the corrector layer.
    worst_p, worst_x = 0.0, 0.0
    for p in (1, 2):
        res = quasimodes.corrector_identity_residuals(p, profile)
        worst_p = max(worst_p, res.poisson_max)
        worst_x = max(worst_x, res.exchange_max)
    check("corrector_poisson_identity", worst_p, 1e-8)
    check("corrector_exchange_identity", worst_x, 1e-8)

    # Quasimode residual scales like epsilon^2 (ratio ~4 under halving).
    bmax = profile.max_abs()
    base = 0.08 if 0.08 * max(bmax, 1e-9) < 0.5 else 0.25 / max(bmax, 1e-9)
    ratios = []
    if not profile.is_flat:
        residuals = []
        for eps in (base, base / 2, base / 4):
            qm = quasimodes.build_quasimode(1, 0.0, eps, profile, +1)
            residuals.append(quasimodes.residual(qm, profile, grid))
        ratios = [residuals[i] / residuals[i + 1] for i in range(2)]
        worst = max(abs(r - 4.0) for r in ratios)
        check("residual_scaling", worst, 1.0, ratios=ratios, epsilons=[base, base / 2, base / 4])

    payload = {
        "schema_version": SCHEMA_VERSION,
        "profile_digest": profile.digest(),
        "checks": checks,
        "all_passed": all(c["passed"] for c in checks),
    }
    path = out / "validation.json"
    _write_json(path, payload)
    return path
