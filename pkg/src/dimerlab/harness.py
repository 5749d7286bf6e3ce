"""Sweeps, exact-vs-analytic comparison reports and collapse location.

This is the glue the CLI drives: for each interspecies coupling W it
diagonalizes the exact Hamiltonian, evaluates the closed-form levels for
the classified regime, and emits flat records suitable for CSV/JSON
export.  Strong-regime closed-form doublets are expanded into two equal
entries so that their index runs parallel to the exact near-degenerate
pairs; level-by-level comparisons always match by sorted energy value,
never by (n, m) labels, which is what keeps quasi-degenerate crossings
from scrambling the report.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import cv, exact, fock
from .model import ModelParams, Regime, classify_regime, effective_params

__all__ = [
    "CollapseEstimate",
    "ComparisonReport",
    "RunConfig",
    "SweepRecord",
    "SweepSpec",
    "compare_spectra",
    "cv_relative_levels",
    "density_overlap",
    "fit_deviation_exponent",
    "grid_peaks",
    "locate_collapse",
    "run_point",
    "sweep_coupling",
    "write_collapse_json",
    "write_levels_csv",
    "write_report_json",
]


@dataclass(frozen=True)
class SweepSpec:
    """Linear sweep of one model parameter (only "W" is supported)."""

    param: str
    start: float
    stop: float
    count: int

    def __post_init__(self):
        if self.param != "W":
            raise ValueError(f"only W sweeps are supported, got {self.param!r}")
        if self.count < 1:
            raise ValueError("sweep count must be >= 1")

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([float(self.start)])
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class RunConfig:
    """Everything one invocation needs; flags override config-file values upstream."""

    params: ModelParams
    sweep: SweepSpec | None = None
    levels: int = 7
    n_max: int = 24
    m_max: int = 24
    out: str = "."
    solver: str = "auto"
    fmt: str = "csv"

    def __post_init__(self):
        if self.levels < 1:
            raise ValueError("levels must be >= 1")
        if self.solver not in ("auto", "dense", "lanczos"):
            raise ValueError(f"unknown solver {self.solver!r}")
        if self.fmt not in ("csv", "json"):
            raise ValueError(f"unknown format {self.fmt!r}")


@dataclass
class SweepRecord:
    """One sweep point: exact and closed-form relative levels plus bookkeeping."""

    W: float
    exact_rel: np.ndarray | None
    cv_rel: np.ndarray | None
    min_gap: float
    regime: Regime
    error: str | None = None


def cv_relative_levels(params: ModelParams, count: int, n_max: int, m_max: int) -> tuple[np.ndarray, Regime]:
    """First `count` closed-form relative levels with doublets expanded.

    At a critical point the harmonic ladder of the collapse branch (k = 0)
    is used, since the closed forms on either side have all dropped to it.
    """
    e = effective_params(params)
    regime = classify_regime(e)
    if regime.is_critical:
        levels = cv.collapse_levels(e, n_max=max(n_max, count), k_values=[0.0])
    else:
        levels = cv.cv_levels(e, n_max=n_max, m_max=m_max)
    energies: list[float] = []
    for lv in levels:
        energies.extend([lv.energy] * lv.degeneracy)
        if len(energies) >= count:
            break
    if len(energies) < count:
        raise ValueError(
            f"caps n_max={n_max}, m_max={m_max} yield only {len(energies)} levels, need {count}"
        )
    arr = np.array(energies[:count])
    rel = arr - arr[0]
    rel[0] = 0.0
    return rel, regime


def run_point(
    params: ModelParams,
    k: int,
    n_max: int = 24,
    m_max: int = 24,
    solver: str = "auto",
    with_vectors: bool = False,
) -> SweepRecord:
    """Exact and closed-form relative levels at a single parameter point."""
    basis = fock.build_basis(params.N_a, params.N_b)
    H = fock.build_hamiltonian(params, basis)
    spectrum = exact.lowest_eigenpairs(H, k, method=solver, with_vectors=with_vectors)
    exact_rel = exact.relative_levels(spectrum)
    min_gap = float(np.min(np.diff(spectrum.eigenvalues))) if k >= 2 else math.nan
    cv_rel, regime = cv_relative_levels(params, k, n_max, m_max)
    return SweepRecord(W=params.W, exact_rel=exact_rel, cv_rel=cv_rel, min_gap=min_gap, regime=regime)


def sweep_coupling(cfg: RunConfig) -> list[SweepRecord]:
    """Sweep W; per-point failures become error-marked records, not aborts."""
    if cfg.sweep is None:
        raise ValueError("config carries no sweep specification")
    records = []
    for W in cfg.sweep.values():
        params = cfg.params.replace_W(float(W))
        regime = classify_regime(effective_params(params))
        try:
            rec = run_point(params, cfg.levels, cfg.n_max, cfg.m_max, cfg.solver)
        except Exception as err:  # record and continue: a sweep survives bad points
            rec = SweepRecord(W=float(W), exact_rel=None, cv_rel=None,
                              min_gap=math.nan, regime=regime, error=str(err))
        records.append(rec)
    return records


@dataclass(frozen=True)
class CollapseEstimate:
    """Location of the minimum exact interlevel gap along a sweep."""

    W: float
    gap: float
    at_boundary: bool
    W_grid: np.ndarray
    gap_grid: np.ndarray


def locate_collapse(records: list[SweepRecord]) -> CollapseEstimate:
    """Quadratic interpolation of the gap minimum through its three bracketing points."""
    clean = [r for r in records if r.error is None and math.isfinite(r.min_gap)]
    if len(clean) < 3:
        raise ValueError("need at least 3 valid records spanning the gap minimum")
    W = np.array([r.W for r in clean])
    gap = np.array([r.min_gap for r in clean])
    order = np.argsort(W)
    W, gap = W[order], gap[order]
    i = int(np.argmin(gap))
    if i == 0 or i == len(W) - 1:
        return CollapseEstimate(W=float(W[i]), gap=float(gap[i]), at_boundary=True,
                                W_grid=W, gap_grid=gap)
    # vertex of the parabola through the three bracketing points
    x0, x1, x2 = W[i - 1 : i + 2]
    g0, g1, g2 = gap[i - 1 : i + 2]
    num = (x1 - x0) ** 2 * (g1 - g2) - (x1 - x2) ** 2 * (g1 - g0)
    den = (x1 - x0) * (g1 - g2) - (x1 - x2) * (g1 - g0)
    W_star = x1 if den == 0.0 else x1 - 0.5 * num / den
    return CollapseEstimate(W=float(W_star), gap=float(g1), at_boundary=False,
                            W_grid=W, gap_grid=gap)


@dataclass
class ComparisonReport:
    """Per-level deviations between exact and closed-form relative levels."""

    abs_dev: np.ndarray
    rel_dev: np.ndarray
    max_abs: float
    mean_abs: float
    max_rel: float
    mean_rel: float
    overlaps: list[float] = field(default_factory=list)
    fit_exponent: float | None = None


def compare_spectra(exact_levels, cv_levels, count: int) -> ComparisonReport:
    """Pairwise deviations of the first `count` relative levels, matched by sorted order."""
    ex = np.asarray(exact_levels, dtype=float)
    ap = np.asarray(cv_levels, dtype=float)
    if len(ex) < count or len(ap) < count:
        raise ValueError(f"need at least {count} levels on both sides")
    ex, ap = ex[:count], ap[:count]
    abs_dev = np.abs(ap - ex)
    denom = np.maximum(np.abs(ex), 1e-300)
    rel_dev = np.where(abs_dev == 0.0, 0.0, abs_dev / denom)
    return ComparisonReport(
        abs_dev=abs_dev,
        rel_dev=rel_dev,
        max_abs=float(abs_dev.max()),
        mean_abs=float(abs_dev.mean()),
        max_rel=float(rel_dev.max()),
        mean_rel=float(rel_dev.mean()),
    )


def density_overlap(a: exact.AmplitudeGrid, b: exact.AmplitudeGrid) -> float:
    """Bhattacharyya coefficient sum(sqrt(a*b)) in [0, 1]; 1 iff identical."""
    if a.shape != b.shape:
        raise ValueError(f"grid shapes differ: {a.shape} vs {b.shape}")
    return float(np.sum(np.sqrt(a.values * b.values)))


def grid_peaks(grid: exact.AmplitudeGrid, rel_height: float = 0.2) -> list[tuple[int, int]]:
    """Cells strictly above their 8 neighbors and above rel_height * max."""
    padded = np.pad(grid.values, 1, constant_values=-1.0)
    center = padded[1:-1, 1:-1]
    mask = np.ones_like(center, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            rows = slice(1 + di, padded.shape[0] - 1 + di)
            cols = slice(1 + dj, padded.shape[1] - 1 + dj)
            mask &= center > padded[rows, cols]
    mask &= center >= rel_height * center.max()
    return [(int(i), int(j)) for i, j in np.argwhere(mask)]


def fit_deviation_exponent(N_values, deviations) -> float:
    """Power-law exponent p with deviation ~ N^(-p), from a log-log fit."""
    N = np.asarray(N_values, dtype=float)
    dev = np.asarray(deviations, dtype=float)
    if len(N) < 2 or np.any(dev <= 0.0):
        raise ValueError("need >= 2 points with positive deviations")
    slope = np.polyfit(np.log(N), np.log(dev), 1)[0]
    return float(-slope)


def write_levels_csv(records: list[SweepRecord], stream) -> None:
    """levels.csv: one row per (W, level index); failed points get index -1 and the error."""
    stream.write("W,index,exact_rel,cv_rel,regime\n")
    for rec in records:
        if rec.error is not None:
            stream.write(f"{rec.W:.15g},-1,nan,nan,error:{rec.error}\n")
            continue
        for i, (ex, ap) in enumerate(zip(rec.exact_rel, rec.cv_rel)):
            stream.write(f"{rec.W:.15g},{i},{ex:.15g},{ap:.15g},{rec.regime}\n")


def write_collapse_json(estimate: CollapseEstimate, stream) -> None:
    json.dump(
        {
            "W_estimate": estimate.W,
            "min_gap": estimate.gap,
            "at_boundary": estimate.at_boundary,
            "W_grid": [float(v) for v in estimate.W_grid],
            "gap_grid": [float(v) for v in estimate.gap_grid],
        },
        stream,
        indent=2,
    )
    stream.write("\n")


def write_report_json(report: ComparisonReport, stream, extra: dict | None = None) -> None:
    payload = {
        "abs_dev": [float(v) for v in report.abs_dev],
        "rel_dev": [float(v) for v in report.rel_dev],
        "max_abs": report.max_abs,
        "mean_abs": report.mean_abs,
        "max_rel": report.max_rel,
        "mean_rel": report.mean_rel,
        "overlaps": report.overlaps,
        "fit_exponent": report.fit_exponent,
    }
    if extra:
        payload.update(extra)
    json.dump(payload, stream, indent=2)
    stream.write("\n")
