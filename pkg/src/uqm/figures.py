"""Curve tables behind the figures. Each builder returns (columns, rows) from library calls only."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .comparison import ComparisonConfig, coherent_compare_prob, compare_avg_success, compare_prob_pure
from .optics import (detector_curves, multi_round_success, noisy_averages, reliability,
                     splitting_strategy, ui_closed)
from .ui import hayashi_prob, swap_based_prob

# intensities (photons per pulse) used for the experimental-curve tables
C2_INTENSITIES = (0.5, 1.33, 2.0)
C3_INTENSITIES = (1.33, 0.665)
C5_INTENSITY = 1.33
DETECTOR_EFFICIENCY = 0.53
FIG417_SIGMAS = (0.1, 0.25, 0.5)
FIG418_SIGMA = 0.25


@dataclass(frozen=True)
class Table:
    columns: tuple[str, ...]
    data: np.ndarray  # shape (rows, columns)
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class FigureSpec:
    build: Callable[..., Table]
    default_range: tuple[float, float, float]
    takes: tuple[str, ...] = ()


def grid(start: float, stop: float, step: float) -> np.ndarray:
    """Inclusive arithmetic grid; the count is rounded so float steps do not drop the end point."""
    if step <= 0 or stop < start:
        raise ValueError("range needs start <= stop and a positive step")
    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(n)


def phase_delta2(i1: float, i2: float, phase_deg) -> np.ndarray:
    """|alpha1 - alpha2|^2 for intensities i1, i2 and relative phase in degrees."""
    ph = np.deg2rad(np.asarray(phase_deg, dtype=float))
    return i1 + i2 - 2 * np.sqrt(i1 * i2) * np.cos(ph)


def fig_4_3(x: np.ndarray, copies: Sequence[int] = (1, 2, 3, 4)) -> Table:
    cols, data = ["overlap_sq [1]"], [x]
    for k in copies:
        cols.append(f"P_pure_k{k} [1]")
        data.append(compare_prob_pure(k, k, x))
    for k in copies:
        cols.append(f"P_coherent_k{k} [1]")
        data.append(coherent_compare_prob(k, k, x))
    return Table(tuple(cols), np.column_stack(data), {"copies": list(copies)})


def fig_4_4(d: np.ndarray, copies: Sequence[int] = (1, 2, 3, 4)) -> Table:
    dims = np.rint(d).astype(int)
    if np.any(dims < 1):
        raise ValueError("dimensions must be positive")
    cols, data = ["d [1]"], [dims.astype(float)]
    for k in copies:
        cols.append(f"P_mean_k{k} [1]")
        data.append(np.array([compare_avg_success(ComparisonConfig(int(n), k, k)) for n in dims]))
    return Table(tuple(cols), np.column_stack(data), {"copies": list(copies)})


def fig_4_8(delta: np.ndarray) -> Table:
    d2 = delta**2
    x = np.exp(-d2)
    cols = ("delta [amplitude]", "P_sb [1]", "P_opt [1]", "P_bs [1]", "P_known [1]")
    data = np.column_stack([delta, swap_based_prob(0.5, 0.5, x), hayashi_prob(x),
                            ui_closed(1, 1, d2), 1 - np.exp(-d2 / 2)])
    return Table(cols, data)


def fig_4_15(delta: np.ndarray, rounds: Sequence[int] = (1, 20, 40, 60, 80)) -> Table:
    p = multi_round_success(max(rounds), delta**2)
    cols = ["delta [amplitude]"] + [f"P_round{r} [1]" for r in rounds]
    data = np.column_stack([delta] + [p[r - 1] for r in rounds])
    return Table(tuple(cols), data, {"rounds": list(rounds)})


def fig_4_16(delta: np.ndarray, N: Sequence[int] = (2, 4, 6, 8, 10)) -> Table:
    d2 = delta**2
    p = multi_round_success(max(N), d2)
    cols = ["delta [amplitude]"] + [f"P_rec_minus_split_N{n} [1]" for n in N]
    data = np.column_stack([delta] + [p[n - 1] - splitting_strategy(n, d2) for n in N])
    return Table(tuple(cols), data, {"N": list(N)})


def fig_4_17(xi: np.ndarray, sigmas: Sequence[float] = FIG417_SIGMAS) -> Table:
    cols = ["xi [amplitude]"] + [f"R_sigma{s:g} [1]" for s in sigmas]
    data = np.column_stack([xi] + [np.array([reliability(1, 1, s, v) for v in xi]) for s in sigmas])
    return Table(tuple(cols), data, {"sigmas": list(sigmas), "n": 1})


def fig_4_18(xi: np.ndarray, sigma: float = FIG418_SIGMA) -> Table:
    r = np.array([reliability(1, 1, sigma, v) for v in xi])
    avg = np.array([noisy_averages(1, 1, sigma, v) for v in xi])
    cols = ("xi [amplitude]", "R [1]", "P_success [1]", "P_error [1]", "P_failure [1]")
    return Table(cols, np.column_stack([xi, r, avg]), {"sigma": sigma, "n": 1})


def fig_c_2(phase: np.ndarray, intensities: Sequence[float] = C2_INTENSITIES) -> Table:
    cols, data = ["phase [deg]"], [phase]
    for i in intensities:
        p1, p2 = detector_curves(0.5, DETECTOR_EFFICIENCY, phase_delta2(i, i, phase))
        cols += [f"p1_I{i:g} [1]", f"p2_I{i:g} [1]"]
        data += [p1, p2]
    return Table(tuple(cols), np.column_stack(data),
                 {"intensities": list(intensities), "efficiency": DETECTOR_EFFICIENCY})


def fig_c_3(phase: np.ndarray, intensities: Sequence[float] = C3_INTENSITIES) -> Table:
    i1, i2 = intensities
    p1, p2 = detector_curves(0.5, DETECTOR_EFFICIENCY, phase_delta2(i1, i2, phase))
    return Table(("phase [deg]", "p1 [1]", "p2 [1]"), np.column_stack([phase, p1, p2]),
                 {"intensities": list(intensities), "efficiency": DETECTOR_EFFICIENCY})


def fig_c_4(intensity: np.ndarray) -> Table:
    d2 = phase_delta2(intensity, intensity, 180.0)
    p_eta, _ = detector_curves(0.5, DETECTOR_EFFICIENCY, d2)
    p_ideal, _ = detector_curves(0.5, 1.0, d2)
    cols = ("intensity [photons/pulse]", f"P_eta{DETECTOR_EFFICIENCY:g} [1]", "P_ideal [1]")
    return Table(cols, np.column_stack([intensity, p_eta, p_ideal]),
                 {"efficiency": DETECTOR_EFFICIENCY})


def fig_c_5(ratio: np.ndarray) -> Table:
    i2 = C5_INTENSITY * ratio
    p180, _ = detector_curves(0.5, DETECTOR_EFFICIENCY, phase_delta2(C5_INTENSITY, i2, 180.0))
    p0, _ = detector_curves(0.5, DETECTOR_EFFICIENCY, phase_delta2(C5_INTENSITY, i2, 0.0))
    cols = ("intensity_ratio [1]", "P_phase180 [1]", "P_phase0 [1]")
    return Table(cols, np.column_stack([ratio, p180, p0]),
                 {"intensity1": C5_INTENSITY, "efficiency": DETECTOR_EFFICIENCY})


FIGURES: dict[str, FigureSpec] = {
    "4.3": FigureSpec(fig_4_3, (0.0, 1.0, 0.01)),
    "4.4": FigureSpec(fig_4_4, (2.0, 30.0, 1.0)),
    "4.8": FigureSpec(fig_4_8, (0.0, 3.0, 0.05)),
    "4.15": FigureSpec(fig_4_15, (0.0, 40.0, 0.2), ("rounds",)),
    "4.16": FigureSpec(fig_4_16, (0.0, 20.0, 0.1), ("N",)),
    "4.17": FigureSpec(fig_4_17, (0.05, 5.0, 0.05)),
    "4.18": FigureSpec(fig_4_18, (0.05, 5.0, 0.05)),
    "C.2": FigureSpec(fig_c_2, (0.0, 360.0, 5.0)),
    "C.3": FigureSpec(fig_c_3, (0.0, 360.0, 5.0)),
    "C.4": FigureSpec(fig_c_4, (0.0, 3.0, 0.05)),
    "C.5": FigureSpec(fig_c_5, (0.0, 2.0, 0.05)),
}


def build_figure(name: str, rng: tuple[float, float, float] | None = None, **kw) -> Table:
    if name not in FIGURES:
        raise KeyError(name)
    spec = FIGURES[name]
    extra = {k: v for k, v in kw.items() if k in spec.takes and v is not None}
    return spec.build(grid(*(rng or spec.default_range)), **extra)
