"""Figure rendering for shock series, impulse-response fans, and
projection bands.

Figures are built directly on :class:`matplotlib.figure.Figure` so no
interactive backend is touched. PNG output strips the writer metadata
so repeated runs produce identical bytes.
"""

from __future__ import annotations

import numpy as np
from matplotlib.figure import Figure

from .errors import InputError

_FILL = "#4878a8"
_LINE = "#1f3d5c"


def save_figure(fig: Figure, path) -> None:
    """Write a figure as PNG with byte-stable output."""
    fig.savefig(path, format="png", dpi=110, metadata={"Software": None})


def _median_and_pairs(percentiles):
    """Index of the central percentile and (lo, hi) band index pairs.

    Pairs are returned outermost first so fills stack correctly.
    """
    pcts = list(percentiles)
    mid = min(range(len(pcts)), key=lambda i: (abs(pcts[i] - 50.0), i))
    pairs = []
    lo, hi = 0, len(pcts) - 1
    while lo < hi:
        if lo != mid and hi != mid:
            pairs.append((lo, hi))
        lo += 1
        hi -= 1
    return mid, pairs


def shock_series_figure(dates, i_total, i_mp, i_id) -> Figure:
    """Stacked panels with the raw surprise and its two components."""
    n = len(dates)
    if not (len(i_total) == len(i_mp) == len(i_id) == n):
        raise InputError("shock series must share the date grid")
    xs = np.arange(n)
    fig = Figure(figsize=(9.0, 6.0))
    axes = fig.subplots(3, 1, sharex=True)
    for ax, series, label in zip(
        axes, (i_total, i_mp, i_id), ("total surprise", "policy shock", "news shock")
    ):
        ax.bar(xs, np.asarray(series, dtype=float), color=_FILL, width=0.8)
        ax.axhline(0.0, color="black", linewidth=0.6)
        ax.set_ylabel(label)
    step = max(1, n // 8)
    axes[-1].set_xticks(xs[::step])
    axes[-1].set_xticklabels([dates[i] for i in range(0, n, step)], rotation=45)
    fig.tight_layout()
    return fig


def irf_fan_figure(irf, title: str | None = None) -> Figure:
    """Fan chart grid: one row per shock, one column per variable.

    ``irf`` is an IrfResult-like object with ``values`` shaped
    (shock, variable, horizon, percentile).
    """
    n_shock = len(irf.shock_names)
    n_var = len(irf.var_names)
    mid, pairs = _median_and_pairs(irf.percentiles)
    horizons = np.arange(irf.values.shape[2])
    fig = Figure(figsize=(2.6 * n_var + 1.0, 2.4 * n_shock + 0.8))
    axes = np.atleast_2d(fig.subplots(n_shock, n_var, squeeze=False))
    for s in range(n_shock):
        for v in range(n_var):
            ax = axes[s][v]
            cell = irf.values[s, v]
            for depth, (lo, hi) in enumerate(pairs):
                ax.fill_between(
                    horizons,
                    cell[:, lo],
                    cell[:, hi],
                    color=_FILL,
                    alpha=0.25 + 0.2 * depth,
                    linewidth=0,
                )
            ax.plot(horizons, cell[:, mid], color=_LINE, linewidth=1.4)
            ax.axhline(0.0, color="black", linewidth=0.6)
            if s == 0:
                ax.set_title(irf.var_names[v], fontsize=9)
            if v == 0:
                ax.set_ylabel(irf.shock_names[s], fontsize=9)
            if s == n_shock - 1:
                ax.set_xlabel("months")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    return fig


def lp_band_figure(results, multiplier: float = 1.65) -> Figure:
    """Coefficient paths with +/- ``multiplier`` standard error bands.

    ``results`` is a sequence of LpResult objects sharing a horizon
    grid; rows are outcomes, columns the two shocks.
    """
    results = list(results)
    if not results:
        raise InputError("no projection results to plot")
    horizons = np.arange(len(results[0].beta_mp))
    fig = Figure(figsize=(7.0, 2.2 * len(results) + 0.8))
    axes = np.atleast_2d(fig.subplots(len(results), 2, squeeze=False))
    for r, res in enumerate(results):
        series = (
            (res.shock_names[0], res.beta_mp, res.se_mp),
            (res.shock_names[1], res.beta_id, res.se_id),
        )
        for c, (shock, beta, se) in enumerate(series):
            ax = axes[r][c]
            ax.fill_between(
                horizons,
                beta - multiplier * se,
                beta + multiplier * se,
                color=_FILL,
                alpha=0.3,
                linewidth=0,
            )
            ax.plot(horizons, beta, color=_LINE, linewidth=1.4)
            ax.axhline(0.0, color="black", linewidth=0.6)
            if r == 0:
                ax.set_title(shock, fontsize=9)
            if c == 0:
                ax.set_ylabel(res.outcome, fontsize=9)
            if r == len(results) - 1:
                ax.set_xlabel("months")
    fig.tight_layout()
    return fig


def rotation_band_figure(band) -> Figure:
    """Pooled rotation fan with the per-rotation medians overlaid."""
    pooled = band.pooled
    n_shock = len(pooled.shock_names)
    n_var = len(pooled.var_names)
    mid, pairs = _median_and_pairs(pooled.percentiles)
    outer = pairs[0] if pairs else (0, len(pooled.percentiles) - 1)
    horizons = np.arange(pooled.values.shape[2])
    fig = Figure(figsize=(2.6 * n_var + 1.0, 2.4 * n_shock + 0.8))
    axes = np.atleast_2d(fig.subplots(n_shock, n_var, squeeze=False))
    for s in range(n_shock):
        for v in range(n_var):
            ax = axes[s][v]
            cell = pooled.values[s, v]
            ax.fill_between(
                horizons,
                cell[:, outer[0]],
                cell[:, outer[1]],
                color=_FILL,
                alpha=0.3,
                linewidth=0,
            )
            for g in range(band.grid_medians.shape[0]):
                ax.plot(
                    horizons,
                    band.grid_medians[g, s, v],
                    color=_LINE,
                    alpha=0.18,
                    linewidth=0.6,
                )
            ax.plot(horizons, cell[:, mid], color=_LINE, linewidth=1.4)
            ax.axhline(0.0, color="black", linewidth=0.6)
            if s == 0:
                ax.set_title(pooled.var_names[v], fontsize=9)
            if v == 0:
                ax.set_ylabel(pooled.shock_names[s], fontsize=9)
    fig.tight_layout()
    return fig
