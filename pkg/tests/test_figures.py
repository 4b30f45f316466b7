"""Figure construction and byte-stable PNG output."""

import numpy as np
import pytest

from fomcspill.errors import InputError
from fomcspill.figures import (
    _median_and_pairs,
    irf_fan_figure,
    lp_band_figure,
    rotation_band_figure,
    save_figure,
    shock_series_figure,
)
from fomcspill.localproj import LpResult
from fomcspill.pbvar import IrfResult, RotationBandResult


def _toy_irf(n_shock=2, n_var=3, H=6):
    rng = np.random.default_rng(5)
    pcts = (5.0, 16.0, 50.0, 84.0, 95.0)
    raw = rng.normal(size=(n_shock, n_var, H + 1, len(pcts)))
    values = np.sort(raw, axis=3)
    return IrfResult(
        shock_names=tuple(f"s{i}" for i in range(n_shock)),
        var_names=tuple(f"v{j}" for j in range(n_var)),
        percentiles=pcts,
        values=values,
        n_draws=100,
        n_rejected=0,
    )


def _toy_lp(outcome):
    rng = np.random.default_rng(11)
    H = 4
    return LpResult(
        outcome=outcome,
        spec="pooled",
        shock_names=("i_mp", "i_id"),
        beta_mp=rng.normal(size=H + 1),
        beta_id=rng.normal(size=H + 1),
        se_mp=np.abs(rng.normal(size=H + 1)) + 0.1,
        se_id=np.abs(rng.normal(size=H + 1)) + 0.1,
        scale=(1.0, 0.5),
        n_obs=np.full(H + 1, 50),
        cov_truncated=(False,) * (H + 1),
        dropped_columns=(),
    )


def test_median_and_pairs_selection():
    mid, pairs = _median_and_pairs((5.0, 16.0, 50.0, 84.0, 95.0))
    assert mid == 2
    assert pairs == [(0, 4), (1, 3)]
    mid, pairs = _median_and_pairs((50.0,))
    assert mid == 0 and pairs == []


def test_pngs_written_and_deterministic(tmp_path):
    dates = [f"2010-{m:02d}-15" for m in range(1, 9)]
    rng = np.random.default_rng(3)
    series = rng.normal(size=(3, 8))
    figs = {
        "shocks": shock_series_figure(dates, series[0], series[1], series[2]),
        "irf": irf_fan_figure(_toy_irf(), title="responses"),
        "lp": lp_band_figure([_toy_lp("ner"), _toy_lp("ip")]),
        "rot": rotation_band_figure(
            RotationBandResult(
                pooled=_toy_irf(),
                grid_w=np.linspace(0.1, 0.9, 5),
                grid_medians=np.random.default_rng(2).normal(size=(5, 2, 3, 7)),
                n_available=500,
                n_pooled=200,
            )
        ),
    }
    for name, fig in figs.items():
        first = tmp_path / f"{name}_a.png"
        second = tmp_path / f"{name}_b.png"
        save_figure(fig, first)
        save_figure(fig, second)
        data = first.read_bytes()
        assert data[:8] == b"\x89PNG\r\n\x1a\n"
        assert len(data) > 1000
        assert data == second.read_bytes()


def test_shock_series_length_mismatch():
    with pytest.raises(InputError):
        shock_series_figure(["2010-01-15"], [0.1, 0.2], [0.1], [0.0])


def test_lp_band_figure_empty_errors():
    with pytest.raises(InputError):
        lp_band_figure([])
