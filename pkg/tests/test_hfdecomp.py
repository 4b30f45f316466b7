"""Unit tests for the surprise decomposition module.

Expected values come from independent constructions: an SVD-based
principal component, a brute-force scan over orthogonal splits of the
composite surprise, and planted two-factor data.
"""

import math

import numpy as np
import pytest

from fomcspill import (
    CollinearSurprisesError,
    DegenerateInputError,
    InputError,
    SurprisePair,
    SurprisePanel,
    admissible_angle_interval,
    angle_from_variance_ratio,
    decompose_at,
    decompose_at_angle,
    pca_composite,
    poor_mans_decompose,
    rotation_grid,
)
from fomcspill.hfdecomp import read_shock_csv, read_surprise_csv, write_shock_csv


def make_dates(n):
    base = np.datetime64("2004-01-15")
    return tuple(str(base + 31 * k) for k in range(n))


def random_pair(rng, T=120, c_mp=-1.0, c_id=1.0, scale_mp=1.0, scale_id=0.7):
    """Planted pair with exactly orthogonal factors; returns (pair, u_mp, u_id)."""
    u_mp = rng.standard_normal(T) * scale_mp
    raw = rng.standard_normal(T) * scale_id
    u_id = raw - (raw @ u_mp) / (u_mp @ u_mp) * u_mp
    pair = SurprisePair(i_total=u_mp + u_id, s=c_mp * u_mp + c_id * u_id)
    return pair, u_mp, u_id


def corr(a, b):
    return np.corrcoef(a, b)[0, 1]


# ---------------------------------------------------------------------------
# pca_composite


def test_pca_single_column_is_demeaned_input():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(40)
    panel = SurprisePanel(make_dates(40), x[:, None], rng.standard_normal(40))
    out = pca_composite(panel)
    assert np.allclose(out, x - x.mean(), atol=0, rtol=0)


def test_pca_duplicated_columns_correlate_perfectly():
    rng = np.random.default_rng(1)
    x = rng.standard_normal(60)
    panel = SurprisePanel(make_dates(60), np.column_stack([x, x]), np.zeros(60))
    out = pca_composite(panel)
    assert abs(corr(out, x) - 1.0) < 1e-12


def test_pca_matches_svd_oracle_and_recovers_planted_factor():
    rng = np.random.default_rng(2)
    T, K = 50, 5
    factor = rng.standard_normal(T)
    loadings = np.array([1.0, 0.9, 1.1, 0.8, 1.2])
    X = factor[:, None] * loadings + 0.05 * rng.standard_normal((T, K))
    panel = SurprisePanel(make_dates(T), X, np.zeros(T))
    out = pca_composite(panel)

    # oracle: first right singular vector of the demeaned matrix
    Xd = X - X.mean(axis=0)
    _, _, vt = np.linalg.svd(Xd, full_matrices=False)
    oracle = Xd @ vt[0]
    if oracle @ Xd[:, 0] < 0:
        oracle = -oracle
    oracle *= X[:, 0].std(ddof=1) / oracle.std(ddof=1)

    assert np.allclose(out, oracle, atol=1e-10)
    assert corr(out, factor) > 0.99
    assert abs(out.std(ddof=1) - X[:, 0].std(ddof=1)) < 1e-12


def test_pca_sign_convention_flips_with_first_column():
    rng = np.random.default_rng(3)
    factor = rng.standard_normal(80)
    X = factor[:, None] * np.array([-1.0, 0.9, 1.1])
    panel = SurprisePanel(make_dates(80), X, np.zeros(80))
    out = pca_composite(panel)
    assert corr(out, X[:, 0]) > 0.99


def test_pca_zero_variance_errors():
    panel = SurprisePanel(make_dates(3), np.ones((3, 2)), np.zeros(3))
    with pytest.raises(DegenerateInputError):
        pca_composite(panel)


# ---------------------------------------------------------------------------
# admissible interval


def brute_force_interval(pair, n_grid=20000):
    """Scan orthogonal splits of i_total built from an SVD basis of [i_total, s].

    Every split of i_total into a projection and its residual within the
    column space is a candidate decomposition; the admissible ones are
    those whose implied equity loadings satisfy c_mp < 0 < c_id. Each
    admissible split is mapped to its angle via the variance-share
    identity cos^2(a) = |i_mp|^2 / |i_total|^2.
    """
    M = np.column_stack([pair.i_total, pair.s])
    basis, *_ = np.linalg.svd(M, full_matrices=False)
    tot2 = pair.i_total @ pair.i_total
    angles = []
    for theta in np.linspace(0.0, math.pi, n_grid, endpoint=False):
        g = math.cos(theta) * basis[:, 0] + math.sin(theta) * basis[:, 1]
        i_mp = (pair.i_total @ g) * g
        i_id = pair.i_total - i_mp
        n_mp, n_id = i_mp @ i_mp, i_id @ i_id
        if n_mp < 1e-12 * tot2 or n_id < 1e-12 * tot2:
            continue
        coef, *_ = np.linalg.lstsq(np.column_stack([i_mp, i_id]), pair.s, rcond=None)
        if coef[0] < 0.0 < coef[1]:
            angles.append(math.acos(min(1.0, math.sqrt(n_mp / tot2))))
    return min(angles), max(angles)


def test_interval_matches_brute_force_scan():
    rng = np.random.default_rng(4)
    for case in range(6):
        pair, _, _ = random_pair(
            rng,
            T=90,
            c_mp=-float(rng.uniform(0.3, 2.0)),
            c_id=float(rng.uniform(0.3, 2.0)),
            scale_id=float(rng.uniform(0.4, 1.5)),
        )
        lo, hi = admissible_angle_interval(pair)
        bf_lo, bf_hi = brute_force_interval(pair)
        tol = math.pi / 20000 * 4
        assert abs(lo - bf_lo) < tol, f"case {case}: lower bound {lo} vs scan {bf_lo}"
        assert abs(hi - bf_hi) < tol, f"case {case}: upper bound {hi} vs scan {bf_hi}"


def test_interval_orthogonal_pair_spans_full_quadrant():
    rng = np.random.default_rng(5)
    u = rng.standard_normal(200)
    v = rng.standard_normal(200)
    v -= (v @ u) / (u @ u) * u
    pair = SurprisePair(i_total=u, s=v)  # s orthogonal to i_total => r12 = 0
    lo, hi = admissible_angle_interval(pair)
    assert lo == 0.0
    assert abs(hi - math.pi / 2) < 1e-14


def test_interval_contains_planting_angle_and_signs_hold_inside():
    rng = np.random.default_rng(6)
    pair, u_mp, u_id = random_pair(rng, T=150, c_mp=-0.5, c_id=2.0)
    lo, hi = admissible_angle_interval(pair)
    alpha_true = math.atan2(math.sqrt(u_id @ u_id), math.sqrt(u_mp @ u_mp))
    assert lo < alpha_true < hi
    for w in np.linspace(0.001, 0.999, 100):
        dec = decompose_at(pair, float(w))
        assert dec.c_mp < 0.0 < dec.c_id


# ---------------------------------------------------------------------------
# decompose_at


def assert_identities(pair, dec, tol=1e-10):
    scale = max(1.0, float(np.max(np.abs(pair.i_total))), float(np.max(np.abs(pair.s))))
    assert np.max(np.abs(dec.i_mp + dec.i_id - pair.i_total)) < tol * scale
    norm = math.sqrt((dec.i_mp @ dec.i_mp) * (dec.i_id @ dec.i_id))
    assert abs(dec.i_mp @ dec.i_id) < 1e-10 * max(norm, 1e-300)
    recon = np.column_stack([dec.i_mp, dec.i_id]) @ np.array(
        [[1.0, dec.c_mp], [1.0, dec.c_id]]
    )
    assert np.max(np.abs(recon - np.column_stack([pair.i_total, pair.s]))) < tol * scale


def test_decompose_identities_random_pairs():
    rng = np.random.default_rng(7)
    for _ in range(25):
        pair, _, _ = random_pair(rng, T=int(rng.integers(10, 200)))
        w = float(rng.uniform(0.05, 0.95))
        dec = decompose_at(pair, w)
        assert_identities(pair, dec)
        assert dec.w == w


def test_decompose_recovers_planted_factors_at_true_angle():
    rng = np.random.default_rng(8)
    pair, u_mp, u_id = random_pair(rng, T=200, c_mp=-1.0, c_id=1.0)
    alpha_true = math.atan2(math.sqrt(u_id @ u_id), math.sqrt(u_mp @ u_mp))
    dec = decompose_at_angle(pair, alpha_true)
    assert corr(dec.i_mp, u_mp) > 0.999
    assert corr(dec.i_id, u_id) > 0.999
    assert abs(dec.c_mp - (-1.0)) < 1e-8
    assert abs(dec.c_id - 1.0) < 1e-8
    # same split through the w route
    lo, hi = admissible_angle_interval(pair)
    dec_w = decompose_at(pair, (alpha_true - lo) / (hi - lo))
    assert np.allclose(dec_w.i_mp, dec.i_mp, atol=1e-12)


def test_variance_share_equals_cos_squared_alpha():
    rng = np.random.default_rng(9)
    pair, _, _ = random_pair(rng, T=80)
    for w in (0.1, 0.5, 0.9):
        dec = decompose_at(pair, w)
        share = (dec.i_mp @ dec.i_mp) / (pair.i_total @ pair.i_total)
        assert abs(share - math.cos(dec.alpha) ** 2) < 1e-8
        assert abs(angle_from_variance_ratio(share) - dec.alpha) < 1e-8


def test_decompose_scale_invariance():
    rng = np.random.default_rng(10)
    pair, _, _ = random_pair(rng, T=60)
    k = 3.7
    scaled = SurprisePair(i_total=k * pair.i_total, s=k * pair.s)
    d1 = decompose_at(pair, 0.3)
    d2 = decompose_at(scaled, 0.3)
    assert np.allclose(d2.i_mp, k * d1.i_mp, rtol=1e-12, atol=0)
    assert abs(d2.alpha - d1.alpha) < 1e-12
    assert abs(d2.c_mp - d1.c_mp) < 1e-12
    assert abs(d2.c_id - d1.c_id) < 1e-12


def test_decompose_deterministic():
    rng = np.random.default_rng(11)
    pair, _, _ = random_pair(rng)
    a = decompose_at(pair, 0.5)
    b = decompose_at(pair, 0.5)
    assert np.array_equal(a.i_mp, b.i_mp)
    assert np.array_equal(a.i_id, b.i_id)


def test_decompose_rejects_bad_w():
    rng = np.random.default_rng(12)
    pair, _, _ = random_pair(rng)
    for w in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(InputError):
            decompose_at(pair, w)


def test_decompose_at_angle_outside_interval_errors():
    rng = np.random.default_rng(13)
    pair, _, _ = random_pair(rng)
    lo, hi = admissible_angle_interval(pair)
    with pytest.raises(InputError):
        decompose_at_angle(pair, hi + 0.1)


def test_collinear_pair_errors():
    rng = np.random.default_rng(14)
    x = rng.standard_normal(50)
    with pytest.raises(CollinearSurprisesError):
        admissible_angle_interval(SurprisePair(i_total=x, s=2.0 * x))


def test_pair_validation():
    with pytest.raises(InputError):
        SurprisePair(i_total=np.array([1.0]), s=np.array([1.0]))
    with pytest.raises(InputError):
        SurprisePair(i_total=np.array([1.0, 2.0]), s=np.array([1.0]))
    with pytest.raises(DegenerateInputError):
        SurprisePair(i_total=np.zeros(5), s=np.ones(5))
    with pytest.raises(InputError):
        SurprisePair(i_total=np.array([1.0, np.nan]), s=np.array([1.0, 2.0]))


def test_panel_date_validation():
    with pytest.raises(InputError):
        SurprisePanel(("2004-13-01", "2004-02-01"), np.ones((2, 1)), np.zeros(2))
    with pytest.raises(InputError):
        SurprisePanel(("2004-02-01", "2004-01-01"), np.ones((2, 1)), np.zeros(2))


# ---------------------------------------------------------------------------
# poor man's split


def test_poor_mans_branches():
    pair = SurprisePair(
        i_total=np.array([0.10, 0.10, -0.05, 0.08]),
        s=np.array([-0.5, 0.5, -0.2, 0.0]),
    )
    out = poor_mans_decompose(pair)
    # opposite signs -> monetary
    assert out.i_mp[0] == 0.10 and out.i_id[0] == 0.0
    # same signs -> informational
    assert out.i_mp[1] == 0.0 and out.i_id[1] == 0.10
    assert out.i_mp[2] == 0.0 and out.i_id[2] == -0.05
    # zero equity product counts as monetary
    assert out.i_mp[3] == 0.08 and out.i_id[3] == 0.0
    assert np.array_equal(out.i_mp + out.i_id, pair.i_total)


# ---------------------------------------------------------------------------
# angle_from_variance_ratio


def test_angle_from_variance_ratio_reference_points():
    assert angle_from_variance_ratio(1.0) == 0.0
    assert abs(angle_from_variance_ratio(0.25) - math.pi / 3) < 1e-12
    assert abs(angle_from_variance_ratio(0.88) - 0.3537) < 1e-4


def test_angle_from_variance_ratio_domain():
    for bad in (0.0, -0.1, 1.0001):
        with pytest.raises(InputError):
            angle_from_variance_ratio(bad)


# ---------------------------------------------------------------------------
# rotation grid


def test_rotation_grid_positions_and_signs():
    rng = np.random.default_rng(15)
    pair, _, _ = random_pair(rng, T=100)
    grid = rotation_grid(pair, n=99)
    assert len(grid) == 99
    ws = [d.w for d in grid]
    assert np.allclose(ws, np.arange(1, 100) / 100.0)
    alphas = np.array([d.alpha for d in grid])
    assert np.all(np.diff(alphas) > 0)
    shares = np.array([(d.i_mp @ d.i_mp) / (pair.i_total @ pair.i_total) for d in grid])
    assert np.all(np.diff(shares) < 0)  # larger angle, smaller monetary share
    for d in grid:
        assert d.c_mp < 0.0 < d.c_id


def test_rotation_grid_size_one_is_median_rotation():
    rng = np.random.default_rng(16)
    pair, _, _ = random_pair(rng, T=70)
    (only,) = rotation_grid(pair, n=1)
    med = decompose_at(pair, 0.5)
    assert np.array_equal(only.i_mp, med.i_mp)
    assert only.w == 0.5


# ---------------------------------------------------------------------------
# CSV round trips


def test_shock_csv_round_trip(tmp_path):
    rng = np.random.default_rng(17)
    pair, _, _ = random_pair(rng, T=30)
    dec = decompose_at(pair, 0.5)
    dates = make_dates(30)
    path = tmp_path / "shocks.csv"
    write_shock_csv(path, dates, pair.i_total, dec.i_mp, dec.i_id)
    rdates, names, vals = read_shock_csv(path)
    assert rdates == list(dates)
    assert names == ["i_total", "i_mp", "i_id"]
    write_shock_csv(tmp_path / "again.csv", rdates, vals[:, 0], vals[:, 1], vals[:, 2])
    assert (tmp_path / "again.csv").read_bytes() == path.read_bytes()


def test_surprise_csv_schema_errors(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("date,foo\n2004-01-15,1.0\n")
    with pytest.raises(InputError):
        read_surprise_csv(p)
