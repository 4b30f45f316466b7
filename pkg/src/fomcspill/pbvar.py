"""Pooled Bayesian panel VAR on countries sharing common dynamics.

Each country contributes observations on ``z_t = [shocks_t, y_t]`` and
all countries share the same coefficient matrices and innovation
covariance, so the design matrices are simply stacked across countries.
The posterior is conjugate Normal-inverse-Wishart around a Minnesota
style shrinkage prior (or a diffuse limit), sampled exactly, and
structural responses come from a Cholesky factorization with the shock
block ordered first.

Also provides a mean-group estimator (per-country least squares,
averaged) and the rotation-band protocol that re-estimates the model at
every decomposition on a rotation grid and pools the resulting responses.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace as dc_replace

import numpy as np
import pandas as pd
from scipy.linalg import solve_triangular

from .errors import InputError, NumericalError
from .ioutil import fmt12
from .paneldata import PanelDataset, align_shocks

_REJECT_BUDGET = 0.01  # fraction of draws allowed to fail positive-definiteness


@dataclass(frozen=True)
class PriorConfig:
    """Shrinkage hyperparameters for the Normal-inverse-Wishart prior.

    ``tightness`` scales the prior standard deviation of every lag
    coefficient, ``lag_decay`` is the exponent tightening longer lags,
    ``intercept_looseness`` relaxes the intercept. Prior means are zero
    except the own first lag of endogenous variables (``ar1_mean``);
    shock-block equations get zero means throughout since announcement
    surprises are serially uncorrelated. ``diffuse`` switches to the
    noninformative limit, centering the posterior on least squares.
    """

    tightness: float = 0.1
    lag_decay: float = 1.0
    intercept_looseness: float = 100.0
    ar1_mean: float = 1.0
    diffuse: bool = False

    def __post_init__(self):
        if self.tightness <= 0.0:
            raise InputError(f"tightness must be positive, got {self.tightness}")
        if self.lag_decay < 0.0:
            raise InputError(f"lag_decay must be non-negative, got {self.lag_decay}")
        if self.intercept_looseness <= 0.0:
            raise InputError(
                f"intercept_looseness must be positive, got {self.intercept_looseness}"
            )


@dataclass(frozen=True)
class BvarConfig:
    """Estimation settings shared by the posterior sampler and the IRFs."""

    lags: int = 6
    draws: int = 5000
    burn: int = 500
    horizon: int = 36
    percentiles: tuple[float, ...] = (5.0, 16.0, 50.0, 84.0, 95.0)
    block_exogenous: bool = False
    prior: PriorConfig = field(default_factory=PriorConfig)

    def __post_init__(self):
        object.__setattr__(self, "percentiles", tuple(float(p) for p in self.percentiles))
        if self.lags < 1:
            raise InputError(f"lags must be at least 1, got {self.lags}")
        if self.burn < 0 or self.draws <= self.burn:
            raise InputError(
                f"need draws > burn >= 0, got draws={self.draws}, burn={self.burn}"
            )
        if self.horizon < 0:
            raise InputError(f"horizon must be non-negative, got {self.horizon}")
        ps = self.percentiles
        if not ps or any(not 0.0 < p < 100.0 for p in ps) or any(
            b <= a for a, b in zip(ps, ps[1:])
        ):
            raise InputError(
                f"percentiles must be strictly increasing inside (0, 100), got {ps}"
            )


@dataclass(frozen=True)
class DesignMatrices:
    """Stacked regression form of the panel VAR.

    ``y`` has one row per (country, month) with months ``lags..T-1``;
    ``x`` holds the ``lags`` lagged values of the full ``z`` vector plus
    a trailing intercept column. ``names`` orders ``z`` as shocks first,
    then country variables.
    """

    y: np.ndarray
    x: np.ndarray
    names: tuple[str, ...]
    n_shocks: int
    lags: int

    @property
    def n_eq(self) -> int:
        return self.y.shape[1]


@dataclass(frozen=True)
class PosteriorSample:
    """One posterior draw: coefficients by equation row, and the covariance."""

    coeffs: np.ndarray  # n_eq x (n_eq * lags + 1), lag blocks then intercept
    sigma: np.ndarray   # n_eq x n_eq


@dataclass(frozen=True)
class IrfResult:
    """Percentile summaries of structural impulse responses.

    ``values[s, v, h, p]`` is the response of variable ``v`` at horizon
    ``h`` to a one-standard-deviation innovation in shock ``s``, at
    ``percentiles[p]``.
    """

    shock_names: tuple[str, ...]
    var_names: tuple[str, ...]
    percentiles: tuple[float, ...]
    values: np.ndarray
    n_draws: int
    n_rejected: int = 0


def build_design(dataset: PanelDataset, config: BvarConfig) -> DesignMatrices:
    """Stack per-country lagged design matrices for the pooled VAR."""
    p = config.lags
    T = dataset.n_months
    if T <= p:
        raise InputError(f"panel has {T} months, not enough for {p} lags")
    n_eq = dataset.n_shocks + dataset.n_variables
    blocks_y, blocks_x = [], []
    for i in range(dataset.n_countries):
        z = np.hstack([dataset.shocks, dataset.values[i]])
        rows = T - p
        x = np.empty((rows, n_eq * p + 1))
        for ell in range(1, p + 1):
            x[:, (ell - 1) * n_eq : ell * n_eq] = z[p - ell : T - ell]
        x[:, -1] = 1.0
        blocks_y.append(z[p:])
        blocks_x.append(x)
    names = tuple(dataset.shock_names) + tuple(dataset.variables)
    return DesignMatrices(
        y=np.vstack(blocks_y),
        x=np.vstack(blocks_x),
        names=names,
        n_shocks=dataset.n_shocks,
        lags=p,
    )


def _own_lag_scales(design: DesignMatrices) -> np.ndarray:
    """Residual standard deviations from univariate own-lag regressions."""
    y, x = design.y, design.x
    n_eq = design.n_eq
    scales = np.empty(n_eq)
    for j in range(n_eq):
        regs = np.column_stack([np.ones(len(y)), x[:, j]])  # intercept + own lag 1
        coef, *_ = np.linalg.lstsq(regs, y[:, j], rcond=None)
        resid = y[:, j] - regs @ coef
        dof = max(len(y) - 2, 1)
        scales[j] = np.sqrt(resid @ resid / dof)
    if np.any(scales <= 0.0):
        bad = [design.names[j] for j in np.nonzero(scales <= 0.0)[0]]
        raise NumericalError(f"zero residual scale for {bad}; series are deterministic")
    return scales


def _prior_moments(design: DesignMatrices, config: BvarConfig):
    """Minnesota-style diagonal prior: (B0, prior variances, S0, nu0)."""
    n_eq, p = design.n_eq, design.lags
    k = n_eq * p + 1
    lam1 = config.prior.tightness
    lam3 = config.prior.lag_decay
    lam4 = config.prior.intercept_looseness
    scales = _own_lag_scales(design)

    om0 = np.empty(k)
    for ell in range(1, p + 1):
        for j in range(n_eq):
            om0[(ell - 1) * n_eq + j] = (lam1 / (ell**lam3 * scales[j])) ** 2
    om0[-1] = (lam1 * lam4) ** 2

    b0 = np.zeros((k, n_eq))
    for j in range(design.n_shocks, n_eq):
        b0[j, j] = config.prior.ar1_mean  # own first lag of endogenous variables

    nu0 = n_eq + 2
    s0 = np.diag(scales**2)
    return b0, om0, s0, nu0


def _check_rank(x: np.ndarray) -> None:
    sv = np.linalg.svd(x, compute_uv=False)
    if sv[-1] <= max(x.shape) * np.finfo(float).eps * sv[0]:
        cond = np.inf if sv[-1] == 0.0 else sv[0] / sv[-1]
        raise NumericalError(
            f"design matrix is rank deficient (condition number {cond:.3g})"
        )


def _posterior_moments(y, x, b0, om0, s0, nu0):
    """Conjugate update; returns (precision P, B_bar, S_bar, nu_bar)."""
    prior_prec = np.diag(1.0 / om0)
    prec = x.T @ x + prior_prec
    b_bar = np.linalg.solve(prec, prior_prec @ b0 + x.T @ y)
    s_bar = s0 + y.T @ y + b0.T @ prior_prec @ b0 - b_bar.T @ prec @ b_bar
    s_bar = 0.5 * (s_bar + s_bar.T)
    nu_bar = nu0 + y.shape[0]
    return prec, b_bar, s_bar, nu_bar


def _sqrt_of_inverse(prec: np.ndarray) -> np.ndarray:
    """Matrix M with M @ M.T equal to the inverse of ``prec``."""
    lp = np.linalg.cholesky(prec)
    return solve_triangular(lp, np.eye(lp.shape[0]), lower=True).T


def _draw_sigma(rng, s_bar_chol, nu_bar, n_eq):
    """Inverse-Wishart draw via the Bartlett factorization."""
    a = np.zeros((n_eq, n_eq))
    dfs = nu_bar - np.arange(n_eq)
    a[np.diag_indices(n_eq)] = np.sqrt(rng.chisquare(dfs))
    a[np.tril_indices(n_eq, -1)] = rng.standard_normal(n_eq * (n_eq - 1) // 2)
    f = solve_triangular(a, s_bar_chol.T, lower=True)
    return f.T @ f


def fit_posterior(design: DesignMatrices, config: BvarConfig, seed: int):
    """Sample the Normal-inverse-Wishart posterior of the pooled VAR.

    Returns ``config.draws - config.burn`` posterior samples,
    reproducible from ``seed``. Non-positive-definite covariance draws
    are redrawn; exceeding the 1% budget raises ``NumericalError``.
    """
    y, x = design.y, design.x
    n_eq = design.n_eq
    k = x.shape[1]
    if y.shape[0] <= k + n_eq + 1:
        raise InputError(
            f"{y.shape[0]} stacked observations cannot support {k} regressors "
            f"per equation"
        )
    _check_rank(x)

    if config.block_exogenous:
        return _fit_posterior_blocked(design, config, seed)

    if config.prior.diffuse:
        b_ols, *_ = np.linalg.lstsq(x, y, rcond=None)
        resid = y - x @ b_ols
        prec = x.T @ x
        b_bar = b_ols
        s_bar = resid.T @ resid
        nu_bar = y.shape[0] - k
        if nu_bar <= n_eq + 1:
            raise InputError(
                f"diffuse posterior needs more than {k + n_eq + 1} observations"
            )
    else:
        b0, om0, s0, nu0 = _prior_moments(design, config)
        prec, b_bar, s_bar, nu_bar = _posterior_moments(y, x, b0, om0, s0, nu0)

    try:
        s_bar_chol = np.linalg.cholesky(s_bar)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("posterior scale matrix is not positive definite") from exc
    omega_sqrt = _sqrt_of_inverse(prec)

    rng = np.random.default_rng(seed)
    samples = []
    rejected = 0
    budget = max(1, int(_REJECT_BUDGET * config.draws))
    for _ in range(config.draws):
        while True:
            sigma = _draw_sigma(rng, s_bar_chol, nu_bar, n_eq)
            try:
                sig_chol = np.linalg.cholesky(sigma)
                break
            except np.linalg.LinAlgError:
                rejected += 1
                if rejected > budget:
                    raise NumericalError(
                        f"more than {budget} non-positive-definite covariance draws"
                    ) from None
        zmat = rng.standard_normal((k, n_eq))
        coeffs_t = b_bar + omega_sqrt @ zmat @ sig_chol.T
        samples.append(PosteriorSample(coeffs=coeffs_t.T, sigma=sigma))
    return samples[config.burn :]


def _fit_posterior_blocked(design: DesignMatrices, config: BvarConfig, seed: int):
    """Posterior with the shock block exogenous to country variables.

    Shock-block equations regress only on lagged shocks and the
    intercept; their coefficients on lagged country variables are held
    at zero. The joint covariance is drawn from an inverse-Wishart
    around the combined block residuals, and each block's coefficients
    are drawn conditional on its own covariance block.
    """
    y, x = design.y, design.x
    m, n_eq, p = design.n_shocks, design.n_eq, design.lags
    if m == 0:
        raise InputError("block_exogenous requires at least one shock column")
    k = x.shape[1]
    shock_cols = np.concatenate(
        [np.arange(ell * n_eq, ell * n_eq + m) for ell in range(p)] + [[k - 1]]
    )
    x_s = x[:, shock_cols]
    y_s, y_c = y[:, :m], y[:, m:]

    b0, om0, s0, nu0 = _prior_moments(design, config)
    if config.prior.diffuse:
        raise InputError("block_exogenous is only supported with the shrinkage prior")

    prec_s, bbar_s, _, _ = _posterior_moments(
        y_s, x_s, b0[np.ix_(shock_cols, range(m))], om0[shock_cols], s0[:m, :m], nu0
    )
    prec_c, bbar_c, _, _ = _posterior_moments(
        y_c, x, b0[:, m:], om0, s0[m:, m:], nu0
    )
    resid = np.hstack([y_s - x_s @ bbar_s, y_c - x @ bbar_c])
    s_bar = s0 + resid.T @ resid
    s_bar = 0.5 * (s_bar + s_bar.T)
    nu_bar = nu0 + y.shape[0]

    s_bar_chol = np.linalg.cholesky(s_bar)
    om_sqrt_s = _sqrt_of_inverse(prec_s)
    om_sqrt_c = _sqrt_of_inverse(prec_c)

    rng = np.random.default_rng(seed)
    samples = []
    rejected = 0
    budget = max(1, int(_REJECT_BUDGET * config.draws))
    for _ in range(config.draws):
        while True:
            sigma = _draw_sigma(rng, s_bar_chol, nu_bar, n_eq)
            try:
                np.linalg.cholesky(sigma)
                break
            except np.linalg.LinAlgError:
                rejected += 1
                if rejected > budget:
                    raise NumericalError(
                        f"more than {budget} non-positive-definite covariance draws"
                    ) from None
        chol_ss = np.linalg.cholesky(sigma[:m, :m])
        chol_cc = np.linalg.cholesky(sigma[m:, m:])
        draw_s = bbar_s + om_sqrt_s @ rng.standard_normal((len(shock_cols), m)) @ chol_ss.T
        draw_c = bbar_c + om_sqrt_c @ rng.standard_normal((k, n_eq - m)) @ chol_cc.T
        coeffs = np.zeros((n_eq, k))
        coeffs[:m, shock_cols] = draw_s.T
        coeffs[m:] = draw_c.T
        samples.append(PosteriorSample(coeffs=coeffs, sigma=sigma))
    return samples[config.burn :]


def _irf_draws(samples, config: BvarConfig, n_report: int):
    """Per-draw structural responses, shape (kept draws, n_report, n_eq, H+1).

    Draws whose covariance fails the Cholesky factorization are dropped;
    more than 1% of them is a hard error.
    """
    n_draws = len(samples)
    if n_draws == 0:
        raise InputError("no posterior samples supplied")
    n_eq = samples[0].sigma.shape[0]
    p = config.lags
    horizon = config.horizon

    sigmas = np.stack([s.sigma for s in samples])
    eigmin = np.linalg.eigvalsh(sigmas)[:, 0]
    valid = eigmin > 0.0
    chols = np.zeros_like(sigmas)
    if valid.any():
        try:
            chols[valid] = np.linalg.cholesky(sigmas[valid])
        except np.linalg.LinAlgError:
            for i in np.nonzero(valid)[0]:
                try:
                    chols[i] = np.linalg.cholesky(sigmas[i])
                except np.linalg.LinAlgError:
                    valid[i] = False
    rejected = int(n_draws - valid.sum())
    if rejected > max(1, int(_REJECT_BUDGET * n_draws)):
        raise NumericalError(
            f"{rejected} of {n_draws} covariance draws are not positive definite"
        )
    idx = np.nonzero(valid)[0]
    coeffs = np.stack([samples[i].coeffs for i in idx])
    chols = chols[idx]
    d = len(idx)

    lag_mats = [coeffs[:, :, (ell - 1) * n_eq : ell * n_eq] for ell in range(1, p + 1)]
    phis = np.empty((horizon + 1, d, n_eq, n_eq))
    phis[0] = np.eye(n_eq)
    for h in range(1, horizon + 1):
        acc = np.zeros((d, n_eq, n_eq))
        for ell in range(1, min(h, p) + 1):
            acc += lag_mats[ell - 1] @ phis[h - ell]
        phis[h] = acc
    resp = phis @ chols[None, :, :, :]  # (H+1, d, n_eq, n_eq)
    out = np.transpose(resp[:, :, :, :n_report], (1, 3, 2, 0))
    return out, rejected


def structural_irf(
    samples,
    config: BvarConfig,
    names,
    n_shocks: int,
    report_all: bool = False,
) -> IrfResult:
    """Percentile bands of responses to one-standard-deviation shocks.

    Identification is recursive: the innovation covariance is factored
    with the shock block ordered first, and column ``j`` of the factor
    gives the impact of structural shock ``j``. By default only the
    ``n_shocks`` leading shocks are reported; ``report_all`` keeps every
    column.
    """
    names = tuple(names)
    n_report = len(names) if report_all else n_shocks
    if n_report < 1:
        raise InputError("no shocks to report responses for")
    draws, rejected = _irf_draws(samples, config, n_report)
    values = np.percentile(draws, config.percentiles, axis=0)
    values = np.moveaxis(values, 0, -1)  # (shock, variable, horizon, percentile)
    return IrfResult(
        shock_names=names[:n_report],
        var_names=names,
        percentiles=config.percentiles,
        values=values,
        n_draws=draws.shape[0],
        n_rejected=rejected,
    )


@dataclass(frozen=True)
class MeanGroupResult:
    """Mean-group IRFs with cross-country dispersion bands.

    ``point`` is the response surface of the averaged system (the
    mean-group estimate proper); ``irf`` summarizes the spread of the
    per-country responses at the configured percentiles.
    """

    point: np.ndarray  # (shock, variable, horizon)
    irf: IrfResult
    countries: tuple[str, ...]
    dropped: tuple[str, ...]
    country_irfs: np.ndarray  # (country, shock, variable, horizon)


def mean_group(dataset: PanelDataset, config: BvarConfig) -> MeanGroupResult:
    """Estimate each country separately by least squares and average.

    The point response comes from the averaged coefficients and averaged
    residual covariance; the bands are cross-country percentiles of the
    per-country responses. Countries with rank-deficient designs are
    dropped with a warning; if a multi-country panel loses all but one
    member the estimate is abandoned.
    """
    kept, dropped = [], []
    coeff_list, sigma_list, irf_list = [], [], []
    n_start = dataset.n_countries
    n_eq = dataset.n_shocks + dataset.n_variables
    # with no shock block, report responses to every innovation instead
    n_report = dataset.n_shocks if dataset.n_shocks > 0 else n_eq
    for country in dataset.countries:
        sub = _single_country(dataset, country)
        design = build_design(sub, config)
        y, x = design.y, design.x
        k = x.shape[1]
        try:
            if y.shape[0] <= k:
                raise NumericalError(
                    f"{y.shape[0]} observations for {k} regressors"
                )
            _check_rank(x)
        except NumericalError as exc:
            warnings.warn(f"mean_group: dropping {country}: {exc}", stacklevel=2)
            dropped.append(country)
            continue
        b_ols, *_ = np.linalg.lstsq(x, y, rcond=None)
        resid = y - x @ b_ols
        sigma = resid.T @ resid / max(y.shape[0] - k, 1)
        try:
            irf = _point_irf(b_ols.T, sigma, config, n_report)
        except np.linalg.LinAlgError:
            warnings.warn(
                f"mean_group: dropping {country}: singular residual covariance",
                stacklevel=2,
            )
            dropped.append(country)
            continue
        kept.append(country)
        coeff_list.append(b_ols.T)
        sigma_list.append(sigma)
        irf_list.append(irf)

    if n_start >= 2 and len(kept) < 2:
        raise NumericalError(
            f"only {len(kept)} of {n_start} countries have estimable designs"
        )
    if not kept:
        raise NumericalError("no estimable countries in the panel")

    design0 = build_design(_single_country(dataset, kept[0]), config)
    avg_coeffs = np.mean(coeff_list, axis=0)
    avg_sigma = np.mean(sigma_list, axis=0)
    try:
        point = _point_irf(avg_coeffs, avg_sigma, config, n_report)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("averaged covariance is not positive definite") from exc

    country_irfs = np.stack(irf_list)  # (country, shock, variable, horizon)
    bands = np.percentile(country_irfs, config.percentiles, axis=0)
    values = np.moveaxis(bands, 0, -1)
    irf = IrfResult(
        shock_names=design0.names[:n_report],
        var_names=design0.names,
        percentiles=config.percentiles,
        values=values,
        n_draws=len(kept),
    )
    return MeanGroupResult(
        point=point,
        irf=irf,
        countries=tuple(kept),
        dropped=tuple(dropped),
        country_irfs=country_irfs,
    )


def _single_country(dataset: PanelDataset, country: str) -> PanelDataset:
    pos = dataset.countries.index(country)
    return dc_replace(
        dataset,
        countries=(country,),
        values=dataset.values[pos : pos + 1],
        raw_values=dataset.raw_values[pos : pos + 1],
    )


def _point_irf(coeffs, sigma, config: BvarConfig, n_shocks: int) -> np.ndarray:
    """Responses (shock, variable, horizon) of one coefficient/covariance pair."""
    n_eq = coeffs.shape[0]
    p = config.lags
    chol = np.linalg.cholesky(sigma)
    phi = [np.eye(n_eq)]
    for h in range(1, config.horizon + 1):
        acc = np.zeros((n_eq, n_eq))
        for ell in range(1, min(h, p) + 1):
            acc += coeffs[:, (ell - 1) * n_eq : ell * n_eq] @ phi[h - ell]
        phi.append(acc)
    resp = np.stack([ph @ chol for ph in phi])  # (H+1, var, shock)
    return np.transpose(resp[:, :, :n_shocks], (2, 1, 0))


@dataclass(frozen=True)
class RotationBandResult:
    """Pooled IRF uncertainty across a rotation grid.

    ``pooled`` summarizes responses drawn uniformly across grid points
    and posterior draws; ``grid_medians[g]`` is the median response
    surface at grid point ``g`` (the medians-across-rotations product).
    """

    pooled: IrfResult
    grid_w: tuple[float, ...]
    grid_medians: np.ndarray  # (grid, shock, variable, horizon)
    n_available: int
    n_pooled: int


def rotation_band_irf(
    dataset: PanelDataset,
    decomps,
    dates,
    config: BvarConfig,
    seed: int,
    n_subsample: int = 10_000,
    threads: int = 1,
) -> RotationBandResult:
    """Re-estimate the pooled VAR at every rotation and pool the draws.

    Each decomposition's shock pair is aligned to the panel months and
    the posterior is sampled with a seed derived from ``(seed, grid
    index)``. ``n_subsample`` response draws are selected uniformly
    without replacement from the union across grid points (all of them
    if fewer are available), and summarized at ``config.percentiles``.
    """
    if not decomps:
        raise InputError("need at least one decomposition")
    dates = list(dates)
    n_grid = len(decomps)

    def run_point(g: int):
        dec = decomps[g]
        shocks = np.column_stack([dec.i_mp, dec.i_id])
        aligned = align_shocks(dataset, dates, shocks, ("i_mp", "i_id"))
        design = build_design(aligned, config)
        sub_seed = np.random.SeedSequence([int(seed), g])
        samples = fit_posterior(design, config, sub_seed)
        draws, _ = _irf_draws(samples, config, design.n_shocks)
        return design, draws

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_point, range(n_grid)))
    else:
        results = [run_point(g) for g in range(n_grid)]

    design0 = results[0][0]
    per_grid = [draws for _, draws in results]
    counts = [d.shape[0] for d in per_grid]
    total = int(sum(counts))
    pick_rng = np.random.default_rng(np.random.SeedSequence([int(seed), n_grid, 1]))
    n_pick = min(n_subsample, total)
    flat_idx = np.sort(pick_rng.choice(total, size=n_pick, replace=False))

    offsets = np.cumsum([0] + counts)
    pooled_chunks = []
    grid_medians = np.empty((n_grid,) + per_grid[0].shape[1:])
    for g, draws in enumerate(per_grid):
        grid_medians[g] = np.median(draws, axis=0)
        local = flat_idx[(flat_idx >= offsets[g]) & (flat_idx < offsets[g + 1])]
        pooled_chunks.append(draws[local - offsets[g]])
    pooled_draws = np.concatenate(pooled_chunks, axis=0)

    values = np.percentile(pooled_draws, config.percentiles, axis=0)
    values = np.moveaxis(values, 0, -1)
    pooled = IrfResult(
        shock_names=design0.names[: design0.n_shocks],
        var_names=design0.names,
        percentiles=config.percentiles,
        values=values,
        n_draws=n_pick,
    )
    return RotationBandResult(
        pooled=pooled,
        grid_w=tuple(d.w for d in decomps),
        grid_medians=grid_medians,
        n_available=total,
        n_pooled=n_pick,
    )


def write_irf_csv(result: IrfResult, path) -> None:
    """Write ``shock,variable,horizon,pctl,value`` rows at 12 significant digits."""
    n_h = result.values.shape[2]
    with open(path, "w", newline="") as fh:
        fh.write("shock,variable,horizon,pctl,value\n")
        for si, shock in enumerate(result.shock_names):
            for vi, var in enumerate(result.var_names):
                for h in range(n_h):
                    for pi, pct in enumerate(result.percentiles):
                        fh.write(
                            f"{shock},{var},{h},{pct:g},"
                            f"{fmt12(result.values[si, vi, h, pi])}\n"
                        )


def read_irf_csv(path) -> IrfResult:
    """Read an IRF CSV back into an ``IrfResult`` (draw counts are not stored)."""
    df = pd.read_csv(path)
    expected = ["shock", "variable", "horizon", "pctl", "value"]
    if list(df.columns) != expected:
        raise InputError(f"IRF CSV must have columns {expected}, got {list(df.columns)}")
    shocks = tuple(dict.fromkeys(df["shock"]))
    variables = tuple(dict.fromkeys(df["variable"]))
    pctls = tuple(float(p) for p in dict.fromkeys(df["pctl"]))
    horizons = sorted(df["horizon"].unique())
    if horizons != list(range(len(horizons))):
        raise InputError("IRF CSV horizons must cover 0..H without gaps")
    values = np.full((len(shocks), len(variables), len(horizons), len(pctls)), np.nan)
    s_pos = {s: i for i, s in enumerate(shocks)}
    v_pos = {v: i for i, v in enumerate(variables)}
    p_pos = {p: i for i, p in enumerate(pctls)}
    for row in df.itertuples(index=False):
        values[s_pos[row.shock], v_pos[row.variable], row.horizon, p_pos[float(row.pctl)]] = (
            row.value
        )
    if np.isnan(values).any():
        raise InputError("IRF CSV is missing (shock, variable, horizon, pctl) cells")
    return IrfResult(
        shock_names=shocks,
        var_names=variables,
        percentiles=pctls,
        values=values,
        n_draws=0,
    )
