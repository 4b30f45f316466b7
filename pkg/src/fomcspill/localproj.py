"""Panel local projections of country outcomes on the identified shocks.

For each horizon ``h`` the outcome ``y_{i,t+h}`` is regressed on the two
standardized shocks dated ``t`` plus country-interacted controls: lags
of the outcome, lags of the other panel variables, and lags of the
shocks themselves. The reported coefficients are the common (pooled)
loadings on the contemporaneous shocks, so they trace out the response
to a one-standard-deviation surprise. Inference is two-way clustered by
country and month.

Three specifications are supported: ``pooled`` (common intercept),
``fixed_effects`` (country intercepts), and ``fe_trend`` (country
intercepts plus country-specific linear trends).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DegenerateInputError, InputError, NumericalError
from .ioutil import fmt12
from .paneldata import PanelDataset

_SPECS = ("pooled", "fixed_effects", "fe_trend")


@dataclass(frozen=True)
class LpConfig:
    """Settings for the local projection regressions.

    ``j_y``, ``j_x`` and ``j_i`` are the lag counts of the outcome, the
    other panel variables, and the shocks used as controls (all country
    interacted). ``spec`` picks the deterministic component.
    """

    horizons: int = 6
    j_y: int = 1
    j_x: int = 1
    j_i: int = 2
    spec: str = "pooled"

    def __post_init__(self):
        if self.horizons < 0:
            raise InputError(f"horizons must be non-negative, got {self.horizons}")
        for name in ("j_y", "j_x", "j_i"):
            if getattr(self, name) < 0:
                raise InputError(f"{name} must be non-negative, got {getattr(self, name)}")
        if self.spec not in _SPECS:
            raise InputError(f"unknown spec {self.spec!r}; expected one of {_SPECS}")


@dataclass(frozen=True)
class LpResult:
    """Per-horizon shock coefficients with clustered standard errors.

    Coefficients are on shocks standardized to unit sample standard
    deviation; ``scale`` records the standard deviations used. The
    ``_mp`` fields track the first shock column and ``_id`` the second.
    """

    outcome: str
    spec: str
    shock_names: tuple[str, str]
    beta_mp: np.ndarray
    beta_id: np.ndarray
    se_mp: np.ndarray
    se_id: np.ndarray
    scale: tuple[float, float]
    n_obs: np.ndarray
    cov_truncated: tuple[bool, ...]
    dropped_columns: tuple[str, ...]


def twoway_cluster_cov(x, resid, country_ids, time_ids):
    """Cluster-robust covariance with clustering by country and by time.

    Combines the two one-way cluster estimators and subtracts the
    intersection (country, time) term. If the composition leaves a
    negative variance on the diagonal, the matrix is projected onto the
    positive semidefinite cone by zeroing negative eigenvalues; the
    returned flag reports whether that happened.
    """
    x = np.asarray(x, dtype=float)
    resid = np.asarray(resid, dtype=float)
    country_ids = np.asarray(country_ids)
    time_ids = np.asarray(time_ids)
    if x.ndim != 2 or resid.shape != (x.shape[0],):
        raise InputError("x must be 2-D with one residual per row")
    if country_ids.shape != (x.shape[0],) or time_ids.shape != (x.shape[0],):
        raise InputError("cluster id arrays must have one entry per row")
    for label, ids in (("country", country_ids), ("time", time_ids)):
        if len(np.unique(ids)) < 2:
            raise InputError(f"need at least 2 {label} clusters")

    xtx = x.T @ x
    try:
        bread = np.linalg.inv(xtx)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("regressor cross-product is singular") from exc

    def meat(ids):
        codes, inv = np.unique(ids, return_inverse=True)
        scores = x * resid[:, None]
        agg = np.zeros((len(codes), x.shape[1]))
        np.add.at(agg, inv, scores)
        return agg.T @ agg

    inter_ids = np.char.add(
        np.char.add(country_ids.astype(str), "|"), time_ids.astype(str)
    )
    combined = meat(country_ids) + meat(time_ids) - meat(inter_ids)
    cov = bread @ combined @ bread
    cov = 0.5 * (cov + cov.T)

    truncated = False
    if np.any(np.diag(cov) < 0.0):
        truncated = True
        vals, vecs = np.linalg.eigh(cov)
        cov = (vecs * np.clip(vals, 0.0, None)) @ vecs.T
        cov = 0.5 * (cov + cov.T)
    return cov, truncated


def _standardize_shocks(dataset: PanelDataset):
    if dataset.n_shocks != 2:
        raise InputError(
            f"local projections need exactly 2 aligned shocks, got {dataset.n_shocks}"
        )
    sd = dataset.shocks.std(axis=0, ddof=1)
    floor = 1e-12 * np.maximum(1.0, np.abs(dataset.shocks.mean(axis=0)))
    if np.any(sd <= floor):
        bad = [dataset.shock_names[j] for j in np.nonzero(sd <= floor)[0]]
        raise DegenerateInputError(f"shock series {bad} have zero variance")
    return dataset.shocks / sd, (float(sd[0]), float(sd[1]))


def _design_for_horizon(dataset, outcome_idx, std_shocks, config, h):
    """Build (y, X, column names, country ids, time ids) for one horizon."""
    N, T = dataset.n_countries, dataset.n_months
    n_var = dataset.n_variables
    t0 = max(config.j_y, config.j_x, config.j_i)
    t1 = T - 1 - h
    if t1 < t0:
        raise InputError(
            f"horizon {h} leaves no usable observations (sample {T} months)"
        )
    ts = np.arange(t0, t1 + 1)
    rows = N * len(ts)

    cols: list[np.ndarray] = []
    names: list[str] = []

    shock_block = np.tile(std_shocks[ts], (N, 1))
    cols.append(shock_block)
    names += [f"shock:{dataset.shock_names[0]}", f"shock:{dataset.shock_names[1]}"]

    other_vars = [j for j in range(n_var) if j != outcome_idx]
    per_country = []
    per_names = []
    for j in range(1, config.j_y + 1):
        per_country.append(lambda i, j=j: dataset.values[i, ts - j, outcome_idx])
        per_names.append(f"ylag{j}")
    for v in other_vars:
        for j in range(1, config.j_x + 1):
            per_country.append(lambda i, v=v, j=j: dataset.values[i, ts - j, v])
            per_names.append(f"xlag{j}:{dataset.variables[v]}")
    for s in range(2):
        for j in range(1, config.j_i + 1):
            per_country.append(lambda i, s=s, j=j: std_shocks[ts - j, s])
            per_names.append(f"slag{j}:{dataset.shock_names[s]}")

    block = np.zeros((rows, N * len(per_country)))
    for i in range(N):
        sl = slice(i * len(ts), (i + 1) * len(ts))
        for c, fn in enumerate(per_country):
            block[sl, i * len(per_country) + c] = fn(i)
    cols.append(block)
    names += [
        f"{pn}:{dataset.countries[i]}" for i in range(N) for pn in per_names
    ]

    if config.spec == "pooled":
        cols.append(np.ones((rows, 1)))
        names.append("const")
    else:
        fe = np.zeros((rows, N))
        for i in range(N):
            fe[i * len(ts) : (i + 1) * len(ts), i] = 1.0
        cols.append(fe)
        names += [f"fe:{c}" for c in dataset.countries]
        if config.spec == "fe_trend":
            tr = np.zeros((rows, N))
            for i in range(N):
                tr[i * len(ts) : (i + 1) * len(ts), i] = ts / T
            cols.append(tr)
            names += [f"trend:{c}" for c in dataset.countries]

    x = np.hstack(cols)
    y = np.concatenate([dataset.values[i, ts + h, outcome_idx] for i in range(N)])
    country_ids = np.repeat(np.arange(N), len(ts))
    time_ids = np.tile(ts, N)
    return y, x, names, country_ids, time_ids


def _independent_columns(x, names):
    """Pivoted-QR column selection; returns kept indices and dropped names."""
    _, r, piv = scipy.linalg.qr(x, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    tol = diag[0] * max(x.shape) * np.finfo(float).eps if diag.size else 0.0
    rank = int(np.sum(diag > tol))
    kept = np.sort(piv[:rank])
    dropped = [names[j] for j in sorted(piv[rank:])]
    return kept, dropped


def lp_estimate(dataset: PanelDataset, outcome: str, config: LpConfig) -> LpResult:
    """Run the per-horizon projections for one outcome variable.

    Collinear control columns are dropped (reported on the result and
    as a warning); a collinear shock column is a hard error since the
    response would not be identified.
    """
    if outcome not in dataset.variables:
        raise InputError(
            f"unknown outcome {outcome!r}; panel has {list(dataset.variables)}"
        )
    if dataset.n_countries < 2:
        raise InputError("local projections need at least 2 countries for clustering")
    outcome_idx = dataset.variables.index(outcome)
    std_shocks, scale = _standardize_shocks(dataset)

    H = config.horizons
    t0 = max(config.j_y, config.j_x, config.j_i)
    usable = dataset.n_months - H - t0
    if usable < 10:
        raise InputError(
            f"horizon {H} with {t0} lagged controls leaves {max(usable, 0)} "
            f"usable months of {dataset.n_months}; need at least 10"
        )
    beta = np.empty((H + 1, 2))
    se = np.empty((H + 1, 2))
    n_obs = np.empty(H + 1, dtype=int)
    truncated = []
    all_dropped: list[str] = []

    for h in range(H + 1):
        y, x, names, c_ids, t_ids = _design_for_horizon(
            dataset, outcome_idx, std_shocks, config, h
        )
        kept, dropped = _independent_columns(x, names)
        if any(n.startswith("shock:") for n in dropped):
            raise NumericalError(
                f"shock regressors are collinear with the controls at horizon {h}"
            )
        for name in dropped:
            if name not in all_dropped:
                all_dropped.append(name)
        xk = x[:, kept]
        coef, *_ = np.linalg.lstsq(xk, y, rcond=None)
        resid = y - xk @ coef

        # covariance of the shock block on the partialled-out design:
        # identical to the corresponding block of the full sandwich, but
        # any positive-semidefinite repair touches only these two
        # coordinates instead of leaking in from control columns
        kept_names = [names[j] for j in kept]
        pos = [kept_names.index(f"shock:{s}") for s in dataset.shock_names]
        controls = np.delete(xk, pos, axis=1)
        xs = xk[:, pos]
        if controls.shape[1]:
            xs = xs - controls @ np.linalg.lstsq(controls, xs, rcond=None)[0]
        cov, flag = twoway_cluster_cov(xs, resid, c_ids, t_ids)
        truncated.append(flag)

        beta[h] = coef[pos]
        variances = np.diag(cov)
        if np.any(variances <= 0.0):
            raise NumericalError(
                f"non-positive variance for shock coefficients at horizon {h}"
            )
        se[h] = np.sqrt(variances)
        n_obs[h] = len(y)

    if all_dropped:
        warnings.warn(
            f"lp_estimate({outcome}, {config.spec}): dropped collinear columns: "
            + ", ".join(all_dropped),
            stacklevel=2,
        )
    return LpResult(
        outcome=outcome,
        spec=config.spec,
        shock_names=(dataset.shock_names[0], dataset.shock_names[1]),
        beta_mp=beta[:, 0],
        beta_id=beta[:, 1],
        se_mp=se[:, 0],
        se_id=se[:, 1],
        scale=scale,
        n_obs=n_obs,
        cov_truncated=tuple(truncated),
        dropped_columns=tuple(all_dropped),
    )


def sbic_lag_select(dataset: PanelDataset, country: str, max_lag: int) -> int:
    """Schwarz-criterion lag order for one country's VAR on a common sample.

    All candidate orders are fit on the rows that remain after trimming
    ``max_lag`` initial months, so their likelihoods are comparable.
    Ties go to the smaller order.
    """
    if max_lag < 1:
        raise InputError(f"max_lag must be at least 1, got {max_lag}")
    if country not in dataset.countries:
        raise InputError(
            f"unknown country {country!r}; panel has {list(dataset.countries)}"
        )
    z = dataset.values[dataset.countries.index(country)]
    T, n = z.shape
    t_eff = T - max_lag
    k_max = n * max_lag + 1
    if t_eff <= k_max + n:
        raise InputError(
            f"{T} months cannot support lag selection up to {max_lag} "
            f"({t_eff} usable rows for {k_max} regressors)"
        )
    ts = np.arange(max_lag, T)
    best_p, best_crit = None, np.inf
    for p in range(1, max_lag + 1):
        x = np.hstack([z[ts - j] for j in range(1, p + 1)] + [np.ones((t_eff, 1))])
        y = z[ts]
        coef, *_ = np.linalg.lstsq(x, y, rcond=None)
        resid = y - x @ coef
        sigma = resid.T @ resid / t_eff
        sign, logdet = np.linalg.slogdet(sigma)
        if sign <= 0:
            raise NumericalError(
                f"degenerate residual covariance for {country} at lag {p}"
            )
        k_p = n * (n * p + 1)
        crit = logdet + (k_p / t_eff) * np.log(t_eff)
        if crit < best_crit:
            best_p, best_crit = p, crit
    return best_p


def read_lp_csv(path) -> list[LpResult]:
    """Read projection results written by :func:`write_lp_csv`.

    Only the plotting fields are recoverable from the file; the scale
    and per-horizon diagnostics are filled with placeholders.
    """
    with open(path, newline="") as fh:
        lines = [line.rstrip("\n") for line in fh]
    if not lines:
        raise InputError(f"{path} is empty")
    header = lines[0].split(",")
    if header[:6] != ["spec", "outcome", "shock", "horizon", "beta", "se"]:
        raise InputError(
            f"{path} must start with columns spec,outcome,shock,horizon,beta,se"
        )
    groups: dict[tuple[str, str], dict[str, dict[int, tuple[float, float]]]] = {}
    order: list[tuple[str, str]] = []
    for ln, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != len(header):
            raise InputError(f"{path} line {ln}: expected {len(header)} cells")
        spec, outcome, shock, h_str, beta_str, se_str = parts[:6]
        key = (spec, outcome)
        if key not in groups:
            groups[key] = {}
            order.append(key)
        groups[key].setdefault(shock, {})[int(h_str)] = (
            float(beta_str),
            float(se_str),
        )
    results = []
    for spec, outcome in order:
        shocks = list(groups[(spec, outcome)])
        if len(shocks) != 2:
            raise InputError(
                f"{path}: {spec}/{outcome} must carry exactly 2 shocks, "
                f"found {shocks}"
            )
        series = []
        length = None
        for shock in shocks:
            cells = groups[(spec, outcome)][shock]
            hs = sorted(cells)
            if hs != list(range(len(hs))):
                raise InputError(
                    f"{path}: {spec}/{outcome}/{shock} horizons must run 0..H"
                )
            if length is None:
                length = len(hs)
            elif len(hs) != length:
                raise InputError(
                    f"{path}: {spec}/{outcome} shocks disagree on horizons"
                )
            series.append(np.array([cells[h] for h in hs]))
        results.append(
            LpResult(
                outcome=outcome,
                spec=spec,
                shock_names=(shocks[0], shocks[1]),
                beta_mp=series[0][:, 0],
                beta_id=series[1][:, 0],
                se_mp=series[0][:, 1],
                se_id=series[1][:, 1],
                scale=(float("nan"), float("nan")),
                n_obs=np.zeros(length, dtype=int),
                cov_truncated=(),
                dropped_columns=(),
            )
        )
    return results


def write_lp_csv(results, path, band_multipliers=()) -> None:
    """Write stacked LP results as ``spec,outcome,shock,horizon,beta,se`` rows.

    ``band_multipliers`` appends ``lo_m,hi_m`` columns at beta -/+ m*se
    for each multiplier m. Bands are derived from the quantized beta and
    se so the file is an exact function of its own printed columns and a
    read/write cycle reproduces it byte for byte.
    """
    mults = [float(m) for m in band_multipliers]
    header = "spec,outcome,shock,horizon,beta,se"
    for m in mults:
        header += f",lo_{m:g},hi_{m:g}"
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        for res in results:
            series = (
                (res.shock_names[0], res.beta_mp, res.se_mp),
                (res.shock_names[1], res.beta_id, res.se_id),
            )
            for shock, betas, ses in series:
                for h in range(len(betas)):
                    beta = float(fmt12(betas[h]))
                    se = float(fmt12(ses[h]))
                    row = (
                        f"{res.spec},{res.outcome},{shock},{h},"
                        f"{fmt12(beta)},{fmt12(se)}"
                    )
                    for m in mults:
                        row += f",{fmt12(beta - m * se)}"
                        row += f",{fmt12(beta + m * se)}"
                    fh.write(row + "\n")
