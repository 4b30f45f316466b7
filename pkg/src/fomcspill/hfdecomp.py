"""Decompose high-frequency announcement surprises into two structural shocks.

The observation equation is ``M = U C`` where ``M`` stacks the composite
interest-rate surprise and the stock-market surprise column-wise, ``U``
holds two orthogonal shock series (monetary tightening, positive news
disclosure), and

    C = [[1, c_mp],
         [1, c_id]],   c_mp < 0,  c_id > 0.

Both shocks raise rates one-for-one; they are told apart by the sign of
the equity response. The set of observationally equivalent ``(U, C)``
pairs is indexed by a rotation angle ``alpha`` inside an interval that
the sign restrictions pin down; ``w`` in (0, 1) interpolates linearly
across that interval, with ``w = 0.5`` the median rotation.

Recovery is QR based: factor ``M = Q R`` with positive diagonal, rotate
by ``P(alpha)``, then rescale by ``D = diag(r11 cos(alpha), r11 sin(alpha))``
so that ``U = Q P D`` and ``C = D^-1 P' R``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .errors import (
    CollinearSurprisesError,
    DegenerateInputError,
    IdentificationFailureError,
    InputError,
)
from .ioutil import fmt12, parse_day

_RELTOL = 1e-12


def _as_vector(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise InputError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} contains non-finite values")
    return arr


def _check_dates(dates) -> tuple[str, ...]:
    out = tuple(str(d) for d in dates)
    parsed = [parse_day(d) for d in out]
    if any(b <= a for a, b in zip(parsed, parsed[1:])):
        raise InputError("announcement dates must be strictly increasing")
    return out


@dataclass(frozen=True)
class SurprisePanel:
    """Announcement-dated futures surprises plus the equity surprise.

    ``contracts`` is T x K (one column per futures contract), ``equity``
    is length T. Dates are ISO days, strictly increasing.
    """

    dates: tuple[str, ...]
    contracts: np.ndarray
    equity: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dates", _check_dates(self.dates))
        contracts = np.asarray(self.contracts, dtype=float)
        if contracts.ndim != 2:
            raise InputError(f"contracts must be T x K, got shape {contracts.shape}")
        if not np.all(np.isfinite(contracts)):
            raise InputError("contracts contain non-finite values")
        equity = _as_vector(self.equity, "equity")
        T = len(self.dates)
        if contracts.shape[0] != T or equity.shape[0] != T:
            raise InputError(
                f"length mismatch: {T} dates, {contracts.shape[0]} contract rows, "
                f"{equity.shape[0]} equity rows"
            )
        if T < 2:
            raise InputError("need at least 2 announcements")
        if contracts.shape[1] < 1:
            raise InputError("need at least one contract column")
        object.__setattr__(self, "contracts", contracts)
        object.__setattr__(self, "equity", equity)


@dataclass(frozen=True)
class SurprisePair:
    """The two series entering identification: composite rate surprise and equity."""

    i_total: np.ndarray
    s: np.ndarray

    def __post_init__(self):
        i_total = _as_vector(self.i_total, "i_total")
        s = _as_vector(self.s, "s")
        if i_total.shape != s.shape:
            raise InputError(
                f"i_total and s length mismatch: {i_total.shape[0]} vs {s.shape[0]}"
            )
        if i_total.shape[0] < 2:
            raise InputError("need at least 2 observations")
        if not np.any(i_total != 0.0):
            raise DegenerateInputError("i_total is identically zero")
        object.__setattr__(self, "i_total", i_total)
        object.__setattr__(self, "s", s)


@dataclass(frozen=True)
class QrParts:
    """Normalized QR factors of M = [i_total, s] with positive R diagonal."""

    q: np.ndarray
    r: np.ndarray


@dataclass(frozen=True)
class ShockDecomposition:
    """One admissible split of the composite surprise.

    ``i_mp + i_id`` reproduces ``i_total`` exactly and the two series are
    orthogonal in sample. ``c_mp`` / ``c_id`` are the recovered equity
    loadings, ``alpha`` the rotation angle, ``w`` its position inside the
    admissible interval.
    """

    i_mp: np.ndarray
    i_id: np.ndarray
    alpha: float
    w: float
    c_mp: float
    c_id: float
    qr: QrParts = field(repr=False)


@dataclass(frozen=True)
class PoorMansShocks:
    """Observation-by-observation split based on co-movement signs only."""

    i_mp: np.ndarray
    i_id: np.ndarray


def pca_composite(panel: SurprisePanel) -> np.ndarray:
    """First principal component of the contract surprises.

    Columns are demeaned first. The component is sign-normalized to
    correlate non-negatively with the first contract and rescaled to the
    first contract's sample standard deviation. With a single column the
    result is just that column demeaned.
    """
    X = panel.contracts - panel.contracts.mean(axis=0)
    sd1 = panel.contracts[:, 0].std(ddof=1)
    if sd1 == 0.0:
        raise DegenerateInputError("first contract has zero variance")
    if X.shape[1] == 1:
        return X[:, 0].copy()
    cov = (X.T @ X) / (X.shape[0] - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    v = eigvecs[:, -1]
    if eigvals[-1] <= 0.0:
        raise DegenerateInputError("contract surprises have zero variance")
    score = X @ v
    if score @ X[:, 0] < 0.0:
        score = -score
    sd_score = score.std(ddof=1)
    if sd_score == 0.0:
        raise DegenerateInputError("principal component has zero variance")
    return score * (sd1 / sd_score)


def _normalized_qr(pair: SurprisePair) -> QrParts:
    """Reduced QR of M = [i_total, s], diagonal of R forced positive."""
    M = np.column_stack([pair.i_total, pair.s])
    q, r = np.linalg.qr(M)
    for j in range(2):
        if r[j, j] < 0.0:
            q[:, j] = -q[:, j]
            r[j, :] = -r[j, :]
    if r[1, 1] <= _RELTOL * abs(r[0, 0]):
        raise CollinearSurprisesError(
            "i_total and s are collinear; the rotation is not identified"
        )
    return QrParts(q=q, r=r)


def admissible_angle_interval(pair: SurprisePair) -> tuple[float, float]:
    """Open interval of rotation angles consistent with the sign restrictions.

    In terms of the normalized QR factors the equity loadings at angle
    ``a`` are ``c_mp = (r12 - r22 tan a) / r11`` and
    ``c_id = (r12 + r22 cot a) / r11``, so:

    * ``r12 > 0``: angles in (arctan(r12 / r22), pi/2)
    * ``r12 <= 0``: angles in (0, arctan(-r22 / r12)), the upper bound
      read as pi/2 when r12 = 0.
    """
    qr = _normalized_qr(pair)
    lo, hi = _interval_from_r(qr.r)
    eps = 1e-9 * (hi - lo)
    for a in (lo + eps, hi - eps):
        c_mp, c_id = _loadings_at(qr.r, a)
        if not (c_mp < 0.0 and c_id > 0.0):
            raise IdentificationFailureError(
                f"sign restrictions fail just inside the candidate interval "
                f"({lo:.6g}, {hi:.6g}) at angle {a:.6g}"
            )
    return lo, hi


def _interval_from_r(r: np.ndarray) -> tuple[float, float]:
    r12, r22 = r[0, 1], r[1, 1]
    if r12 > 0.0:
        return math.atan2(r12, r22), math.pi / 2.0
    if r12 == 0.0:
        return 0.0, math.pi / 2.0
    return 0.0, math.atan2(r22, -r12)


def _loadings_at(r: np.ndarray, alpha: float) -> tuple[float, float]:
    r11, r12, r22 = r[0, 0], r[0, 1], r[1, 1]
    c_mp = (r12 - r22 * math.tan(alpha)) / r11
    c_id = (r12 + r22 / math.tan(alpha)) / r11
    return c_mp, c_id


def _decompose(pair: SurprisePair, alpha: float, w: float) -> ShockDecomposition:
    qr = _normalized_qr(pair)
    r11 = qr.r[0, 0]
    ca, sa = math.cos(alpha), math.sin(alpha)
    P = np.array([[ca, sa], [-sa, ca]])
    d = np.array([r11 * ca, r11 * sa])
    if d[0] <= 0.0 or d[1] <= 0.0:
        raise IdentificationFailureError(
            f"angle {alpha:.6g} leaves a non-positive shock scale"
        )
    U = (qr.q @ P) * d
    C = (P.T @ qr.r) / d[:, None]
    c_mp, c_id = C[0, 1], C[1, 1]
    if not (c_mp < 0.0 and c_id > 0.0):
        raise IdentificationFailureError(
            f"angle {alpha:.6g} violates the sign restrictions "
            f"(c_mp={c_mp:.6g}, c_id={c_id:.6g})"
        )
    return ShockDecomposition(
        i_mp=U[:, 0], i_id=U[:, 1], alpha=alpha, w=w, c_mp=c_mp, c_id=c_id, qr=qr
    )


def decompose_at(pair: SurprisePair, w: float) -> ShockDecomposition:
    """Decompose at interval position ``w`` in (0, 1); ``w = 0.5`` is the median rotation."""
    if not (0.0 < w < 1.0):
        raise InputError(f"w must lie strictly inside (0, 1), got {w}")
    lo, hi = admissible_angle_interval(pair)
    alpha = (1.0 - w) * lo + w * hi
    return _decompose(pair, alpha, w)


def decompose_at_angle(pair: SurprisePair, alpha: float) -> ShockDecomposition:
    """Decompose at a caller-supplied angle, e.g. one pinned by an external moment.

    The angle must fall inside the admissible interval; ``w`` is derived
    as its position within it.
    """
    lo, hi = admissible_angle_interval(pair)
    if not (lo < alpha < hi):
        raise InputError(
            f"angle {alpha:.6g} outside the admissible interval ({lo:.6g}, {hi:.6g})"
        )
    w = (alpha - lo) / (hi - lo)
    return _decompose(pair, alpha, w)


def poor_mans_decompose(pair: SurprisePair) -> PoorMansShocks:
    """Attribute each observation wholly to one shock by co-movement sign.

    Opposite-signed (or zero) products of the rate and equity surprise
    are tagged monetary, positive products informational.
    """
    monetary = pair.i_total * pair.s <= 0.0
    i_mp = np.where(monetary, pair.i_total, 0.0)
    i_id = np.where(monetary, 0.0, pair.i_total)
    return PoorMansShocks(i_mp=i_mp, i_id=i_id)


def angle_from_variance_ratio(ratio: float) -> float:
    """Rotation angle implied by var(i_mp) / var(i_total) = cos^2(alpha)."""
    if not (0.0 < ratio <= 1.0):
        raise InputError(f"variance ratio must lie in (0, 1], got {ratio}")
    return math.acos(math.sqrt(ratio))


def rotation_grid(pair: SurprisePair, n: int = 99) -> list[ShockDecomposition]:
    """Decompositions at the ``n`` interior percentiles w = k/(n+1), k = 1..n."""
    if n < 1:
        raise InputError(f"grid size must be at least 1, got {n}")
    return [decompose_at(pair, k / (n + 1.0)) for k in range(1, n + 1)]


def read_surprise_csv(path) -> SurprisePanel:
    """Load announcement surprises from ``date,contract_1..K,sp500`` CSV."""
    df = pd.read_csv(path)
    cols = list(df.columns)
    contract_cols = [c for c in cols if c.startswith("contract_")]
    if cols[:1] != ["date"] or "sp500" not in cols or not contract_cols:
        raise InputError(
            f"surprise CSV must have columns date,contract_1..K,sp500; got {cols}"
        )
    if df.isna().any().any():
        raise InputError("surprise CSV contains missing values")
    return SurprisePanel(
        dates=tuple(df["date"].astype(str)),
        contracts=df[contract_cols].to_numpy(dtype=float),
        equity=df["sp500"].to_numpy(dtype=float),
    )


def write_shock_csv(path, dates, i_total, i_mp, i_id) -> None:
    """Write ``date,i_total,i_mp,i_id`` with 12-significant-digit values."""
    with open(path, "w", newline="") as fh:
        fh.write("date,i_total,i_mp,i_id\n")
        for d, tot, mp, idv in zip(dates, i_total, i_mp, i_id):
            fh.write(f"{d},{fmt12(tot)},{fmt12(mp)},{fmt12(idv)}\n")


def read_shock_csv(path, columns=None) -> tuple[list[str], list[str], np.ndarray]:
    """Read a dated shock CSV; returns (dates, column names, T x m values).

    ``columns`` selects a subset of the value columns, defaulting to all
    columns after ``date``.
    """
    df = pd.read_csv(path)
    if list(df.columns)[:1] != ["date"]:
        raise InputError(f"shock CSV must start with a date column, got {list(df.columns)}")
    names = [c for c in df.columns if c != "date"]
    if columns is not None:
        missing = [c for c in columns if c not in names]
        if missing:
            raise InputError(f"shock CSV lacks requested columns {missing}; has {names}")
        names = list(columns)
    if df.isna().any().any():
        raise InputError("shock CSV contains missing values")
    return list(df["date"].astype(str)), names, df[names].to_numpy(dtype=float)
