"""Synthetic data generator with a known shock structure.

Simulates a stable VAR(1) on the stacked vector ``z = [i_mp, i_id,
country variables]`` for several countries sharing the same announcement
shocks. The two planted shock series are made exactly orthogonal in
sample, so the rotation that reproduces them is known, the true impulse
responses are ``A^h @ impact``, and every estimator in the package can
be checked against ground truth.

Announcements arrive in a random subset of months; the observation
equation built from the planted shocks is

    i_total = i_mp + i_id,    s = c_mp * i_mp + c_id * i_id

with the futures contracts loading on ``i_total`` plus a little noise so
the principal-component step has something to do.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInputError, InputError
from .hfdecomp import SurprisePair, SurprisePanel
from .paneldata import PanelDataset

_BURN = 60
_CONTRACT_LOADINGS = (1.0, 0.9, 1.1)
_CONTRACT_NOISE = 0.02


def _default_var_coeffs() -> np.ndarray:
    A = np.zeros((7, 7))
    A[2:, 2:] = np.diag([0.6, 0.7, 0.8, 0.5, 0.4])
    return A


def _default_impact() -> np.ndarray:
    impact = np.zeros((7, 7))
    impact[0, 0] = 1.0   # monetary shock scale
    impact[1, 1] = 0.5   # information shock scale
    # country loadings chosen so every variable responds with opposite
    # sign to the two shocks with wide margins at every admissible
    # rotation: ner, ip, cpi, rate, equity
    impact[2:, 0] = [0.75, -0.60, -0.30, 0.45, -0.75]
    impact[2:, 1] = [-1.00, 0.80, 0.40, -0.60, 1.00]
    impact[2:, 2:] = np.eye(5)
    return impact


@dataclass(frozen=True)
class DgpSpec:
    """Full parameterization of the simulator.

    ``var_coeffs`` is the VAR(1) matrix on ``z``; its first two rows must
    be zero so the shock block stays i.i.d. across months. ``impact`` is
    lower triangular with positive diagonal; its first two columns give
    the impact responses to the two announcement shocks, and
    ``impact[1, 0]`` must be zero so the planted shocks are orthogonal.
    """

    n_countries: int = 9
    n_months: int = 156
    seed: int = 20260815
    shock_prob: float = 8.0 / 12.0
    c_mp: float = -2.0
    c_id: float = 0.5
    var_coeffs: np.ndarray = field(default_factory=_default_var_coeffs)
    impact: np.ndarray = field(default_factory=_default_impact)
    shock_names: tuple[str, ...] = ("i_mp", "i_id")
    var_names: tuple[str, ...] = ("ner", "ip", "cpi", "rate", "equity")
    var_transforms: tuple[str, ...] = ("log100", "log100", "log100", "level", "log100")

    def __post_init__(self):
        A = np.asarray(self.var_coeffs, dtype=float)
        impact = np.asarray(self.impact, dtype=float)
        object.__setattr__(self, "var_coeffs", A)
        object.__setattr__(self, "impact", impact)
        object.__setattr__(self, "shock_names", tuple(self.shock_names))
        object.__setattr__(self, "var_names", tuple(self.var_names))
        object.__setattr__(self, "var_transforms", tuple(self.var_transforms))
        m, n = len(self.shock_names), len(self.var_names)
        if m != 2:
            raise InputError("the generator plants exactly two shock series")
        k = m + n
        if len(self.var_transforms) != n:
            raise InputError(f"{n} variables but {len(self.var_transforms)} transforms")
        if A.shape != (k, k) or impact.shape != (k, k):
            raise InputError(f"var_coeffs and impact must be {k}x{k}")
        if self.n_countries < 1:
            raise InputError("need at least one country")
        if self.n_months < 24:
            raise InputError("need at least 24 months")
        if not 0.0 < self.shock_prob <= 1.0:
            raise InputError(f"shock_prob must lie in (0, 1], got {self.shock_prob}")
        if not (self.c_mp < 0.0 < self.c_id):
            raise InputError(
                f"need c_mp < 0 < c_id, got c_mp={self.c_mp}, c_id={self.c_id}"
            )
        rho = np.max(np.abs(np.linalg.eigvals(A)))
        if rho >= 1.0:
            raise InputError(f"var_coeffs unstable: spectral radius {rho:.4f} >= 1")
        if np.any(A[:m] != 0.0):
            raise InputError("shock-block rows of var_coeffs must be zero")
        if np.any(np.triu(impact, k=1) != 0.0):
            raise InputError("impact must be lower triangular")
        if np.any(np.diag(impact) <= 0.0):
            raise InputError("impact diagonal must be positive")
        if impact[1, 0] != 0.0:
            raise InputError("impact[1, 0] must be zero so planted shocks are orthogonal")


@dataclass(frozen=True)
class SimulationResult:
    """Everything a test or a pipeline run needs from one simulation."""

    spec: DgpSpec
    panel: PanelDataset
    surprises: SurprisePanel
    pair: SurprisePair
    announce_dates: tuple[str, ...]
    true_mp: np.ndarray
    true_id: np.ndarray
    alpha: float


def _month_strings(n: int, start_year=2004, start_month=1) -> list[str]:
    out = []
    y, mo = start_year, start_month
    for _ in range(n):
        out.append(f"{y:04d}-{mo:02d}")
        mo += 1
        if mo > 12:
            mo, y = 1, y + 1
    return out


def simulate(spec: DgpSpec) -> SimulationResult:
    """Run the generator; deterministic given ``spec`` (including its seed)."""
    rng = np.random.default_rng(spec.seed)
    m, n = 2, len(spec.var_names)
    k = m + n
    N, T = spec.n_countries, spec.n_months
    total = T + _BURN

    announce = rng.random(total) < spec.shock_prob
    e = rng.standard_normal((total, 2))
    e[~announce] = 0.0
    idio = rng.standard_normal((total, N, n))

    kept_ann = np.nonzero(announce[_BURN:])[0] + _BURN
    if len(kept_ann) < 8:
        raise DegenerateInputError(
            f"only {len(kept_ann)} announcement months in the sample; "
            "increase n_months or shock_prob"
        )
    # exact in-sample orthogonalization of the planted shocks
    e_mp = e[kept_ann, 0]
    e_id = e[kept_ann, 1]
    if e_mp @ e_mp == 0.0:
        raise DegenerateInputError("degenerate draw: planted monetary shock is zero")
    e_id = e_id - (e_id @ e_mp) / (e_mp @ e_mp) * e_mp
    e[kept_ann, 1] = e_id

    z = np.zeros((N, total, k))
    A = spec.var_coeffs
    impact = spec.impact
    for t in range(total):
        innov = np.zeros((N, k))
        innov += e[t] @ impact[:, :2].T
        innov += idio[t] @ impact[:, 2:].T
        if t == 0:
            z[:, 0] = innov
        else:
            z[:, t] = z[:, t - 1] @ A.T + innov

    months = _month_strings(T)
    values = z[:, _BURN:, m:].copy()
    raw = np.empty_like(values)
    for j, tr in enumerate(spec.var_transforms):
        raw[:, :, j] = np.exp(values[:, :, j] / 100.0) if tr == "log100" else values[:, :, j]

    shocks = z[0, _BURN:, :m].copy()  # same across countries by construction
    panel = PanelDataset(
        countries=tuple(f"C{i + 1:02d}" for i in range(N)),
        dates=tuple(months),
        variables=spec.var_names,
        values=values,
        raw_values=raw,
        transforms=spec.var_transforms,
        shock_names=spec.shock_names,
        shocks=shocks,
    )

    u_mp = impact[0, 0] * e_mp
    u_id = impact[1, 1] * e_id
    i_total = u_mp + u_id
    s = spec.c_mp * u_mp + spec.c_id * u_id
    ann_months = [months[t - _BURN] for t in kept_ann]
    ann_dates = tuple(f"{mth}-15" for mth in ann_months)

    loadings = np.array(_CONTRACT_LOADINGS)
    noise = _CONTRACT_NOISE * i_total.std(ddof=1)
    contracts = i_total[:, None] * loadings + noise * rng.standard_normal(
        (len(i_total), len(loadings))
    )
    surprises = SurprisePanel(dates=ann_dates, contracts=contracts, equity=s)

    alpha = math.atan2(float(np.linalg.norm(u_id)), float(np.linalg.norm(u_mp)))
    return SimulationResult(
        spec=spec,
        panel=panel,
        surprises=surprises,
        pair=SurprisePair(i_total=i_total, s=s),
        announce_dates=ann_dates,
        true_mp=u_mp,
        true_id=u_id,
        alpha=alpha,
    )


def true_irf(spec: DgpSpec, horizon: int) -> np.ndarray:
    """Impulse responses ``A^h @ impact``; shape (horizon+1, k, k).

    Entry ``[h, i, j]`` is the response of variable ``i`` at horizon
    ``h`` to a unit innovation in column ``j`` of the impact matrix.
    """
    if horizon < 0:
        raise InputError("horizon must be non-negative")
    k = spec.var_coeffs.shape[0]
    out = np.empty((horizon + 1, k, k))
    out[0] = spec.impact
    for h in range(1, horizon + 1):
        out[h] = spec.var_coeffs @ out[h - 1]
    return out


def spec_to_toml(spec: DgpSpec, path) -> None:
    """Serialize a DgpSpec to TOML."""

    def arr(a):
        rows = ", ".join(
            "[" + ", ".join(repr(float(x)) for x in row) + "]" for row in a
        )
        return f"[{rows}]"

    def strs(xs):
        return "[" + ", ".join(f'"{x}"' for x in xs) + "]"

    text = "\n".join(
        [
            f"n_countries = {spec.n_countries}",
            f"n_months = {spec.n_months}",
            f"seed = {spec.seed}",
            f"shock_prob = {spec.shock_prob!r}",
            f"c_mp = {spec.c_mp!r}",
            f"c_id = {spec.c_id!r}",
            f"shock_names = {strs(spec.shock_names)}",
            f"var_names = {strs(spec.var_names)}",
            f"var_transforms = {strs(spec.var_transforms)}",
            f"var_coeffs = {arr(spec.var_coeffs)}",
            f"impact = {arr(spec.impact)}",
            "",
        ]
    )
    with open(path, "w") as fh:
        fh.write(text)


def spec_from_toml(path) -> DgpSpec:
    """Load a DgpSpec from TOML; unknown keys are rejected."""
    try:
        import tomllib
    except ModuleNotFoundError:  # Python 3.10
        import tomli as tomllib

    with open(path, "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise InputError(f"bad TOML in {path}: {exc}") from exc
    allowed = {
        "n_countries",
        "n_months",
        "seed",
        "shock_prob",
        "c_mp",
        "c_id",
        "shock_names",
        "var_names",
        "var_transforms",
        "var_coeffs",
        "impact",
    }
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise InputError(f"unknown keys in {path}: {unknown}")
    for key in ("shock_names", "var_names", "var_transforms"):
        if key in data:
            data[key] = tuple(data[key])
    for key in ("var_coeffs", "impact"):
        if key in data:
            data[key] = np.asarray(data[key], dtype=float)
    return DgpSpec(**data)
