"""Load, validate, and align the monthly country panel.

The on-disk format is long CSV with header ``country,date,variable,value``
and months as ``YYYY-MM``. Panels must be balanced: every country carries
every declared variable for every month of a contiguous range. Shock
series dated at announcement days are aligned to the panel by summing
within each month; months without announcements get zeros.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import pandas as pd

from .errors import InputError
from .ioutil import fmt12, month_range, month_str, parse_day, parse_month

_TRANSFORMS = ("level", "log100")
_ROLES = ("endogenous", "shock")


@dataclass(frozen=True)
class VariableSpec:
    """Declares one panel variable: its name, transform, and role."""

    name: str
    transform: str = "level"
    role: str = "endogenous"

    def __post_init__(self):
        if self.transform not in _TRANSFORMS:
            raise InputError(
                f"unknown transform {self.transform!r} for {self.name!r}; "
                f"expected one of {_TRANSFORMS}"
            )
        if self.role not in _ROLES:
            raise InputError(
                f"unknown role {self.role!r} for {self.name!r}; expected one of {_ROLES}"
            )


@dataclass(frozen=True)
class PanelDataset:
    """Balanced country panel with monthly-aligned shock series.

    ``values`` holds transformed observations (countries x months x
    variables); ``raw_values`` keeps the untransformed numbers so exports
    reproduce the source file. ``shocks`` is months x n_shocks, empty
    until ``align_shocks`` fills it.
    """

    countries: tuple[str, ...]
    dates: tuple[str, ...]
    variables: tuple[str, ...]
    values: np.ndarray
    raw_values: np.ndarray
    transforms: tuple[str, ...]
    shock_names: tuple[str, ...]
    shocks: np.ndarray

    @property
    def n_countries(self) -> int:
        return len(self.countries)

    @property
    def n_months(self) -> int:
        return len(self.dates)

    @property
    def n_variables(self) -> int:
        return len(self.variables)

    @property
    def n_shocks(self) -> int:
        return len(self.shock_names)


def _validate_months(dates) -> None:
    for d in dict.fromkeys(dates):  # unique, order preserved
        parse_month(d)


def _apply_transform(raw: np.ndarray, transform: str, name: str, countries, dates):
    if transform == "level":
        return raw.copy()
    bad = raw <= 0.0
    if bad.any():
        cells = [
            f"({countries[i]},{dates[t]},{name})"
            for i, t in zip(*np.nonzero(bad))
        ][:5]
        raise InputError(
            f"log100 transform needs positive values; offending cells: {', '.join(cells)}"
        )
    return 100.0 * np.log(raw)


def load_panel(path, specs: list[VariableSpec]) -> PanelDataset:
    """Read a long CSV into a balanced, transformed panel.

    ``specs`` fixes the variable order; variables in the file but not in
    ``specs`` are ignored. Raises ``InputError`` on schema problems,
    duplicate or missing cells, non-contiguous months, and values
    incompatible with the declared transform.
    """
    if not specs:
        raise InputError("at least one VariableSpec is required")
    names = [s.name for s in specs]
    if len(set(names)) != len(names):
        raise InputError(f"duplicate variable names in specs: {names}")

    df = pd.read_csv(path, dtype={"country": str, "date": str, "variable": str})
    expected = ["country", "date", "variable", "value"]
    if list(df.columns) != expected:
        raise InputError(f"panel CSV must have columns {expected}, got {list(df.columns)}")
    if df["value"].isna().any():
        n_bad = int(df["value"].isna().sum())
        raise InputError(f"panel CSV has {n_bad} missing or non-numeric values")

    df = df[df["variable"].isin(names)]
    missing_vars = sorted(set(names) - set(df["variable"]))
    if missing_vars:
        raise InputError(f"panel CSV lacks declared variables: {missing_vars}")

    dup = df.duplicated(subset=["country", "date", "variable"], keep=False)
    if dup.any():
        rows = df[dup].head(5)
        triples = [f"({r.country},{r.date},{r.variable})" for r in rows.itertuples()]
        raise InputError(f"duplicate panel cells: {', '.join(triples)}")

    _validate_months(df["date"])
    countries = tuple(sorted(df["country"].unique()))
    uniq_months = df["date"].unique()
    dates = tuple(
        month_range(min(uniq_months, key=parse_month), max(uniq_months, key=parse_month))
    )

    frame = df.set_index(["country", "date", "variable"])["value"]
    idx = pd.MultiIndex.from_product(
        [countries, dates, names], names=["country", "date", "variable"]
    )
    aligned = frame.reindex(idx)
    if aligned.isna().any():
        gaps = aligned[aligned.isna()].index[:5]
        cells = [f"({c},{m},{v})" for c, m, v in gaps]
        raise InputError(
            f"unbalanced panel, {int(aligned.isna().sum())} missing cells, "
            f"first few: {', '.join(cells)}"
        )

    raw = aligned.to_numpy(dtype=float).reshape(len(countries), len(dates), len(names))
    values = np.empty_like(raw)
    for j, spec in enumerate(specs):
        values[:, :, j] = _apply_transform(
            raw[:, :, j], spec.transform, spec.name, countries, dates
        )
    return PanelDataset(
        countries=countries,
        dates=dates,
        variables=tuple(names),
        values=values,
        raw_values=raw,
        transforms=tuple(s.transform for s in specs),
        shock_names=(),
        shocks=np.zeros((len(dates), 0)),
    )


def align_shocks(
    dataset: PanelDataset, shock_dates, shock_values, shock_names
) -> PanelDataset:
    """Sum announcement-dated shocks into panel months.

    Announcements sharing a month add up; panel months without any get
    zeros. Shock dates after the panel's last month raise ``InputError``;
    dates before the first month are dropped (the panel simply starts
    later than the shock record).
    """
    values = np.asarray(shock_values, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    names = tuple(shock_names)
    if values.shape[1] != len(names):
        raise InputError(
            f"{len(names)} shock names for {values.shape[1]} shock columns"
        )
    if values.shape[0] != len(list(shock_dates)):
        raise InputError(
            f"{len(list(shock_dates))} shock dates for {values.shape[0]} rows"
        )
    if not np.all(np.isfinite(values)):
        raise InputError("shock values contain non-finite entries")

    shock_dates = [str(d) for d in shock_dates]
    shock_months = []
    for d in shock_dates:
        y, mo, _ = parse_day(d)
        shock_months.append(month_str(y, mo))

    month_pos = {m: t for t, m in enumerate(dataset.dates)}
    aligned = np.zeros((dataset.n_months, len(names)))
    last = parse_month(dataset.dates[-1])
    first = parse_month(dataset.dates[0])
    for row, month in enumerate(shock_months):
        key = parse_month(month)
        if key > last:
            raise InputError(
                f"shock dated {shock_dates[row]} falls after the panel's "
                f"last month {dataset.dates[-1]}"
            )
        if key < first:
            continue
        aligned[month_pos[month]] += values[row]
    return replace(dataset, shock_names=names, shocks=aligned)


def subset(dataset: PanelDataset, countries) -> PanelDataset:
    """Restrict the panel to the listed countries, in the listed order."""
    wanted = list(countries)
    if len(set(wanted)) != len(wanted):
        raise InputError(f"duplicate countries in subset request: {wanted}")
    unknown = [c for c in wanted if c not in dataset.countries]
    if unknown:
        raise InputError(
            f"unknown countries {unknown}; panel has {list(dataset.countries)}"
        )
    if not wanted:
        raise InputError("subset needs at least one country")
    pos = [dataset.countries.index(c) for c in wanted]
    return replace(
        dataset,
        countries=tuple(wanted),
        values=dataset.values[pos],
        raw_values=dataset.raw_values[pos],
    )


def write_panel_csv(dataset: PanelDataset, path) -> None:
    """Export the raw (untransformed) panel in canonical long form."""
    with open(path, "w", newline="") as fh:
        fh.write("country,date,variable,value\n")
        for i, country in enumerate(dataset.countries):
            for t, date in enumerate(dataset.dates):
                for j, var in enumerate(dataset.variables):
                    fh.write(f"{country},{date},{var},{fmt12(dataset.raw_values[i, t, j])}\n")
