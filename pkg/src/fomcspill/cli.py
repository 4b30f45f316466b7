"""Command-line pipeline: decompose, estimate, irf, localproj,
meangroup, rotations, simulate, report.

Every subcommand reads CSV/TOML inputs, writes delimited outputs plus a
JSON run manifest, and honors the precedence CLI flag > config file >
built-in default. Exit codes: 0 success, 1 invalid input, 2 numerical
failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import time

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import __version__
from .errors import InputError, NumericalError
from .ioutil import fmt12, save_arrays
from . import hfdecomp
from .paneldata import VariableSpec, load_panel, align_shocks, subset, write_panel_csv
from .pbvar import (
    BvarConfig,
    PriorConfig,
    PosteriorSample,
    build_design,
    fit_posterior,
    mean_group,
    rotation_band_irf,
    structural_irf,
    write_irf_csv,
    read_irf_csv,
)
from .localproj import (
    LpConfig,
    lp_estimate,
    read_lp_csv,
    sbic_lag_select,
    write_lp_csv,
)
from . import dgpsim
from .manifest import start_manifest


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        sys.exit(1)


# Built-in defaults, resolved per the precedence rule. argparse stores
# None for unset flags so config-file values can fill the gap.
_DEFAULTS = {
    "decompose": {
        "w": 0.5,
        "alpha": None,
        "var_ratio": None,
        "method": "sign",
        "composite_out": None,
    },
    "estimate": {
        "shock_cols": "i_mp,i_id",
        "countries": None,
        "lags": 6,
        "draws": 5000,
        "burn": 500,
        "seed": 0,
        "block_exogenous": False,
        "diffuse": False,
        "tightness": 0.1,
        "lag_decay": 1.0,
        "intercept_looseness": 100.0,
        "ar1_mean": 1.0,
        "panel_config": None,
    },
    "irf": {"horizon": 36, "percentiles": "5,16,50,84,95", "report_all": False},
    "localproj": {
        "shock_cols": "i_mp,i_id",
        "outcomes": "all",
        "spec": "all",
        "horizons": 6,
        "j_y": 1,
        "j_x": 1,
        "j_i": 2,
        "bands": "1,1.65",
        "sbic_max_lag": None,
        "panel_config": None,
        "countries": None,
    },
    "meangroup": {
        "shock_cols": "i_mp,i_id",
        "lags": 1,
        "horizon": 36,
        "percentiles": "5,16,50,84,95",
        "point_out": None,
        "panel_config": None,
        "countries": None,
    },
    "rotations": {
        "grid": 99,
        "lags": 6,
        "draws": 500,
        "burn": 50,
        "horizon": 36,
        "percentiles": "5,16,50,84,95",
        "subsample": 10000,
        "seed": 0,
        "threads": None,
        "medians_out": None,
        "panel_config": None,
        "countries": None,
    },
    "simulate": {
        "spec": None,
        "countries": None,
        "months": None,
        "seed": None,
        "shock_prob": None,
    },
    "report": {
        "shocks": None,
        "irf": None,
        "lp": None,
        "out_dir": None,
        "band_multiplier": 1.65,
    },
}


def _load_config_file(path):
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read config file {path}: {exc.strerror}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise InputError(f"config file {path} is not valid TOML: {exc}") from exc


def _resolve(command, args):
    """Merge CLI values, config-file values, and defaults."""
    defaults = _DEFAULTS[command]
    fromfile = {}
    if getattr(args, "config", None):
        fromfile = _load_config_file(args.config)
        unknown = sorted(set(fromfile) - set(defaults))
        if unknown:
            raise InputError(
                f"config file {args.config} sets unknown keys {unknown}; "
                f"valid keys: {sorted(defaults)}"
            )
    resolved = {}
    for key, default in defaults.items():
        cli_value = getattr(args, key, None)
        if cli_value is not None:
            resolved[key] = cli_value
        elif key in fromfile:
            resolved[key] = fromfile[key]
        else:
            resolved[key] = default
    return resolved


def _parse_floats(value, flag):
    if isinstance(value, (list, tuple)):
        return tuple(float(v) for v in value)
    try:
        return tuple(float(part) for part in str(value).split(",") if part != "")
    except ValueError as exc:
        raise InputError(f"{flag} expects comma-separated numbers, got {value!r}") from exc


def _parse_names(value):
    if isinstance(value, (list, tuple)):
        return [str(v) for v in value]
    return [part.strip() for part in str(value).split(",") if part.strip()]


def _read_panel_config(path):
    """Variable declarations: [[variable]] tables with name/transform."""
    data = _load_config_file(path)
    tables = data.get("variable")
    if not tables:
        raise InputError(f"panel config {path} declares no [[variable]] tables")
    specs = []
    for tab in tables:
        unknown = sorted(set(tab) - {"name", "transform", "role"})
        if unknown:
            raise InputError(f"panel config {path}: unknown variable keys {unknown}")
        specs.append(
            VariableSpec(
                name=tab.get("name", ""),
                transform=tab.get("transform", "level"),
                role=tab.get("role", "endogenous"),
            )
        )
    return specs


def _locate_panel_config(cfg, panel_path):
    if cfg.get("panel_config"):
        return cfg["panel_config"]
    sibling = os.path.join(os.path.dirname(os.path.abspath(panel_path)), "panel_config.toml")
    if os.path.exists(sibling):
        return sibling
    raise InputError(
        "no --panel-config given and no panel_config.toml found next to "
        f"{panel_path}; declare the panel variables and transforms"
    )


def _load_dataset(cfg, panel_path, shocks_path, manifest):
    config_path = _locate_panel_config(cfg, panel_path)
    specs = _read_panel_config(config_path)
    dataset = load_panel(panel_path, specs)
    manifest.add_input(panel_path)
    manifest.add_input(config_path)
    if cfg.get("countries"):
        dataset = subset(dataset, _parse_names(cfg["countries"]))
    if shocks_path is not None:
        names = _parse_names(cfg["shock_cols"])
        dates, names, series = hfdecomp.read_shock_csv(shocks_path, columns=names)
        dataset = align_shocks(dataset, dates, series, tuple(names))
        manifest.add_input(shocks_path)
    return dataset


def _bvar_config(cfg, horizon=None, percentiles=None):
    prior = PriorConfig(
        tightness=float(cfg.get("tightness", 0.1)),
        lag_decay=float(cfg.get("lag_decay", 1.0)),
        intercept_looseness=float(cfg.get("intercept_looseness", 100.0)),
        ar1_mean=float(cfg.get("ar1_mean", 1.0)),
        diffuse=bool(cfg.get("diffuse", False)),
    )
    kwargs = {}
    if horizon is not None:
        kwargs["horizon"] = int(horizon)
    if percentiles is not None:
        kwargs["percentiles"] = _parse_floats(percentiles, "--percentiles")
    return BvarConfig(
        lags=int(cfg["lags"]),
        draws=int(cfg["draws"]),
        burn=int(cfg["burn"]),
        block_exogenous=bool(cfg.get("block_exogenous", False)),
        prior=prior,
        **kwargs,
    )


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


# --------------------------------------------------------- subcommands


def _cmd_decompose(args):
    cfg = _resolve("decompose", args)
    manifest = start_manifest("decompose", __version__, _jsonable(cfg))
    panel = hfdecomp.read_surprise_csv(args.surprises)
    manifest.add_input(args.surprises)
    composite = hfdecomp.pca_composite(panel)
    pair = hfdecomp.SurprisePair(i_total=composite, s=panel.equity)

    chosen = [k for k in ("alpha", "var_ratio") if cfg[k] is not None]
    if len(chosen) > 1:
        raise InputError("give at most one of --alpha and --var-ratio")
    if cfg["method"] == "poor-mans":
        if chosen:
            raise InputError("--alpha/--var-ratio do not apply to --method poor-mans")
        shocks = hfdecomp.poor_mans_decompose(pair)
        i_mp, i_id = shocks.i_mp, shocks.i_id
    elif cfg["method"] == "sign":
        if cfg["alpha"] is not None:
            dec = hfdecomp.decompose_at_angle(pair, float(cfg["alpha"]))
        elif cfg["var_ratio"] is not None:
            alpha = hfdecomp.angle_from_variance_ratio(float(cfg["var_ratio"]))
            dec = hfdecomp.decompose_at_angle(pair, alpha)
        else:
            dec = hfdecomp.decompose_at(pair, float(cfg["w"]))
        i_mp, i_id = dec.i_mp, dec.i_id
    else:
        raise InputError(f"unknown --method {cfg['method']!r}; use sign or poor-mans")

    hfdecomp.write_shock_csv(args.out, panel.dates, pair.i_total, i_mp, i_id)
    manifest.add_output(args.out)
    if cfg["composite_out"]:
        _write_composite_csv(cfg["composite_out"], panel.dates, composite, panel.equity)
        manifest.add_output(cfg["composite_out"])
    _finish(manifest, args.out + ".manifest.json")
    return 0


def _write_composite_csv(path, dates, composite, equity):
    with open(path, "w", newline="") as fh:
        fh.write("date,i_total,sp500\n")
        for t, date in enumerate(dates):
            fh.write(f"{date},{fmt12(composite[t])},{fmt12(equity[t])}\n")


def _cmd_simulate(args):
    cfg = _resolve("simulate", args)
    if cfg["spec"]:
        spec = dgpsim.spec_from_toml(cfg["spec"])
    else:
        spec = dgpsim.DgpSpec()
    overrides = {}
    if cfg["countries"] is not None:
        overrides["n_countries"] = int(cfg["countries"])
    if cfg["months"] is not None:
        overrides["n_months"] = int(cfg["months"])
    if cfg["seed"] is not None:
        overrides["seed"] = int(cfg["seed"])
    if cfg["shock_prob"] is not None:
        overrides["shock_prob"] = float(cfg["shock_prob"])
    if overrides:
        spec = dataclasses.replace(spec, **overrides)

    manifest = start_manifest("simulate", __version__, _jsonable(cfg), seed=spec.seed)
    if cfg["spec"]:
        manifest.add_input(cfg["spec"])
    os.makedirs(args.out, exist_ok=True)
    sim = dgpsim.simulate(spec)

    panel_path = os.path.join(args.out, "panel.csv")
    write_panel_csv(sim.panel, panel_path)

    surprises_path = os.path.join(args.out, "surprises.csv")
    _write_surprises_csv(surprises_path, sim.surprises)

    true_path = os.path.join(args.out, "true_shocks.csv")
    hfdecomp.write_shock_csv(
        true_path, sim.announce_dates, sim.pair.i_total, sim.true_mp, sim.true_id
    )

    spec_path = os.path.join(args.out, "spec.toml")
    dgpsim.spec_to_toml(spec, spec_path)

    config_path = os.path.join(args.out, "panel_config.toml")
    with open(config_path, "w") as fh:
        for name, transform in zip(spec.var_names, spec.var_transforms):
            fh.write(f'[[variable]]\nname = "{name}"\ntransform = "{transform}"\n\n')

    for path in (panel_path, surprises_path, true_path, spec_path, config_path):
        manifest.add_output(path)
    _finish(manifest, os.path.join(args.out, "manifest.json"))
    return 0


def _write_surprises_csv(path, surprises):
    k = surprises.contracts.shape[1]
    header = "date," + ",".join(f"contract_{j + 1}" for j in range(k)) + ",sp500"
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        for t, date in enumerate(surprises.dates):
            cells = ",".join(fmt12(v) for v in surprises.contracts[t])
            fh.write(f"{date},{cells},{fmt12(surprises.equity[t])}\n")


def _cmd_estimate(args):
    cfg = _resolve("estimate", args)
    if int(cfg["lags"]) < 1:
        raise InputError(f"--lags must be at least 1, got {cfg['lags']}")
    manifest = start_manifest(
        "estimate", __version__, _jsonable(cfg), seed=int(cfg["seed"])
    )
    dataset = _load_dataset(cfg, args.panel, args.shocks, manifest)
    config = _bvar_config(cfg)
    design = build_design(dataset, config)
    samples = fit_posterior(design, config, seed=int(cfg["seed"]))

    coeffs = np.stack([s.coeffs for s in samples])
    sigmas = np.stack([s.sigma for s in samples])
    save_arrays(
        args.out,
        coeffs=coeffs,
        sigmas=sigmas,
        names=np.array(design.names),
        n_shocks=np.array(design.n_shocks),
        lags=np.array(config.lags),
    )
    manifest.add_output(args.out)

    summary = {
        "rows": int(design.y.shape[0]),
        "columns": int(design.x.shape[1]),
        "n_samples": len(samples),
        "condition_number": fmt12(float(np.linalg.cond(design.x))),
    }
    summary_path = args.out + ".summary.json"
    _write_json(summary_path, summary)
    manifest.add_output(summary_path)
    _finish(manifest, args.out + ".manifest.json")
    return 0


def _load_posterior(path):
    try:
        data = np.load(path)
    except OSError as exc:
        raise InputError(f"cannot read posterior file {path}: {exc}") from exc
    for key in ("coeffs", "sigmas", "names", "n_shocks", "lags"):
        if key not in data:
            raise InputError(f"posterior file {path} is missing array {key!r}")
    samples = [
        PosteriorSample(coeffs=c, sigma=s)
        for c, s in zip(data["coeffs"], data["sigmas"])
    ]
    names = tuple(str(n) for n in data["names"])
    return samples, names, int(data["n_shocks"]), int(data["lags"])


def _cmd_irf(args):
    cfg = _resolve("irf", args)
    manifest = start_manifest("irf", __version__, _jsonable(cfg))
    samples, names, n_shocks, lags = _load_posterior(args.posterior)
    manifest.add_input(args.posterior)
    config = BvarConfig(
        lags=lags,
        draws=len(samples) + 1,
        burn=0,
        horizon=int(cfg["horizon"]),
        percentiles=_parse_floats(cfg["percentiles"], "--percentiles"),
    )
    result = structural_irf(
        samples, config, names, n_shocks, report_all=bool(cfg["report_all"])
    )
    write_irf_csv(result, args.out)
    manifest.add_output(args.out)
    summary_path = args.out + ".summary.json"
    _write_json(
        summary_path,
        {"n_draws": result.n_draws, "n_rejected": result.n_rejected},
    )
    manifest.add_output(summary_path)
    _finish(manifest, args.out + ".manifest.json")
    return 0


def _cmd_localproj(args):
    cfg = _resolve("localproj", args)
    manifest = start_manifest("localproj", __version__, _jsonable(cfg))
    dataset = _load_dataset(cfg, args.panel, args.shocks, manifest)

    specs = _parse_names(cfg["spec"])
    if specs == ["all"]:
        specs = ["pooled", "fixed_effects", "fe_trend"]
    outcomes = _parse_names(cfg["outcomes"])
    if outcomes == ["all"]:
        outcomes = list(dataset.variables)

    sbic = {}
    if cfg["sbic_max_lag"] is not None:
        for country in dataset.countries:
            sbic[country] = sbic_lag_select(dataset, country, int(cfg["sbic_max_lag"]))

    results = []
    for spec_name in specs:
        config = LpConfig(
            horizons=int(cfg["horizons"]),
            j_y=int(cfg["j_y"]),
            j_x=int(cfg["j_x"]),
            j_i=int(cfg["j_i"]),
            spec=spec_name,
        )
        for outcome in outcomes:
            results.append(lp_estimate(dataset, outcome, config))

    bands = _parse_floats(cfg["bands"], "--bands") if cfg["bands"] else ()
    write_lp_csv(results, args.out, band_multipliers=bands)
    manifest.add_output(args.out)
    if sbic:
        sbic_path = args.out + ".sbic.json"
        _write_json(sbic_path, sbic)
        manifest.add_output(sbic_path)
    _finish(manifest, args.out + ".manifest.json")
    return 0


def _cmd_meangroup(args):
    cfg = _resolve("meangroup", args)
    manifest = start_manifest("meangroup", __version__, _jsonable(cfg))
    dataset = _load_dataset(cfg, args.panel, args.shocks, manifest)
    config = _bvar_config(
        {**cfg, "draws": 2, "burn": 0},
        horizon=cfg["horizon"],
        percentiles=cfg["percentiles"],
    )
    result = mean_group(dataset, config)
    write_irf_csv(result.irf, args.out)
    manifest.add_output(args.out)
    if cfg["point_out"]:
        _write_point_csv(cfg["point_out"], result)
        manifest.add_output(cfg["point_out"])
    summary_path = args.out + ".summary.json"
    _write_json(
        summary_path,
        {
            "countries_used": list(result.countries),
            "countries_dropped": list(result.dropped),
        },
    )
    manifest.add_output(summary_path)
    _finish(manifest, args.out + ".manifest.json")
    return 0


def _write_point_csv(path, result):
    irf = result.irf
    with open(path, "w", newline="") as fh:
        fh.write("shock,variable,horizon,value\n")
        for s, shock in enumerate(irf.shock_names):
            for v, var in enumerate(irf.var_names):
                for h in range(result.point.shape[2]):
                    fh.write(f"{shock},{var},{h},{fmt12(result.point[s, v, h])}\n")


def _cmd_rotations(args):
    cfg = _resolve("rotations", args)
    threads = cfg["threads"]
    if threads is None:
        threads = int(os.environ.get("FOMCSPILL_THREADS", "1"))
    manifest = start_manifest(
        "rotations", __version__, _jsonable({**cfg, "threads": threads}),
        seed=int(cfg["seed"]),
    )

    surprise_panel = hfdecomp.read_surprise_csv(args.surprises)
    manifest.add_input(args.surprises)
    composite = hfdecomp.pca_composite(surprise_panel)
    pair = hfdecomp.SurprisePair(i_total=composite, s=surprise_panel.equity)
    grid = hfdecomp.rotation_grid(pair, n=int(cfg["grid"]))

    dataset = _load_dataset(cfg, args.panel, None, manifest)
    config = _bvar_config(cfg, horizon=cfg["horizon"], percentiles=cfg["percentiles"])
    band = rotation_band_irf(
        dataset,
        grid,
        surprise_panel.dates,
        config,
        seed=int(cfg["seed"]),
        n_subsample=int(cfg["subsample"]),
        threads=int(threads),
    )
    write_irf_csv(band.pooled, args.out)
    manifest.add_output(args.out)
    if cfg["medians_out"]:
        save_arrays(
            cfg["medians_out"],
            grid_w=np.asarray(band.grid_w),
            medians=band.grid_medians,
            shock_names=np.array(band.pooled.shock_names),
            var_names=np.array(band.pooled.var_names),
        )
        manifest.add_output(cfg["medians_out"])
    summary_path = args.out + ".summary.json"
    _write_json(
        summary_path,
        {"n_grid": len(band.grid_w), "n_available": band.n_available,
         "n_pooled": band.n_pooled},
    )
    manifest.add_output(summary_path)
    _finish(manifest, args.out + ".manifest.json")
    return 0


def _cmd_report(args):
    cfg = _resolve("report", args)
    if not any(cfg[k] for k in ("shocks", "irf", "lp")):
        raise InputError("report needs at least one of --shocks, --irf, --lp")
    first = next(p for p in (cfg["shocks"], cfg["irf"], cfg["lp"]) if p)
    out_dir = cfg["out_dir"] or os.path.dirname(os.path.abspath(first)) or "."
    os.makedirs(out_dir, exist_ok=True)
    manifest = start_manifest("report", __version__, _jsonable(cfg))

    from . import figures

    if cfg["shocks"]:
        dates, _, series = hfdecomp.read_shock_csv(
            cfg["shocks"], columns=("i_total", "i_mp", "i_id")
        )
        manifest.add_input(cfg["shocks"])
        fig = figures.shock_series_figure(
            dates, series[:, 0], series[:, 1], series[:, 2]
        )
        path = os.path.join(out_dir, "shocks.png")
        figures.save_figure(fig, path)
        manifest.add_output(path)
    if cfg["irf"]:
        result = read_irf_csv(cfg["irf"])
        manifest.add_input(cfg["irf"])
        fig = figures.irf_fan_figure(result)
        path = os.path.join(out_dir, "irf.png")
        figures.save_figure(fig, path)
        manifest.add_output(path)
    if cfg["lp"]:
        results = read_lp_csv(cfg["lp"])
        manifest.add_input(cfg["lp"])
        fig = figures.lp_band_figure(results, multiplier=float(cfg["band_multiplier"]))
        path = os.path.join(out_dir, "localproj.png")
        figures.save_figure(fig, path)
        manifest.add_output(path)
    _finish(manifest, os.path.join(out_dir, "report.manifest.json"))
    return 0


def _jsonable(cfg):
    out = {}
    for key, value in cfg.items():
        if isinstance(value, (list, tuple)):
            out[key] = [_scalar(v) for v in value]
        else:
            out[key] = _scalar(value)
    return out


def _scalar(value):
    if isinstance(value, (str, bool, int, float)) or value is None:
        return value
    return str(value)


def _finish(manifest, path):
    manifest.wall_seconds = round(time.monotonic() - _START, 3)
    manifest.write(path)


_START = time.monotonic()


# ------------------------------------------------------------- parser


def build_parser():
    parser = _Parser(
        prog="fomcspill",
        description="Decompose announcement surprises into policy and news "
        "shocks and trace their cross-country effects.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", metavar="command")

    # defaults are spelled out in each help string because the stored
    # argparse default is a None sentinel (config files fill the gap)
    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="TOML file with flag defaults")
        return p

    p = add("decompose", "split surprises into policy and news shocks")
    p.add_argument("--surprises", required=True, help="input surprise CSV")
    p.add_argument("--out", required=True, help="output shock CSV")
    p.add_argument("--w", type=float, help="rotation weight in (0,1) (default 0.5)")
    p.add_argument("--alpha", type=float, help="force this rotation angle (radians)")
    p.add_argument(
        "--var-ratio",
        dest="var_ratio",
        type=float,
        help="pick the angle matching this var(i_mp)/var(i_total) share",
    )
    p.add_argument(
        "--method", choices=("sign", "poor-mans"), help="decomposition rule (default sign)"
    )
    p.add_argument(
        "--composite-out",
        dest="composite_out",
        help="also write the composite surprise series to this CSV",
    )

    p = add("simulate", "generate a synthetic surprise + panel dataset")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--spec", help="DGP spec TOML (default: built-in calibration)")
    p.add_argument("--countries", type=int, help="override country count")
    p.add_argument("--months", type=int, help="override sample length")
    p.add_argument("--seed", type=int, help="override RNG seed")
    p.add_argument(
        "--shock-prob", dest="shock_prob", type=float, help="override announcement probability"
    )

    p = add("estimate", "fit the pooled Bayesian panel VAR")
    p.add_argument("--panel", required=True, help="panel CSV (country,date,variable,value)")
    p.add_argument("--shocks", required=True, help="shock CSV from decompose")
    p.add_argument("--out", required=True, help="output posterior .npz")
    p.add_argument("--panel-config", dest="panel_config", help="variable declaration TOML (default: panel_config.toml beside the panel)")
    p.add_argument(
        "--shock-cols",
        dest="shock_cols",
        help="shock CSV columns to align, ordered (default i_mp,i_id)",
    )
    p.add_argument("--countries", help="comma-separated subset of countries")
    p.add_argument("--lags", type=int, help="VAR lag order (default 6)")
    p.add_argument("--draws", type=int, help="posterior draws (default 5000)")
    p.add_argument("--burn", type=int, help="discarded draws (default 500)")
    p.add_argument("--seed", type=int, help="RNG seed (default 0)")
    p.add_argument(
        "--block-exogenous",
        dest="block_exogenous",
        action="store_const",
        const=True,
        help="zero restriction: shock equations exclude lagged country variables",
    )
    p.add_argument(
        "--diffuse",
        action="store_const",
        const=True,
        help="use the diffuse prior instead of shrinkage",
    )
    p.add_argument("--tightness", type=float, help="prior tightness (default 0.1)")
    p.add_argument("--lag-decay", dest="lag_decay", type=float, help="prior lag decay (default 1)")
    p.add_argument(
        "--intercept-looseness",
        dest="intercept_looseness",
        type=float,
        help="prior intercept looseness (default 100)",
    )
    p.add_argument(
        "--ar1-mean", dest="ar1_mean", type=float, help="prior own-lag mean (default 1)"
    )

    p = add("irf", "impulse responses with percentile bands from a posterior")
    p.add_argument("--posterior", required=True, help="posterior .npz from estimate")
    p.add_argument("--out", required=True, help="output IRF CSV")
    p.add_argument("--horizon", type=int, help="IRF horizon in months (default 36)")
    p.add_argument("--percentiles", help="comma-separated percentiles (default 5,16,50,84,95)")
    p.add_argument(
        "--report-all",
        dest="report_all",
        action="store_const",
        const=True,
        help="report responses to every innovation, not just the shock block",
    )

    p = add("localproj", "per-horizon projections with two-way clustered bands")
    p.add_argument("--panel", required=True, help="panel CSV")
    p.add_argument("--shocks", required=True, help="shock CSV from decompose")
    p.add_argument("--out", required=True, help="output CSV")
    p.add_argument("--panel-config", dest="panel_config", help="variable declaration TOML (default: panel_config.toml beside the panel)")
    p.add_argument("--shock-cols", dest="shock_cols", help="shock columns (default i_mp,i_id)")
    p.add_argument("--countries", help="comma-separated subset of countries")
    p.add_argument("--outcomes", help="comma-separated outcomes (default all)")
    p.add_argument(
        "--spec", help="pooled, fixed_effects, fe_trend, or a comma list (default all)"
    )
    p.add_argument("--horizons", type=int, help="max horizon (default 6)")
    p.add_argument("--j-y", dest="j_y", type=int, help="outcome lag controls (default 1)")
    p.add_argument("--j-x", dest="j_x", type=int, help="other-variable lag controls (default 1)")
    p.add_argument("--j-i", dest="j_i", type=int, help="shock lag controls (default 2)")
    p.add_argument("--bands", help="comma-separated SE multiples for band columns (default 1,1.65)")
    p.add_argument(
        "--sbic-max-lag",
        dest="sbic_max_lag",
        type=int,
        help="also report per-country SBIC lag choices up to this order",
    )

    p = add("meangroup", "country-by-country VARs averaged into one IRF")
    p.add_argument("--panel", required=True, help="panel CSV")
    p.add_argument("--shocks", required=True, help="shock CSV from decompose")
    p.add_argument("--out", required=True, help="output IRF CSV (cross-country bands)")
    p.add_argument("--panel-config", dest="panel_config", help="variable declaration TOML (default: panel_config.toml beside the panel)")
    p.add_argument("--shock-cols", dest="shock_cols", help="shock columns (default i_mp,i_id)")
    p.add_argument("--countries", help="comma-separated subset of countries")
    p.add_argument("--lags", type=int, help="per-country lag order (default 1)")
    p.add_argument("--horizon", type=int, help="IRF horizon (default 36)")
    p.add_argument("--percentiles", help="cross-country percentiles (default 5,16,50,84,95)")
    p.add_argument(
        "--point-out", dest="point_out", help="also write the averaged-system IRF CSV"
    )

    p = add("rotations", "pool posteriors across the admissible rotation grid")
    p.add_argument("--panel", required=True, help="panel CSV")
    p.add_argument("--surprises", required=True, help="surprise CSV (not yet decomposed)")
    p.add_argument("--out", required=True, help="pooled IRF CSV")
    p.add_argument("--panel-config", dest="panel_config", help="variable declaration TOML (default: panel_config.toml beside the panel)")
    p.add_argument("--countries", help="comma-separated subset of countries")
    p.add_argument("--grid", type=int, help="rotation grid size (default 99)")
    p.add_argument("--lags", type=int, help="VAR lag order (default 6)")
    p.add_argument("--draws", type=int, help="draws per grid point (default 500)")
    p.add_argument("--burn", type=int, help="burn per grid point (default 50)")
    p.add_argument("--horizon", type=int, help="IRF horizon (default 36)")
    p.add_argument("--percentiles", help="pooled percentiles (default 5,16,50,84,95)")
    p.add_argument("--subsample", type=int, help="pooled subsample size (default 10000)")
    p.add_argument("--seed", type=int, help="RNG seed (default 0)")
    p.add_argument(
        "--threads", type=int, help="parallel grid fits (default $FOMCSPILL_THREADS or 1)"
    )
    p.add_argument(
        "--medians-out", dest="medians_out", help="write per-rotation median IRFs to this .npz"
    )

    p = add("report", "render figures for existing pipeline outputs")
    p.add_argument("--shocks", help="shock CSV to plot")
    p.add_argument("--irf", help="IRF CSV to plot as fan charts")
    p.add_argument("--lp", help="projection CSV to plot with bands")
    p.add_argument("--out-dir", dest="out_dir", help="directory for PNGs (default: beside inputs)")
    p.add_argument(
        "--band-multiplier",
        dest="band_multiplier",
        type=float,
        help="SE multiple for projection bands (default 1.65)",
    )

    return parser


_COMMANDS = {
    "decompose": _cmd_decompose,
    "simulate": _cmd_simulate,
    "estimate": _cmd_estimate,
    "irf": _cmd_irf,
    "localproj": _cmd_localproj,
    "meangroup": _cmd_meangroup,
    "rotations": _cmd_rotations,
    "report": _cmd_report,
}


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help(sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
