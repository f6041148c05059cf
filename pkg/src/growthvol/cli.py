"""Command-line front end: fit, scale, roll, and synth subcommands.

Each run resolves its arguments into a single configuration dict that is
embedded verbatim in every artifact it writes (JSON under a ``config`` key,
CSV as a leading comment line), so any output file identifies the exact
invocation and seed that produced it.

Strata requested via --region / --split are estimated independently and may
be dispatched concurrently (--jobs); one stratum failing does not stop the
others.  Failures are collected into ``errors.json`` and the process exits
nonzero iff at least one stratum failed.  All files are written atomically
(temp file in the target directory, then rename).

Relative --data paths are resolved against $GROWTHVOL_DATA_DIR when that
variable is set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from growthvol.aep import AepParams, density
from growthvol.aep_fit import fit_aep
from growthvol.ingest import DatasetManifest, load_panel
from growthvol.panel import REGIONS, development_split, stratify
from growthvol.rolling import roll, rolling_csv, significance_segments
from growthvol.scaling import bin_stats_csv, binned_beta, fit_alad
from growthvol.synth import SynthSpec, generate
from growthvol.ingest import panel_to_long_csv

_SPLITS = ("developed", "developing")


# ------------------------------------------------------------------ plumbing


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _config_json(config: dict) -> str:
    return json.dumps(config, sort_keys=True)


def _write_json(path: Path, config: dict, payload: dict) -> None:
    document = {"config": config, **payload}
    _atomic_write(path, json.dumps(document, indent=2, sort_keys=True) + "\n")


def _write_csv(path: Path, config: dict, body: str) -> None:
    _atomic_write(path, f"# config: {_config_json(config)}\n{body}")


def _parse_years(text: str) -> tuple[int, int]:
    try:
        first, last = (int(part) for part in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected A:B with integer years, got {text!r}"
        ) from None
    if first > last:
        raise argparse.ArgumentTypeError(f"year range is backwards: {text!r}")
    return first, last


def _parse_shock(text: str) -> AepParams:
    kind, _, rest = text.partition(":")
    try:
        if kind == "laplace":
            return AepParams.laplace(float(rest))
        if kind == "gaussian":
            return AepParams.gaussian(float(rest))
        if kind == "aep":
            b_l, b_r, a_l, a_r = (float(p) for p in rest.split(","))
            return AepParams(b_l=b_l, b_r=b_r, a_l=a_l, a_r=a_r, m=0.0)
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"bad shock spec {text!r}: {exc}") from None
    raise argparse.ArgumentTypeError(
        f"unknown shock family {kind!r}; expected laplace:A, gaussian:A, "
        "or aep:BL,BR,AL,AR"
    )


def _resolve_data_path(given: str) -> str:
    path = Path(given)
    root = os.environ.get("GROWTHVOL_DATA_DIR")
    if root and not path.is_absolute():
        return str(Path(root) / path)
    return str(path)


# -------------------------------------------------------------------- strata


def _expand_strata(args) -> list[dict]:
    """Cross the requested regions and development splits into strata.

    Each stratum is {"label", "region", "development"}; with no filters the
    single stratum "all" covers the whole panel.
    """
    regions = []
    for name in args.region or []:
        if name == "all":
            regions.extend(REGIONS)
        elif name in REGIONS:
            regions.append(name)
        else:
            known = ", ".join(REGIONS)
            raise SystemExit(f"unknown region {name!r}; known regions: {known}, all")
    splits = []
    for name in args.split or []:
        if name == "both":
            splits.extend(_SPLITS)
        else:
            splits.append(name)

    strata = []
    for region in regions or [None]:
        for split in splits or [None]:
            label = "_".join(part for part in (region, split) if part) or "all"
            strata.append({"label": label, "region": region, "development": split})
    return strata


def _run_strata(strata, worker, jobs: int):
    """Run worker(stratum) for each stratum, collecting failures."""
    def guarded(stratum):
        try:
            worker(stratum)
            return None
        except Exception as exc:  # noqa: BLE001 - reported in the manifest
            return {"stratum": stratum["label"],
                    "error": str(exc), "type": type(exc).__name__}

    if jobs > 1 and len(strata) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            failures = list(pool.map(guarded, strata))
    else:
        failures = [guarded(s) for s in strata]
    return [f for f in failures if f is not None]


def _finish(out_dir: Path, config: dict, failures: list) -> int:
    if failures:
        _write_json(out_dir / "errors.json", config, {"errors": failures})
        for failure in failures:
            print(f"error [{failure['stratum']}]: {failure['error']}", file=sys.stderr)
        return 1
    return 0


def _load(args, config: dict, out_dir: Path):
    manifest = DatasetManifest(
        data_path=_resolve_data_path(args.data),
        region_map_path=args.region_map,
        year_min=args.years[0],
        year_max=args.years[1],
        panel_kind=args.panel,
    )
    panel, report = load_panel(manifest)
    _write_json(out_dir / "load_report.json", config, {
        "countries": report.countries,
        "years": list(report.years),
        "dropped": report.dropped,
        "balanced_members": report.balanced_members,
    })
    return panel


def _sub_panel(panel, stratum, developed):
    development = stratum["development"]
    return stratify(
        panel,
        region=stratum["region"],
        development=development,
        developed_countries=developed if development else None,
    )


# ------------------------------------------------------------------ commands


def cmd_fit(args) -> int:
    out_dir = Path(args.out)
    config = _base_config(args, command="fit")
    panel = _load(args, config, out_dir)
    developed = development_split(panel)[0]
    strata = _expand_strata(args)
    rows = {}

    def worker(stratum):
        sub = _sub_panel(panel, stratum, developed)
        growth = sub.growth_arrays()[2]
        fit = fit_aep(growth, bootstrap_fallback=args.bootstrap, seed=args.seed)
        label = stratum["label"]
        _write_json(out_dir / f"fit_{label}.json", config, fit.to_json_dict())
        _write_csv(out_dir / f"fit_hist_{label}.csv", config,
                   _histogram_csv(growth))
        _write_csv(out_dir / f"fit_curve_{label}.csv", config,
                   _curve_csv(growth, fit.params))
        rows[label] = fit

    failures = _run_strata(strata, worker, args.jobs)

    lines = ["stratum,n,b_l,se_b_l,b_r,se_b_r,a_l,se_a_l,a_r,se_a_r,m,se_m,"
             "loglik,converged"]
    for stratum in strata:
        label = stratum["label"]
        if label not in rows:
            continue
        fit = rows[label]
        se = fit.std_errors or {}
        p = fit.params

        def cell(value):
            return "" if value is None else format(value, ".17g")

        lines.append(
            f"{label},{fit.n},{cell(p.b_l)},{cell(se.get('b_l'))},"
            f"{cell(p.b_r)},{cell(se.get('b_r'))},{cell(p.a_l)},{cell(se.get('a_l'))},"
            f"{cell(p.a_r)},{cell(se.get('a_r'))},{cell(p.m)},{cell(se.get('m'))},"
            f"{cell(fit.loglik)},{str(fit.converged).lower()}"
        )
    if rows:
        _write_csv(out_dir / "fit_table.csv", config, "\n".join(lines) + "\n")
    return _finish(out_dir, config, failures)


def _histogram_csv(values: np.ndarray, n_bins: int = 40) -> str:
    counts, edges = np.histogram(values, bins=n_bins)
    width = np.diff(edges)
    empirical = counts / (counts.sum() * width)
    lines = ["bin_left,bin_right,count,empirical_density"]
    for left, right, count, dens in zip(edges[:-1], edges[1:], counts, empirical):
        lines.append(f"{left:.17g},{right:.17g},{count},{dens:.17g}")
    return "\n".join(lines) + "\n"


def _curve_csv(values: np.ndarray, params: AepParams, n_points: int = 301) -> str:
    grid = np.linspace(values.min(), values.max(), n_points)
    curve = density(grid, params)
    lines = ["x,density"]
    for x, y in zip(grid, curve):
        lines.append(f"{x:.17g},{y:.17g}")
    return "\n".join(lines) + "\n"


def cmd_scale(args) -> int:
    out_dir = Path(args.out)
    config = _base_config(args, command="scale")
    panel = _load(args, config, out_dir)
    developed = development_split(panel)[0]
    strata = _expand_strata(args)
    methods = ("binned", "alad") if args.method == "both" else (args.method,)

    def worker(stratum):
        sub = _sub_panel(panel, stratum, developed)
        label = stratum["label"]
        index = next(i for i, s in enumerate(strata) if s["label"] == label)
        if "binned" in methods:
            fit, bins = binned_beta(sub, n_bins=args.bins)
            _write_json(out_dir / f"scale_binned_{label}.json", config,
                        fit.to_json_dict(bins=bins))
            _write_csv(out_dir / f"scale_bins_{label}.csv", config,
                       bin_stats_csv(bins))
        if "alad" in methods:
            fit = fit_alad(sub, bootstrap=args.bootstrap, seed=[args.seed, index])
            _write_json(out_dir / f"scale_alad_{label}.json", config,
                        fit.to_json_dict())

    failures = _run_strata(strata, worker, args.jobs)
    return _finish(out_dir, config, failures)


def cmd_roll(args) -> int:
    out_dir = Path(args.out)
    config = _base_config(args, command="roll")
    panel = _load(args, config, out_dir)
    developed = development_split(panel)[0]
    strata = _expand_strata(args)
    window_jobs = args.jobs if len(strata) == 1 else 1

    def worker(stratum):
        sub = _sub_panel(panel, stratum, developed)
        label = stratum["label"]
        series = roll(
            sub, window_length=args.window, step=args.step,
            bootstrap=args.bootstrap, seed=[args.seed], jobs=window_jobs,
        )
        _write_csv(out_dir / f"roll_{label}.csv", config, rolling_csv(series))
        segments = [
            {"start": start, "end": end, "significant": significant}
            for start, end, significant in significance_segments(series)
        ]
        _write_json(out_dir / f"roll_segments_{label}.json", config, {
            "window_length": series.window_length,
            "step": series.step,
            "segments": segments,
        })

    failures = _run_strata(strata, worker, args.jobs)
    return _finish(out_dir, config, failures)


def cmd_synth(args) -> int:
    out_dir = Path(args.out)
    config = _base_config(args, command="synth")
    fields = {}
    if args.spec_file:
        loaded = json.loads(Path(args.spec_file).read_text(encoding="utf-8"))
        if "shock" in loaded:
            loaded["shock"] = AepParams(**loaded["shock"])
        fields.update(loaded)
    overrides = {
        "n_countries": args.countries,
        "n_years": args.n_years,
        "alpha": args.alpha,
        "phi1": args.phi1,
        "beta": args.beta,
        "shock": args.shock,
        "start_year": args.start_year,
        "seed": args.seed,
    }
    fields.update({k: v for k, v in overrides.items() if v is not None})
    try:
        spec = SynthSpec(**fields)
    except (TypeError, ValueError) as exc:
        print(f"error [spec]: {exc}", file=sys.stderr)
        _write_json(out_dir / "errors.json", config, {
            "errors": [{"stratum": "spec", "error": str(exc),
                        "type": type(exc).__name__}],
        })
        return 1
    panel = generate(spec)
    _write_csv(out_dir / "synth_panel.csv", config, panel_to_long_csv(panel))
    # Synthetic country ids are unknown to the bundled region table, so emit
    # a companion map (round-robin over the taxonomy) that makes the panel
    # loadable: pass it back via --region-map.
    map_lines = ["country,region"]
    for i, country in enumerate(spec.country_ids()):
        map_lines.append(f"{country},{REGIONS[i % len(REGIONS)]}")
    _write_csv(out_dir / "synth_region_map.csv", config,
               "\n".join(map_lines) + "\n")
    shock = spec.shock
    _write_json(out_dir / "synth_spec.json", config, {"spec": {
        "n_countries": spec.n_countries,
        "n_years": spec.n_years,
        "alpha": spec.alpha,
        "phi1": spec.phi1,
        "beta": spec.beta,
        "shock": {"b_l": shock.b_l, "b_r": shock.b_r,
                  "a_l": shock.a_l, "a_r": shock.a_r, "m": shock.m},
        "size_profile": spec.size_profile.tolist(),
        "seed": spec.seed,
        "start_year": spec.start_year,
        "burn_in": spec.burn_in,
        "fixed_sizes": spec.fixed_sizes,
    }})
    return 0


# ------------------------------------------------------------------- parser


def _base_config(args, command: str) -> dict:
    config = {"command": command, "seed": args.seed, "out": args.out}
    for key in ("data", "region_map", "years", "panel", "region", "split",
                "method", "bins", "window", "step", "bootstrap", "jobs",
                "countries", "n_years", "alpha", "phi1", "beta",
                "start_year", "spec_file"):
        if hasattr(args, key):
            value = getattr(args, key)
            if key == "years":
                value = f"{value[0]}:{value[1]}"
            config[key] = value
    if hasattr(args, "shock") and args.shock is not None:
        s = args.shock
        config["shock"] = {"b_l": s.b_l, "b_r": s.b_r,
                           "a_l": s.a_l, "a_r": s.a_r, "m": s.m}
    elif hasattr(args, "shock"):
        config["shock"] = None
    return config


def _add_panel_arguments(sub):
    sub.add_argument("--data", required=True,
                     help="level CSV (wide or long); relative paths resolve "
                          "against $GROWTHVOL_DATA_DIR when set")
    sub.add_argument("--region-map", default=None, dest="region_map",
                     help="country,region CSV (default: bundled table)")
    sub.add_argument("--years", type=_parse_years, default=(1900, 1999),
                     metavar="A:B", help="year range, inclusive (default 1900:1999)")
    sub.add_argument("--panel", choices=("balanced", "unbalanced"),
                     default="unbalanced",
                     help="keep only countries covering every year, or all")
    sub.add_argument("--region", action="append", metavar="NAME",
                     help="restrict to a region; repeatable; 'all' expands to "
                          "every region (each value adds a stratum)")
    sub.add_argument("--split", action="append",
                     choices=("developed", "developing", "both"),
                     help="restrict to a development half; repeatable")


def _add_common_arguments(sub):
    sub.add_argument("--bootstrap", type=int, default=200,
                     help="bootstrap replicates for standard errors")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--out", required=True, metavar="DIR")
    sub.add_argument("--jobs", type=int, default=1,
                     help="concurrent strata (or windows for roll)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="growthvol",
        description="Growth-rate distribution fitting and volatility-size "
                    "scaling for GDP per capita panels.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    fit = commands.add_parser(
        "fit", help="fit the asymmetric exponential power law to growth rates")
    _add_panel_arguments(fit)
    _add_common_arguments(fit)
    fit.set_defaults(run=cmd_fit)

    scale = commands.add_parser(
        "scale", help="estimate the volatility-size scaling exponent")
    _add_panel_arguments(scale)
    scale.add_argument("--method", choices=("binned", "alad", "both"),
                       default="both")
    scale.add_argument("--bins", type=int, default=15,
                       help="bins for the binned estimator")
    _add_common_arguments(scale)
    scale.set_defaults(run=cmd_scale)

    rolling = commands.add_parser(
        "roll", help="re-estimate the scaling exponent on sliding windows")
    _add_panel_arguments(rolling)
    rolling.add_argument("--window", type=int, default=10,
                         help="window length in growth years")
    rolling.add_argument("--step", type=int, default=1)
    _add_common_arguments(rolling)
    rolling.set_defaults(run=cmd_roll)

    synth = commands.add_parser(
        "synth", help="generate a synthetic panel with known parameters")
    synth.add_argument("--countries", type=int, default=None)
    synth.add_argument("--n-years", type=int, default=None, dest="n_years",
                       help="growth years to generate")
    synth.add_argument("--alpha", type=float, default=None)
    synth.add_argument("--phi1", type=float, default=None)
    synth.add_argument("--beta", type=float, default=None)
    synth.add_argument("--shock", type=_parse_shock, default=None,
                       metavar="FAMILY:PARAMS",
                       help="laplace:A, gaussian:A, or aep:BL,BR,AL,AR")
    synth.add_argument("--start-year", type=int, default=None, dest="start_year")
    synth.add_argument("--spec-file", default=None, dest="spec_file",
                       help="JSON with generator fields; flags override it")
    synth.add_argument("--seed", type=int, default=None)
    synth.add_argument("--out", required=True, metavar="DIR")
    synth.set_defaults(run=cmd_synth)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except Exception as exc:  # noqa: BLE001 - the CLI boundary reports, not raises
        print(f"error: {exc}", file=sys.stderr)
        out = getattr(args, "out", None)
        if out is not None:
            config = _base_config(args, command=args.command)
            _write_json(Path(out) / "errors.json", config, {
                "errors": [{"stratum": "run", "error": str(exc),
                            "type": type(exc).__name__}],
            })
        return 1


if __name__ == "__main__":
    sys.exit(main())
