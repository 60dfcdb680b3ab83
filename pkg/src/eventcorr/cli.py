"""Command-line front end.

Configuration is a flat ``key=value`` text file plus ``--key value``
command-line overrides. All lengths are meters with c = 1; ``d_t``
additionally accepts a value with an ``s`` suffix (seconds), converted by
the speed of light. Subcommands: predict, sweep, threshold, compare,
validate. Sweep and compare write delimited data and, unless disabled,
render a matplotlib figure next to the output file.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__
from . import experiment as ex
from . import formalism as fm
from .errors import ConfigError, ConvergenceError, DomainError, RegimeError, ResourceError
from .geometry import SchwarzschildBackground
from .spectra import EventSmearing, GaussianSpectrum, load_grid_spectrum
from .validate import run_all

SPEED_OF_LIGHT = 2.99792458e8  # m/s
GEOSTATIONARY_RADIUS = 4.2164e7  # m

CONFIG_KEYS = (
    "mass_length",
    "r_base",
    "h",
    "x_m",
    "x_p",
    "x_d1",
    "x_d2",
    "t_d1",
    "t_d2",
    "d_t",
    "chi_max",
    "alpha_max",
    "k0",
    "sigma_k",
    "variant",
    "formalism",
    "source",
    "spectrum_file",
)

DEFAULTS = {
    "mass_length": "4.4e-3",
    "r_base": "6.38e6",
    "h": "3.0e5",
    "chi_max": "0.1",
    "alpha_max": "1.0",
    "k0": "8.0e6",
    "sigma_k": "1.0e4",
    "variant": "fig3",
    "formalism": "event",
    "source": "parametric",
}

SWEEP_AXES = ("h", "d_t", "mass_length", "chi_max", "alpha_max", "k0", "sigma_k", "x_p", "x_m")

CSV_COLUMNS = ("n1", "n2", "C", "delta", "smearing_factor", "formalism")
CSV_VERSION = "eventcorr-csv v1"

_VARIANT_ALIASES = {
    "fig3": ex.VARIANT_FIG3,
    "satellite_both": ex.VARIANT_FIG3,
    "fig4": ex.VARIANT_FIG4,
    "split_ground_orbit": ex.VARIANT_FIG4,
}


def parse_config_file(path: str) -> dict:
    cfg = {}
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise ConfigError(f"cannot read config file {path}: {err}") from err
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        cfg[key] = value
    return cfg


def _merged_config(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        cfg.update(parse_config_file(args.config))
    for key in CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    return cfg


def _as_float(cfg: dict, key: str) -> float:
    try:
        return float(cfg[key])
    except KeyError as err:
        raise ConfigError(f"missing required key {key!r}") from err
    except ValueError as err:
        raise ConfigError(f"key {key!r}: not a number: {cfg[key]!r}") from err


def _require(cfg: dict, key: str) -> str:
    if key not in cfg:
        raise ConfigError(f"missing required key {key!r}")
    return cfg[key]


def parse_d_t(value: str) -> float:
    """Temporal scale in meters; an ``s`` suffix means seconds."""
    text = value.strip()
    if text.endswith("s") and not text.endswith("es"):
        try:
            return float(text[:-1]) * SPEED_OF_LIGHT
        except ValueError as err:
            raise ConfigError(f"d_t: not a number: {value!r}") from err
    try:
        return float(text)
    except ValueError as err:
        raise ConfigError(f"d_t: not a number: {value!r}") from err


def _variant(cfg: dict) -> str:
    name = cfg["variant"].strip().lower()
    if name not in _VARIANT_ALIASES:
        raise ConfigError(f"variant must be one of {sorted(_VARIANT_ALIASES)}, got {name!r}")
    return _VARIANT_ALIASES[name]


def _formalism(cfg: dict) -> str:
    name = cfg["formalism"].strip().lower()
    if name not in (fm.MODE, fm.EVENT):
        raise ConfigError(f"formalism must be 'mode' or 'event', got {name!r}")
    return name


def build_run(cfg: dict):
    """Background, placed layout, source, smearing, spectrum from a config."""
    bg = SchwarzschildBackground(_as_float(cfg, "mass_length"))
    variant = _variant(cfg)
    r_base = _as_float(cfg, "r_base")
    h = _as_float(cfg, "h")
    x_m = _as_float(cfg, "x_m") if "x_m" in cfg else r_base
    x_p = _as_float(cfg, "x_p") if "x_p" in cfg else r_base + h

    source_kind = cfg["source"].strip().lower()
    if source_kind == "parametric":
        source = fm.SourceModel(kind="parametric", chi_max=_as_float(cfg, "chi_max"))
    elif source_kind == "displacement":
        source = fm.SourceModel(kind="displacement", alpha_max=_as_float(cfg, "alpha_max"))
    elif source_kind == "identity":
        source = fm.SourceModel(kind="identity")
    else:
        raise ConfigError(f"source must be parametric, displacement or identity, got {source_kind!r}")

    if "spectrum_file" in cfg:
        spectrum = load_grid_spectrum(cfg["spectrum_file"])
    else:
        spectrum = GaussianSpectrum(_as_float(cfg, "k0"), _as_float(cfg, "sigma_k"))
    smearing = EventSmearing(parse_d_t(_require(cfg, "d_t")))

    if variant == ex.VARIANT_FIG3:
        x_d1 = _as_float(cfg, "x_d1") if "x_d1" in cfg else GEOSTATIONARY_RADIUS
        t_d1 = _as_float(cfg, "t_d1") if "t_d1" in cfg else 0.0
        t_d2 = _as_float(cfg, "t_d2") if "t_d2" in cfg else t_d1
        x_d2 = _as_float(cfg, "x_d2") if "x_d2" in cfg else x_d1 + 2.0 * (x_p - x_m)
        layout = ex.ExperimentLayout(
            variant=variant,
            x_m=x_m,
            x_p=x_p,
            x_d1=x_d1,
            x_d2=x_d2,
            t_d1=t_d1,
            t_d2=t_d2,
            source_radius=x_d1,
        )
        if "x_d2" not in cfg:
            layout = ex.place_detectors(layout, bg, source)
    else:
        x_d1 = _as_float(cfg, "x_d1") if "x_d1" in cfg else x_m
        x_d2 = _as_float(cfg, "x_d2") if "x_d2" in cfg else x_p
        t_d1 = _as_float(cfg, "t_d1") if "t_d1" in cfg else 0.0
        t_d2 = _as_float(cfg, "t_d2") if "t_d2" in cfg else t_d1
        layout = ex.ExperimentLayout(
            variant=variant,
            x_m=x_m,
            x_p=x_p,
            x_d1=x_d1,
            x_d2=x_d2,
            t_d1=t_d1,
            t_d2=t_d2,
            source_radius=x_p,
        )
        if "t_d2" not in cfg:
            layout = ex.place_detectors(layout, bg, source)

    return bg, layout, source, smearing, spectrum, _formalism(cfg)


# -- output helpers ----------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _csv_lines(rows: list[dict], columns: tuple, cfg: dict) -> str:
    lines = [f"# {CSV_VERSION}"]
    for key in sorted(cfg):
        lines.append(f"# {key}={cfg[key]}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(row[col]) for col in columns))
    return "\n".join(lines) + "\n"


def _write_output(path: str, fmt: str, rows: list[dict], columns: tuple, cfg: dict) -> None:
    if fmt == "csv":
        Path(path).write_text(_csv_lines(rows, columns, cfg))
    else:
        payload = rows[0] if len(rows) == 1 else rows
        Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _check_finite(report: ex.CorrelationReport) -> None:
    for value in (report.n1, report.n2, report.C, report.delta, report.smearing_factor):
        if not math.isfinite(value):
            raise ConvergenceError(f"non-finite value in report: {report}")


def _print_report(report: ex.CorrelationReport) -> None:
    print(f"formalism        : {report.formalism}")
    print(f"singles n1       : {report.n1:.12g}")
    print(f"singles n2       : {report.n2:.12g}")
    print(f"coincidence C    : {report.C:.12g}")
    print(f"delta            : {report.delta:.12g} m")
    print(f"smearing factor  : {report.smearing_factor:.12g}")
    print(f"note             : {report.truncation_note}")


# -- subcommands -------------------------------------------------------------


def cmd_predict(args) -> int:
    cfg = _merged_config(args)
    bg, layout, source, smearing, spectrum, formalism = build_run(cfg)
    report = ex.predict(
        layout, bg, source, smearing, formalism, spectrum=spectrum, weak=args.weak
    )
    _check_finite(report)
    _print_report(report)
    if args.output:
        _write_output(args.output, args.format, [report.to_dict()], CSV_COLUMNS, cfg)
    return 0


def _sweep_rows(cfg: dict, args) -> tuple[list[dict], tuple]:
    axis = args.axis
    if axis not in SWEEP_AXES:
        raise ConfigError(f"sweep axis must be one of {SWEEP_AXES}, got {axis!r}")
    if args.steps < 2:
        raise ConfigError(f"sweep needs steps >= 2, got {args.steps}")
    if axis in ("h", "x_p", "x_m"):
        cfg.pop("x_d2", None)  # re-place detectors at every point
        cfg.pop("t_d2", None)
        if axis == "h":
            cfg.pop("x_p", None)
    rows = []
    for i in range(args.steps):
        value = args.start + (args.stop - args.start) * i / (args.steps - 1)
        point = dict(cfg)
        point[axis] = repr(value)
        bg, layout, source, smearing, spectrum, formalism = build_run(point)
        formalism = args.formalism_override or formalism
        report = ex.predict(
            layout, bg, source, smearing, formalism, spectrum=spectrum, weak=args.weak
        )
        _check_finite(report)
        row = {axis: value}
        row.update(report.to_dict())
        row.pop("truncation_note")
        rows.append(row)
    return rows, (axis,) + CSV_COLUMNS


def cmd_sweep(args) -> int:
    cfg = _merged_config(args)
    args.formalism_override = None
    rows, columns = _sweep_rows(cfg, args)
    if args.output:
        _write_output(args.output, args.format, rows, columns, cfg)
        if args.format == "csv" and not args.no_plot:
            from .plotting import render_sweep_figure

            figure_path = args.plot or str(Path(args.output).with_suffix(".png"))
            render_sweep_figure(args.axis, rows, figure_path)
    else:
        sys.stdout.write(_csv_lines(rows, columns, cfg))
    return 0


def cmd_threshold(args) -> int:
    cfg = _merged_config(args)
    bg = SchwarzschildBackground(_as_float(cfg, "mass_length"))
    smearing = EventSmearing(parse_d_t(_require(cfg, "d_t")))
    r_base = _as_float(cfg, "r_base")
    h_star = ex.threshold_height(bg, smearing, _variant(cfg), r_base)
    print(f"threshold height h* = {h_star:.6g} m ({h_star / 1e3:.4g} km)")
    if args.output:
        Path(args.output).write_text(
            json.dumps({"h_star_m": h_star, "variant": _variant(cfg)}, sort_keys=True) + "\n"
        )
    return 0


def cmd_compare(args) -> int:
    cfg = _merged_config(args)
    if args.axis:
        mode_rows_args = args
        args.formalism_override = fm.MODE
        mode_rows, columns = _sweep_rows(dict(cfg), args)
        args.formalism_override = fm.EVENT
        event_rows, _ = _sweep_rows(dict(cfg), args)
        rows = []
        for m_row, e_row in zip(mode_rows, event_rows):
            row = {args.axis: m_row[args.axis]}
            for col in CSV_COLUMNS[:-1]:
                row[f"mode_{col}"] = m_row[col]
                row[f"event_{col}"] = e_row[col]
            rows.append(row)
        columns = (args.axis,) + tuple(
            f"{tag}_{col}" for col in CSV_COLUMNS[:-1] for tag in ("mode", "event")
        )
        if args.output:
            _write_output(args.output, args.format, rows, columns, cfg)
            if args.format == "csv" and not args.no_plot:
                from .plotting import render_compare_figure

                figure_path = args.plot or str(Path(args.output).with_suffix(".png"))
                render_compare_figure(args.axis, mode_rows, event_rows, figure_path)
        else:
            sys.stdout.write(_csv_lines(rows, columns, cfg))
        return 0

    bg, layout, source, smearing, spectrum, _ = build_run(cfg)
    reports = {}
    for formalism in (fm.MODE, fm.EVENT):
        report = ex.predict(
            layout, bg, source, smearing, formalism, spectrum=spectrum, weak=args.weak
        )
        _check_finite(report)
        reports[formalism] = report
        print(f"--- {formalism} formalism ---")
        _print_report(report)
    if args.output:
        rows = [reports[f].to_dict() for f in (fm.MODE, fm.EVENT)]
        _write_output(args.output, args.format, rows, CSV_COLUMNS, cfg)
    return 0


def cmd_validate(args) -> int:
    results = run_all(flip_mass_sign=args.debug_flip_mass_sign)
    failed = [r for r in results if not r.passed]
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        print(f"[{status}] {result.name}: {result.detail}")
    if args.output:
        Path(args.output).write_text(
            json.dumps([r.to_dict() for r in results], indent=2, sort_keys=True) + "\n"
        )
    return 1 if failed else 0


# -- argument parsing --------------------------------------------------------


def _add_config_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE", help="key=value configuration file")
    for key in CONFIG_KEYS:
        parser.add_argument(f"--{key}", metavar="VALUE", help=argparse.SUPPRESS)


def _add_output_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--output", metavar="PATH", help="write results to this file")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eventcorr",
        description="Mode- and event-formalism correlation rates for optical pulses "
        "propagating radially near a massive body.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_predict = sub.add_parser("predict", help="single-point rate prediction")
    _add_config_options(p_predict)
    _add_output_options(p_predict)
    p_predict.add_argument("--weak", action="store_true", help="first-order parametric gains")
    p_predict.set_defaults(func=cmd_predict)

    p_sweep = sub.add_parser("sweep", help="sweep one parameter, emit CSV/JSON rows")
    _add_config_options(p_sweep)
    _add_output_options(p_sweep)
    p_sweep.add_argument("--axis", required=True, choices=SWEEP_AXES)
    p_sweep.add_argument("--start", required=True, type=float)
    p_sweep.add_argument("--stop", required=True, type=float)
    p_sweep.add_argument("--steps", required=True, type=int)
    p_sweep.add_argument("--weak", action="store_true")
    p_sweep.add_argument("--plot", metavar="PATH", help="figure path (default: output with .png)")
    p_sweep.add_argument("--no-plot", action="store_true", help="skip figure rendering")
    p_sweep.set_defaults(func=cmd_sweep)

    p_threshold = sub.add_parser("threshold", help="solve the decorrelation threshold height")
    _add_config_options(p_threshold)
    p_threshold.add_argument("--output", metavar="PATH", help="write JSON result")
    p_threshold.set_defaults(func=cmd_threshold)

    p_compare = sub.add_parser("compare", help="mode vs event formalism side by side")
    _add_config_options(p_compare)
    _add_output_options(p_compare)
    p_compare.add_argument("--axis", choices=SWEEP_AXES, help="optionally sweep a parameter")
    p_compare.add_argument("--start", type=float, default=0.0)
    p_compare.add_argument("--stop", type=float, default=0.0)
    p_compare.add_argument("--steps", type=int, default=2)
    p_compare.add_argument("--weak", action="store_true")
    p_compare.add_argument("--plot", metavar="PATH")
    p_compare.add_argument("--no-plot", action="store_true")
    p_compare.set_defaults(func=cmd_compare)

    p_validate = sub.add_parser("validate", help="run the built-in invariant suites")
    p_validate.add_argument("--output", metavar="PATH", help="write JSON summary")
    p_validate.add_argument(
        "--debug-flip-mass-sign",
        action="store_true",
        help="debug: negate the mass in the smearing-curve reference (forces a failure)",
    )
    p_validate.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DomainError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (ConvergenceError, ResourceError, RegimeError, FloatingPointError) as err:
        print(f"numeric error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
