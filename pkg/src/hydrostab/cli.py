"""Command-line interface: ``hydrostab check|dispersion|decay|scan|presets``.

Exit codes: 0 certified (or, for non-``check`` commands, success), 1 not
certified, 2 malformed input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys

from . import __version__
from .catalog import PRESETS, ScanSpec, UnknownPreset, load_preset, run_scan
from .decay import DEFAULT_FIT_WINDOW, InitialProfile, decay_norm_trace, default_time_grid
from .dispersion import NumericalError, scan_branches
from .hyperbolicity import DEFAULT_TOL, AmbiguousClassification
from .model import ConfigError, DomainError, ModelParameters, load_config
from .report import stability_report, to_json, to_plain

EXIT_OK, EXIT_NOT_CERTIFIED, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3


def resolve_params(source: str) -> ModelParameters:
    """A config file path, or a preset name when no such file exists."""
    if os.path.exists(source):
        return load_config(source)
    if source in PRESETS:
        params = load_preset(source).params
        if params is None:
            raise ConfigError(source, "preset shipped without parameters (search found none)")
        return params
    raise ConfigError(source, f"no such config file or preset (presets: {', '.join(PRESETS)})")


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list) and obj and isinstance(obj[0], (dict, list)):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def _csv_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.12g}"
    if isinstance(v, list):
        return ";".join(_csv_value(x) for x in v)
    return str(v)


def dict_to_csv(data: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["field", "value"])
    for key, value in _flatten(data):
        w.writerow([key, _csv_value(value)])
    return buf.getvalue()


def _emit(args, text: str):
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_check(args) -> int:
    report = stability_report(resolve_params(args.config), tol=args.tol)
    data = report.to_dict()
    _emit(args, to_json(data) if args.format == "json" else dict_to_csv(to_plain(data)))
    if not report.certified:
        fails = ", ".join(report.dissipativity.failures) or "none recorded"
        print(f"not certified: {fails}", file=sys.stderr)
        return EXIT_NOT_CERTIFIED
    return EXIT_OK


def cmd_dispersion(args) -> int:
    scan = scan_branches(resolve_params(args.config), args.xi_lo, args.xi_hi, args.n)
    _emit(args, scan.to_csv() if args.format == "csv" else to_json(scan.to_dict()))
    return EXIT_OK


def _parse_amplitudes(text: str, key: str) -> tuple:
    try:
        vals = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise ConfigError(key, f"expected four comma-separated numbers, got {text!r}") from None
    if len(vals) != 4:
        raise ConfigError(key, f"expected four components, got {len(vals)}")
    return vals


def cmd_decay(args) -> int:
    params = resolve_params(args.config)
    if not (0 < args.t_lo < args.t_hi):
        raise ConfigError("t-lo", "need 0 < t-lo < t-hi")
    try:
        profile = InitialProfile(width=args.profile_width,
                                 amplitudes=_parse_amplitudes(args.amplitudes, "amplitudes"),
                                 vdot_amplitudes=_parse_amplitudes(args.vdot_amplitudes, "vdot-amplitudes"))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError("profile", str(exc)) from None
    times = default_time_grid(args.t_lo, args.t_hi, args.n_times)
    trace = decay_norm_trace(params, profile, s=args.s, t_grid=times,
                             fit_window=(args.t_lo, args.t_hi), epsrel=args.epsrel)
    _emit(args, trace.to_csv() if args.format == "csv" else to_json(trace.to_dict()))
    return EXIT_OK


def cmd_scan(args) -> int:
    result = run_scan(ScanSpec.load(args.scanspec))
    _emit(args, result.to_csv() if args.format == "csv" else to_json(result.to_dict()))
    return EXIT_OK


def cmd_presets(args) -> int:
    rows = []
    for p in PRESETS.values():
        rows.append({"name": p.name, "family": p.family.value,
                     "expected_verdict": p.expected_verdict.value,
                     "expected_causal": p.expected_causal,
                     "params": p.params.to_dict() if p.params else None,
                     "provenance": p.provenance_note})
    if args.format == "json":
        _emit(args, to_json(rows))
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "family", "expected_verdict", "expected_causal", "provenance"])
        for r in rows:
            w.writerow([r["name"], r["family"], r["expected_verdict"], _csv_value(r["expected_causal"]),
                        r["provenance"]])
        _emit(args, buf.getvalue())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default=None,
                        help="output format (default: json for check/presets, csv otherwise)")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL,
                        help=f"tolerance for equality tests in classification (default {DEFAULT_TOL:g})")
    common.add_argument("-o", "--output", default=None, help="write output to a file instead of stdout")

    parser = argparse.ArgumentParser(prog="hydrostab", description=__doc__.splitlines()[0],
                                     formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p = sub.add_parser("check", parents=[common], formatter_class=fmt,
                       help="full stability report; exit 0 iff certified")
    p.add_argument("config", help="key = value config file or preset name")
    p.set_defaults(func=cmd_check, default_format="json")

    p = sub.add_parser("dispersion", parents=[common], formatter_class=fmt,
                       help="continuity-tracked dispersion branches")
    p.add_argument("config")
    p.add_argument("--xi-lo", type=float, default=1e-4, help="smallest wave number")
    p.add_argument("--xi-hi", type=float, default=1e4, help="largest wave number")
    p.add_argument("--n", type=int, default=200, help="log-spaced grid points")
    p.set_defaults(func=cmd_dispersion, default_format="csv")

    p = sub.add_parser("decay", parents=[common], formatter_class=fmt,
                       help="Sobolev-norm decay of a Gaussian radial perturbation")
    p.add_argument("config")
    p.add_argument("--s", type=float, default=0.0, help="Sobolev index (0 gives L2)")
    p.add_argument("--profile-width", type=float, default=1.0, help="Gaussian width w")
    p.add_argument("--t-lo", type=float, default=DEFAULT_FIT_WINDOW[0], help="first sample time and fit start")
    p.add_argument("--t-hi", type=float, default=DEFAULT_FIT_WINDOW[1], help="last sample time and fit end")
    p.add_argument("--n-times", type=int, default=40, help="log-spaced samples (t = 0 is always added)")
    p.add_argument("--amplitudes", default="1,0,0,0",
                   help="initial amplitudes (temperature, longitudinal, transverse, transverse)")
    p.add_argument("--vdot-amplitudes", default="0,0,0,0", help="initial time-derivative amplitudes")
    p.add_argument("--epsrel", type=float, default=1e-8, help="relative quadrature tolerance")
    p.set_defaults(func=cmd_decay, default_format="csv")

    p = sub.add_parser("scan", parents=[common], formatter_class=fmt,
                       help="grid scan from a JSON scan spec (workers: HYDROSTAB_WORKERS)")
    p.add_argument("scanspec")
    p.set_defaults(func=cmd_scan, default_format="csv")

    p = sub.add_parser("presets", parents=[common], formatter_class=fmt, help="list shipped presets")
    p.set_defaults(func=cmd_presets, default_format="json")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.format is None:
        args.format = args.default_format
    try:
        return args.func(args)
    except (ConfigError, UnknownPreset) as exc:
        key = getattr(exc, "key", None) or getattr(exc, "name", "")
        print(f"error: malformed input [{key}]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"error: malformed input [{exc.filename}]: {exc.strerror}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, DomainError, AmbiguousClassification, FloatingPointError,
            ArithmeticError) as exc:
        print(f"error: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
