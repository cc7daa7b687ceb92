"""Command-line front end.

    lyapspec pressure --map gauss --t-min 0.6 --t-max 3 --format csv
    lyapspec spectrum --map luroth-logdir-5 --alpha-min 0.5 --alpha-max 8 --format svg -o spec.svg
    lyapspec classify --map mp
    lyapspec newton --map luroth-dyadic --alpha 1.3862944
    lyapspec lyapunov --map gauss --orbits 10000 --steps 1000 --seed 7
    lyapspec oracle --lengths 0.5,0.25,0.25 --depth 14 --delta 0.02 --alpha-steps 11

Options may also come from a JSON file given with --config; keys are the
option names (dashes or underscores) and flags on the command line win.
Exit status: 0 success, 2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import __version__
from .errors import (
    ConvergenceError,
    DivergentError,
    DomainError,
    EmptyLevelSetError,
    LyapSpecError,
    NoRootError,
    NotParabolicError,
    OutOfDomainError,
    UnsupportedTailError,
    ValidationError,
)
from .io import csv_text, fmt, json_text, write_output
from .maps import PRESETS, lyapunov_mc, map_from_record
from .oracle import alpha_grid, oracle_vs_legendre
from .plot import EmptyPlotError, pressure_svg, spectrum_svg
from .pressure import PLATEAU_TOL, detect_t_inf, find_root_d, pressure_curve
from .spectrum import dom_L, spectrum_curve, spectrum_point

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
COMMANDS = ("pressure", "spectrum", "classify", "newton", "lyapunov", "oracle")
CONFIG_ERRORS = (ValidationError, DomainError, OutOfDomainError, UnsupportedTailError, NotParabolicError)
NUMERIC_ERRORS = (ConvergenceError, NoRootError, DivergentError, EmptyLevelSetError, EmptyPlotError,
                  ArithmeticError, LyapSpecError)


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


# ---------------------------------------------------------------- parsing


def parse_map(spec):
    """Preset name, inline JSON object, path to a JSON file, or an already-decoded record."""
    if isinstance(spec, dict):
        return map_from_record(spec)
    if not isinstance(spec, str):
        raise ValidationError("--map must be a preset, a JSON object or a JSON file")
    text = spec.strip()
    if text.startswith("{"):
        try:
            rec = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"--map is not valid JSON: {exc}") from None
        return map_from_record(rec)
    if text in PRESETS:
        return map_from_record(text)
    if os.path.isfile(text):
        try:
            with open(text, encoding="utf-8") as fh:
                rec = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read map file {text}: {exc}") from None
        return map_from_record(rec)
    raise ValidationError(f"unknown map {text!r}; presets: {', '.join(sorted(PRESETS))}")


def parse_lengths(spec):
    if isinstance(spec, (list, tuple)):
        vals = spec
    else:
        vals = [v for v in str(spec).split(",") if v.strip()]
    try:
        return [float(v) for v in vals]
    except (TypeError, ValueError):
        raise ValidationError(f"cannot parse lengths {spec!r}") from None


def default_range(T):
    """t grid used when --t-min/--t-max are omitted."""
    t_inf = detect_t_inf(T)
    t_min = t_inf + 0.05 if math.isfinite(t_inf) else -1.0
    return t_min, 3.0


def _curve_options(p):
    p.add_argument("--map", required=False, help="preset name, JSON record or JSON file")
    p.add_argument("--t-min", type=float)
    p.add_argument("--t-max", type=float)
    p.add_argument("--depth", type=int, default=2, help="word length of the partition sums (1..4)")
    p.add_argument("--cutoff", type=int, help="largest explicit symbol")
    p.add_argument("--tol", type=float, default=PLATEAU_TOL, help="plateau tolerance")


def _output_options(p, formats, default):
    p.add_argument("--format", choices=formats, default=default)
    p.add_argument("-o", "--output", help="output file (default: standard output)")
    p.add_argument("--config", help="JSON file with option values")


def build_parser():
    parser = _Parser(prog="lyapspec", description="Pressure and Lyapunov spectra of countable Markov interval maps.")
    parser.add_argument("--version", action="version", version=f"lyapspec {__version__}")
    parser.add_argument("--config", help="JSON file with option values")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("pressure", help="certified pressure curve")
    _curve_options(p)
    p.add_argument("--steps", type=int, default=50, help="t grid points")
    _output_options(p, ("csv", "json", "svg"), "csv")

    p = sub.add_parser("spectrum", help="Lyapunov spectrum on an alpha grid")
    _curve_options(p)
    p.add_argument("--t-steps", type=int, default=50, help="t grid points of the underlying curve")
    p.add_argument("--alpha-min", type=float)
    p.add_argument("--alpha-max", type=float)
    p.add_argument("--steps", type=int, default=50, help="alpha grid points")
    _output_options(p, ("csv", "json", "svg"), "csv")

    p = sub.add_parser("classify", help="t_inf, d, kind and continuity type")
    _curve_options(p)
    p.add_argument("--steps", type=int, default=50, help="t grid points")
    _output_options(p, ("text", "json", "csv"), "text")

    p = sub.add_parser("newton", help="S-Newton value, tangency point and Legendre value at one alpha")
    _curve_options(p)
    p.add_argument("--steps", type=int, default=50, help="t grid points")
    p.add_argument("--alpha", type=float)
    _output_options(p, ("text", "json", "csv"), "text")

    p = sub.add_parser("lyapunov", help="Monte-Carlo Lyapunov exponent")
    p.add_argument("--map")
    p.add_argument("--orbits", type=int, default=10_000)
    p.add_argument("--steps", type=int, default=1_000, help="steps per orbit")
    p.add_argument("--seed", type=int, help="random seed (required)")
    _output_options(p, ("text", "json", "csv"), "text")

    p = sub.add_parser("oracle", help="brute-force level-set oracle against the closed-form spectrum")
    p.add_argument("--lengths", default="0.5,0.25,0.25")
    p.add_argument("--depth", type=int, default=14)
    p.add_argument("--delta", type=float, default=0.02)
    p.add_argument("--alpha-steps", type=int, default=11)
    p.add_argument("--margin", type=float, default=0.05, help="distance of the grid from the spectrum ends")
    _output_options(p, ("csv", "json"), "csv")
    return parser, sub


def _load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return {k.replace("-", "_"): v for k, v in cfg.items()}


def parse_args(argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    cfg = _load_config(known.config) if known.config else {}
    argv = list(argv)
    cmd = cfg.pop("command", None)
    if not any(a in COMMANDS for a in argv):
        if cmd is None:
            if {"-h", "--help", "--version"} & set(argv):
                build_parser()[0].parse_args(argv)
            raise ConfigError("no command given")
        argv = [cmd] + argv
    parser, sub = build_parser()
    if cfg:
        name = next(a for a in argv if a in COMMANDS)
        sp = sub.choices[name]
        dests = {a.dest for a in sp._actions} - {"help"}
        unknown = sorted(set(cfg) - dests)
        if unknown:
            raise ConfigError(f"unknown config keys for {name}: {', '.join(unknown)}")
        sp.set_defaults(**cfg)
    args = parser.parse_args(argv)
    if args.command is None:
        raise ConfigError("no command given")
    return args


# ---------------------------------------------------------------- commands


def _require(args, *names):
    for n in names:
        if getattr(args, n, None) is None:
            raise ConfigError(f"--{n.replace('_', '-')} is required for {args.command}")


def _curve(args, steps):
    T = parse_map(args.map)
    lo, hi = default_range(T)
    t_min = lo if args.t_min is None else args.t_min
    t_max = hi if args.t_max is None else args.t_max
    return pressure_curve(T, t_min, t_max, steps=steps, depth=args.depth, cutoff=args.cutoff, tol=args.tol)


def _key_values(args, pairs):
    if args.format == "json":
        return json_text(dict(pairs))
    if args.format == "csv":
        return csv_text([k for k, _ in pairs], [[v for _, v in pairs]])
    return "".join(f"{k}={fmt(v)}\n" for k, v in pairs)


def cmd_pressure(args):
    _require(args, "map")
    c = _curve(args, args.steps)
    if args.format == "json":
        return json_text(c.to_record())
    if args.format == "svg":
        return pressure_svg(c)
    rows = zip(c.t, c.p_lower, c.p_upper, c.p_mid, c.p_prime)
    return csv_text(["t", "p_lower", "p_upper", "p_mid", "p_prime"], rows)


def cmd_spectrum(args):
    _require(args, "map")
    c = _curve(args, args.t_steps)
    dom = dom_L(c)
    # the non-parabolic endpoint -b_P has no support line, so start just inside
    a_lo = args.alpha_min if args.alpha_min is not None else (0.05 if dom.parabolic else dom.alpha_min + 0.05)
    a_hi = args.alpha_max if args.alpha_max is not None else a_lo + 5.0
    pts = spectrum_curve(c, a_lo, a_hi, args.steps)
    if args.format == "svg":
        return spectrum_svg(pts, title=f"Lyapunov spectrum of {c.map.name}")
    if args.format == "json":
        return json_text({
            "map": c.map.record(),
            "domain": {"alpha_min": dom.alpha_min, "interior": list(dom.interior),
                       "dashed_from": dom.dashed_from, "plateau_to": dom.plateau_to},
            "points": [{"alpha": p.alpha, "t_alpha": p.t_alpha, "F": p.F, "L": p.L,
                        "L_err": p.L_err, "case": p.case} for p in pts],
        })
    rows = ((p.alpha, p.t_alpha, p.F, p.L, p.L_err, p.case) for p in pts)
    return csv_text(["alpha", "t_alpha", "F", "L", "L_err", "case"], rows)


def cmd_classify(args):
    _require(args, "map")
    c = _curve(args, args.steps)
    d = find_root_d(c)
    return _key_values(args, [("t_inf", c.t_inf), ("d", d), ("kind", c.kind.value), ("ctype", c.ctype.value)])


def cmd_newton(args):
    _require(args, "map", "alpha")
    c = _curve(args, args.steps)
    p = spectrum_point(c, args.alpha)
    return _key_values(args, [("t_alpha", p.t_alpha), ("Ns", p.L), ("F", p.F), ("L_err", p.L_err),
                              ("case", p.case)])


def cmd_lyapunov(args):
    _require(args, "map", "seed")
    T = parse_map(args.map)
    est = lyapunov_mc(T, args.orbits, args.steps, args.seed)
    return _key_values(args, [("mean", est.mean), ("stderr", est.stderr), ("orbits", args.orbits),
                              ("steps", args.steps), ("seed", args.seed), ("resampled", est.resampled)])


def cmd_oracle(args):
    lengths = parse_lengths(args.lengths)
    grid = alpha_grid(lengths, args.alpha_steps, args.margin)
    rep = oracle_vs_legendre(lengths, grid, args.delta, args.depth)
    if args.format == "json":
        return json_text({
            "lengths": lengths, "depth": rep.depth, "delta": rep.delta,
            "max_deviation": rep.max_deviation, "gaps": rep.gaps,
            "rows": [{"alpha": r.alpha, "count": r.count, "cover_exponent": r.cover_exponent,
                      "legendre_value": r.legendre_value, "abs_dev": r.abs_dev} for r in rep.rows],
        })
    rows = ((r.alpha, r.count, r.cover_exponent, r.legendre_value, r.abs_dev) for r in rep.rows)
    return csv_text(["alpha", "count", "cover_exponent", "legendre_value", "abs_dev"], rows)


HANDLERS = {
    "pressure": cmd_pressure, "spectrum": cmd_spectrum, "classify": cmd_classify,
    "newton": cmd_newton, "lyapunov": cmd_lyapunov, "oracle": cmd_oracle,
}


def _check_threads():
    raw = os.environ.get("LYAPSPEC_THREADS", "").strip()
    if raw and (not raw.isdigit() or int(raw) < 1):
        raise ConfigError(f"LYAPSPEC_THREADS must be a positive integer, got {raw!r}")


def run(argv=None) -> int:
    """Parse, compute, write.  Nothing is written unless the whole output was produced."""
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        _check_threads()
        args = parse_args(argv)
        text = HANDLERS[args.command](args)
        write_output(args.output, text)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CONFIG_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NUMERIC_ERRORS as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
