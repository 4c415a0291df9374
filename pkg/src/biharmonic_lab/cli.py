"""``biharmonic-lab`` command line.

Exit codes: 0 verdict as expected, 1 verdict mismatch, 2 parse or lookup
error, 3 inconclusive.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys

import numpy as np

from . import __version__
from .catalog import get_entry, list_entries
from .errors import BiharmonicError, ParseError, UnknownFamily
from .expr import parse, parse_map, parse_metric
from .fields import Rect
from .harness import GridSpec, ResidualReport, classify, parameter_scan, verify_entry
from .policy import DEFAULT_TOLERANCES, Tolerances, Verdict
from .warped import (ProfileFunction, cone_family, cone_warp, helicoid_family, helicoid_warp,
                     lemaire_family, lemaire_warp, se1_residual)

EXIT_OK, EXIT_MISMATCH, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2, 3

CSV_HEADER = ("x", "y", "tau1", "tau2", "tau_norm", "bitau1", "bitau2", "bitau_norm", "fd_err")
#: options whose values are lists (left alone by the negative-number rewrite)
_MULTI = {"--grid", "--rect"}
_NEGATIVE = re.compile(r"^-[\d.]")


def _num(v) -> str:
    """Shortest round-trip decimal, empty for missing values."""
    return "" if v is None else repr(float(v))


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid", nargs=2, type=int, metavar=("NX", "NY"))
    common.add_argument("--rect", nargs=4, type=float, metavar=("X0", "X1", "Y0", "Y1"))
    common.add_argument("--tol-abs", type=float, default=DEFAULT_TOLERANCES.abs_)
    common.add_argument("--tol-rel", type=float, default=DEFAULT_TOLERANCES.rel)
    common.add_argument("--method", choices=("general", "conformal", "both"), default="general")
    common.add_argument("--format", choices=("json", "csv", "pretty"), default="pretty")
    common.add_argument("--out", help="write output here instead of stdout")

    p = argparse.ArgumentParser(prog="biharmonic-lab",
                                description="Tension and bitension of maps between surfaces.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common],
                       help="classify a catalog family and compare with its expected verdict",
                       epilog="Family parameters are given as --NAME VALUE, e.g. --a 1 --d 2.")
    v.add_argument("id")

    r = sub.add_parser("residual", parents=[common], help="residuals of an inline map")
    r.add_argument("--map", required=True, help='"U; V" in x, y')
    r.add_argument("--domain", default="flat", help='metric in x, y: flat | conformal: rho | '
                   'warped: sigma | general: g11; g12; g22')
    r.add_argument("--target", default="flat", help="metric in u, v (same syntax)")
    r.add_argument("--expect", choices=[x.value for x in Verdict], help="expected verdict")

    s = sub.add_parser("scan", parents=[common], help="classify a family over a parameter lattice",
                       epilog="Ranges: --NAME START:STOP:COUNT, --NAME v1,v2,... or --NAME v. "
                              "--tie d=a makes d follow a.")
    s.add_argument("id")
    s.add_argument("--tie", action="append", default=[], metavar="DST=SRC")

    o = sub.add_parser("ode", parents=[common], help="residual of the reduced profile ODE")
    o.add_argument("--warp", choices=("lemaire", "helicoid", "cone"), required=True)
    o.add_argument("--a", type=float, default=1.0, help="warp parameter (lemaire, helicoid)")
    o.add_argument("--f", required=True,
                   help='family constants "A=1,B=0,C=0.1,D=0" or an expression in x')
    o.add_argument("--xrange", help="START:STOP:COUNT (default: the profile interval, clipped)")
    o.add_argument("--side", type=int, default=1, choices=(1, -1), help="cone side")
    o.add_argument("--formal", action="store_true",
                   help="use the closed form of sigma^2 even where the image leaves the warp chart")

    sub.add_parser("list", parents=[common], help="catalog inventory")

    rp = sub.add_parser("report", parents=[common], help="re-emit a saved JSON report")
    rp.add_argument("path")
    return p


def preprocess(argv: list[str]) -> list[str]:
    """Glue ``--name -1.5`` into ``--name=-1.5`` so negative values parse."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if (tok.startswith("--") and "=" not in tok and tok not in _MULTI and i + 1 < len(argv)
                and _NEGATIVE.match(argv[i + 1])):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def split_params(extras: list[str]) -> dict[str, str]:
    """``--NAME VALUE`` pairs left over by argparse."""
    params = {}
    i = 0
    while i < len(extras):
        tok = extras[i]
        if not tok.startswith("--") or len(tok) < 3:
            raise ParseError(f"unexpected argument {tok!r}")
        if "=" in tok:
            name, value = tok[2:].split("=", 1)
            i += 1
        else:
            if i + 1 >= len(extras) or extras[i + 1].startswith("--"):
                raise ParseError(f"parameter {tok} needs a value")
            name, value = tok[2:], extras[i + 1]
            i += 2
        params[name] = value
    return params


def _float(text: str, what: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"{what}: {text!r} is not a number") from None


def parse_range(text: str, what: str = "range") -> list[float]:
    """``start:stop:count`` (inclusive), ``v1,v2,...`` or a single value."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ParseError(f"{what}: expected START:STOP:COUNT, got {text!r}")
        lo, hi = _float(parts[0], what), _float(parts[1], what)
        try:
            n = int(parts[2])
        except ValueError:
            raise ParseError(f"{what}: count {parts[2]!r} is not an integer") from None
        if n < 0:
            raise ParseError(f"{what}: negative count")
        return [float(v) for v in np.linspace(lo, hi, n)] if n != 1 else [lo]
    if not text:
        return []
    return [_float(t, what) for t in text.split(",")]


def parse_assignments(text: str) -> dict[str, float]:
    out = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        if "=" not in part:
            raise ParseError(f"expected NAME=VALUE, got {part!r}")
        k, v = part.split("=", 1)
        out[k.strip()] = _float(v, k.strip())
    return out


def _tolerances(args) -> Tolerances:
    return Tolerances(args.tol_abs, args.tol_rel, DEFAULT_TOLERANCES.fd_abs)


def _grid(args, default_rect: Rect | None = None) -> GridSpec:
    nx, ny = args.grid or (21, 21)
    rect = Rect(*args.rect) if args.rect else default_rect
    return GridSpec(rect, nx, ny)


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------
def report_csv(rep: ResidualReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for p in rep.points:
        w.writerow([_num(p[k]) for k in CSV_HEADER])
    return buf.getvalue()


def read_report_csv(text: str) -> list[dict]:
    rows = list(csv.DictReader(io.StringIO(text)))
    return [{k: (None if r[k] == "" else float(r[k])) for k in CSV_HEADER} for r in rows]


def report_pretty(rep: ResidualReport) -> str:
    c, a = rep.config, rep.aggregates
    lines = [f"verdict: {rep.verdict}"]
    if c.get("catalog_id"):
        lines.append(f"family: {c['catalog_id']}  params: {c['params']}")
    if "expected_verdict" in c:
        lines.append(f"expected: {c['expected_verdict']}")
    lines.append(f"map: {c['map']}  domain: {c['domain_metric']}  target: {c['target_metric']}")
    lines.append(f"method: {c['method']}  points: {a['n_points']}  errors: {a['n_errors']}")
    lines.append(f"max |tau|_h    = {a['max_tau_norm']:.6g} at {a['argmax_tau']}")
    lines.append(f"max |tau2|_h   = {a['max_bitau_norm']:.6g} at {a['argmax_bitau']}")
    lines.append(f"max fd error   = {a['max_fd_err']:.3g}")
    if "max_gap" in a:
        lines.append(f"max formula gap = {a['max_gap']:.3g}")
    return "\n".join(lines) + "\n"


def render_report(rep: ResidualReport, fmt: str) -> str:
    if fmt == "json":
        return rep.to_json()
    if fmt == "csv":
        return report_csv(rep)
    return report_pretty(rep)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _verdict_exit(verdict: str, expected: str | None) -> int:
    if verdict == Verdict.INCONCLUSIVE.value:
        return EXIT_INCONCLUSIVE
    if expected is not None and verdict != expected:
        return EXIT_MISMATCH
    return EXIT_OK


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------
def cmd_verify(args, params: dict) -> int:
    entry = get_entry(args.id)
    values = {k: _float(v, f"--{k}") for k, v in params.items()}
    fix = entry.build(values)
    rep, expected = verify_entry(args.id, values, _grid(args, fix.rect), args.method, _tolerances(args))
    _emit(render_report(rep, args.format), args.out)
    return _verdict_exit(rep.verdict, expected)


def cmd_residual(args, params: dict) -> int:
    if params:
        raise ParseError(f"residual takes no family parameters: {sorted(params)}")
    fmap = parse_map(args.map)
    gM = parse_metric(args.domain, ("x", "y"))
    gN = parse_metric(args.target, ("u", "v"))
    grid = _grid(args, Rect(-1.0, 1.0, -1.0, 1.0))
    rep = classify(fmap, gM, gN, grid, args.method, _tolerances(args))
    if args.expect:
        rep.config["expected_verdict"] = args.expect
    _emit(render_report(rep, args.format), args.out)
    return _verdict_exit(rep.verdict, args.expect)


def cmd_scan(args, params: dict) -> int:
    entry = get_entry(args.id)
    ranges = {k: parse_range(v, f"--{k}") for k, v in params.items()}
    tied = {}
    for t in args.tie:
        if "=" not in t:
            raise ParseError(f"--tie expects DST=SRC, got {t!r}")
        dst, src = (s.strip() for s in t.split("=", 1))
        tied[dst] = src
    grid = _grid(args)
    table = parameter_scan(entry.id, ranges, grid, args.method, _tolerances(args), tied)
    names = list(entry.defaults)
    if args.format == "json":
        text = json.dumps({"meta": {"tool": "biharmonic-lab", "version": __version__, "schema": 1},
                           "config": {"catalog_id": entry.id, "method": args.method,
                                      "tolerances": _tolerances(args).as_dict(),
                                      "ranges": ranges, "tied": tied},
                           "rows": [r.as_dict() for r in table.rows]}, indent=2) + "\n"
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(names + ["verdict", "expected", "max_tau_norm", "max_bitau_norm", "max_fd_err"])
        for r in table.rows:
            w.writerow([_num(r.params[k]) for k in names] + [r.verdict, r.expected, _num(r.max_tau_norm),
                                                             _num(r.max_bitau_norm), _num(r.max_fd_err)])
        text = buf.getvalue()
    else:
        lines = [f"{entry.id}: {len(table)} rows"]
        for r in table.rows:
            ps = " ".join(f"{k}={r.params[k]:g}" for k in names)
            flag = "" if r.verdict == r.expected else "  (expected " + r.expected + ")"
            lines.append(f"  {ps}  {r.verdict}  |tau2|={r.max_bitau_norm:.3g}{flag}")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    if any(r.verdict == Verdict.INCONCLUSIVE.value for r in table.rows):
        return EXIT_INCONCLUSIVE
    return EXIT_MISMATCH if any(r.verdict != r.expected for r in table.rows) else EXIT_OK


#: half-width used when the profile interval is unbounded
ODE_DEFAULT_HALF = 2.0
ODE_TOL = 1e-9


def _ode_profile(args):
    if args.warp == "lemaire":
        warp = lemaire_warp(args.a)
    elif args.warp == "helicoid":
        warp = helicoid_warp(args.a)
    else:
        warp = cone_warp(args.side)
    if "=" in args.f:
        c = parse_assignments(args.f)
        unknown = set(c) - set("ABCD")
        if unknown:
            raise ParseError(f"unknown family constants {sorted(unknown)}; use A, B, C, D")
        A, B, C, D = (c.get(k, 0.0) for k in "ABCD")
        if args.warp == "lemaire":
            f = lemaire_family(A, B, C, D, args.a)
        elif args.warp == "helicoid":
            f = helicoid_family(A, B, C, D)
        else:
            f = cone_family(A, B, C, D)
    else:
        f = ProfileFunction(parse(args.f, ("x",)), name=args.f.strip())
    return warp, f


def cmd_ode(args, params: dict) -> int:
    if params:
        raise ParseError(f"unknown options for ode: {sorted(params)}")
    warp, f = _ode_profile(args)
    if args.xrange:
        xs = np.array(parse_range(args.xrange, "--xrange"))
    else:
        lo, hi = f.interval
        lo = max(lo, -ODE_DEFAULT_HALF) + (0.1 if lo > -ODE_DEFAULT_HALF else 0.0)
        hi = min(hi, ODE_DEFAULT_HALF) - (0.1 if hi < ODE_DEFAULT_HALF else 0.0)
        xs = np.linspace(lo, hi, 101)
    if xs.size == 0:
        raise ParseError("--xrange is empty")
    f.check(xs)
    res = se1_residual(f, warp, xs, formal=args.formal)
    tol = args.tol_abs if args.tol_abs != DEFAULT_TOLERANCES.abs_ else ODE_TOL
    worst = int(np.argmax(np.abs(res)))
    max_res = float(abs(res[worst]))
    verdict = "Solution" if max_res <= tol else "NotSolution"
    doc = {"meta": {"tool": "biharmonic-lab", "version": __version__, "schema": 1},
           "config": {"warp": warp.name, "profile": f.name, "params": f.params, "tol": tol,
                      "interval": [float(v) for v in f.interval]},
           "points": [{"x": float(x), "residual": float(r)} for x, r in zip(xs, res)],
           "aggregates": {"n_points": int(xs.size), "max_abs_residual": max_res,
                          "argmax": float(xs[worst])},
           "verdict": verdict}
    if args.format == "json":
        text = json.dumps(doc, indent=2) + "\n"
    elif args.format == "csv":
        text = "x,residual\n" + "".join(f"{_num(x)},{_num(r)}\n" for x, r in zip(xs, res))
    else:
        text = (f"warp: {warp.name}  profile: {f.name} {f.params}\n"
                f"max |residual| = {max_res:.6g} at x = {xs[worst]:g} over {xs.size} points\n"
                f"verdict: {verdict} (tol {tol:g})\n")
    _emit(text, args.out)
    return EXIT_OK if verdict == "Solution" else EXIT_MISMATCH


def cmd_list(args, params: dict) -> int:
    entries = list_entries()
    if args.format == "json":
        text = json.dumps([{"id": e.id, "title": e.title, "defaults": e.defaults,
                            "expected": e.expected_verdict(), "provenance": e.provenance}
                           for e in entries], indent=2) + "\n"
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["id", "expected", "provenance", "defaults", "title"])
        for e in entries:
            w.writerow([e.id, e.expected_verdict(), e.provenance,
                        ";".join(f"{k}={v!r}" for k, v in e.defaults.items()), e.title])
        text = buf.getvalue()
    else:
        width = max(len(e.id) for e in entries)
        text = "".join(f"{e.id:<{width}}  {e.expected_verdict():<17}  {e.title}\n" for e in entries)
    _emit(text, args.out)
    return EXIT_OK


def cmd_report(args, params: dict) -> int:
    try:
        with open(args.path, encoding="utf-8") as fh:
            rep = ResidualReport.from_json(fh.read())
    except (OSError, ValueError, KeyError) as exc:
        raise ParseError(f"cannot read report {args.path!r}: {exc}") from None
    _emit(render_report(rep, args.format), args.out)
    return _verdict_exit(rep.verdict, rep.config.get("expected_verdict"))


COMMANDS = {"verify": cmd_verify, "residual": cmd_residual, "scan": cmd_scan, "ode": cmd_ode,
            "list": cmd_list, "report": cmd_report}


def main(argv: list[str] | None = None) -> int:
    argv = preprocess(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        args, extras = parser.parse_known_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code not in (0, None) else EXIT_OK
    try:
        params = split_params(extras)
        return COMMANDS[args.command](args, params)
    except (ParseError, UnknownFamily) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except BiharmonicError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
