"""Command-line front end: ``bwshift {analyze,orbit,matrix,norms,validate} CONFIG``.

CONFIG is a JSON file or the name of a bundled preset. Exit codes: 0 ok,
2 configuration error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
import warnings

import numpy as np

from . import config as cfgmod
from .basis import monomial_expansion, monomial_norm
from .core import BilateralVector, NormKind
from .dynamics import REPORT_KEYS, Thresholds, analyze
from .errors import BWShiftError, ConfigError, EdgeDominated
from .orbit import detect_limit_point, simulate_orbit
from .seqexpr import validate_config
from .shiftmatrix import assemble_matrix, decompose, essential_spectrum_estimate

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


# ------------------------------------------------------------------ output

def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if x == int(x) and abs(x) < 1e16:
        return repr(float(x))
    return format(x, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with keys in insertion order and floats at 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in seq) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if hasattr(obj, "value") and isinstance(obj.value, str):   # enums
        return json.dumps(obj.value)
    return json.dumps(str(obj))


def _csv(rows) -> str:
    buf = io.StringIO()
    for row in rows:
        buf.write(",".join(_fmt_float(float(x)).strip('"') if isinstance(x, (float, np.floating))
                           else str(x) for x in row) + "\n")
    return buf.getvalue()


def _emit(text: str, out):
    if out:
        with open(out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


# ------------------------------------------------------------------ parsing

def _window(text):
    try:
        lo, hi = (int(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected MIN:MAX, got {text!r}") from None
    return lo, hi


def _json_arg(text):
    """Inline JSON or @path."""
    if text.startswith("@"):
        try:
            with open(text[1:]) as f:
                text = f.read()
        except OSError as exc:
            raise ConfigError(f"cannot read {text[1:]}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON argument: {exc.msg}") from None


def _threshold(text):
    key, _, val = text.partition("=")
    if key not in Thresholds().to_dict():
        raise argparse.ArgumentTypeError(f"unknown threshold {key!r}")
    try:
        return key, float(val)
    except ValueError:
        raise argparse.ArgumentTypeError(f"threshold {key} needs a number") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", help="config JSON file or preset name (" + ", ".join(cfgmod.PRESETS) + ")")
    common.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    common.add_argument("--window", type=_window, metavar="MIN:MAX", help="override the index window")
    common.add_argument("--horizon", type=int, metavar="N", help="number of powers examined (default 48)")
    common.add_argument("--nmax", type=int, metavar="N", help="indices n = 1..N sampled for 'for all n' (default 8)")
    common.add_argument("--threads", type=int, default=1, metavar="N", help="worker threads for per-n families")
    common.add_argument("--format", choices=("json", "csv"), default="json", help="output format")

    p = argparse.ArgumentParser(prog="bwshift", description="Bilateral weighted backward shifts on "
                                "spaces of analytic functions on an annulus.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="boundedness and dynamics verdicts")
    a.add_argument("--threshold", type=_threshold, action="append", default=[], metavar="KEY=VALUE",
                   help="override a heuristic threshold, e.g. diverge=1e12")

    o = sub.add_parser("orbit", parents=[common], help="orbit of a vector and limit-point detection")
    o.add_argument("--vector", metavar="JSON|@FILE", help='Schauder coefficients, e.g. {"2": 0.25}')
    o.add_argument("--steps", type=int, metavar="N", help="largest power")
    o.add_argument("--schedule", choices=("all", "powers_of_two"), help="which powers to record")
    o.add_argument("--candidates", metavar="JSON|@FILE", help="list of candidate vectors")
    o.add_argument("--tolerance", type=float, metavar="EPS", help="limit-point tolerance (default 1e-3)")

    m = sub.add_parser("matrix", parents=[common], help="truncated matrix and decomposition")
    m.add_argument("--power", type=int, metavar="NU", help="matrix of B_w^NU (default 1)")
    m.add_argument("--i-max", type=int, metavar="N", help="number of subdiagonals in the decomposition (default 60)")

    n = sub.add_parser("norms", parents=[common], help="monomial norms and expansions")
    n.add_argument("--monomials", type=_window, default=(0, 4), metavar="MIN:MAX", help="range of nu (default 0:4)")

    sub.add_parser("validate", parents=[common], help="check the standing assumptions and estimate the radii")
    return p


# ---------------------------------------------------------------- commands

def _experiment(args, validate=True):
    return cfgmod.load(args.config, window=args.window, validate=validate)


def cmd_analyze(args) -> str:
    exp = _experiment(args)
    th = Thresholds(**{**exp.thresholds.to_dict(), **dict(args.threshold)})
    horizon = args.horizon or exp.horizon
    n_max = args.nmax or exp.n_max
    rep = analyze(exp.shift, horizon, n_max, th, threads=args.threads)
    if args.format == "csv":
        rows = [("criterion", "status")]
        for k in REPORT_KEYS:
            v = rep[k]
            rows.append((k, v["status"] if isinstance(v, dict) else ("null" if v is None else str(v).lower())))
        return _csv(rows)
    return dumps(rep) + "\n"


def cmd_orbit(args) -> str:
    exp = _experiment(args)
    cfg, block = exp.shift, exp.orbit
    vec = _json_arg(args.vector) if args.vector else block.get("vector")
    if vec is None:
        raise ConfigError("no vector given: use --vector or an 'orbit' block in the config")
    steps = args.steps or block.get("steps", 16)
    schedule = args.schedule or block.get("schedule", "all")
    tol = args.tolerance or block.get("tolerance", 1e-3)
    cands_raw = _json_arg(args.candidates) if args.candidates else block.get("candidates")
    try:
        v0 = BilateralVector.from_mapping(cfgmod.parse_vector(vec), cfg.window)
        cands = None if cands_raw is None else [
            BilateralVector.from_mapping(cfgmod.parse_vector(c), cfg.window) for c in cands_raw]
    except IndexError as exc:
        raise ConfigError(str(exc)) from None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", EdgeDominated)
        recs = simulate_orbit(cfg, v0, steps, cands, schedule)
    if cands is None:
        cands = [BilateralVector.unit(k, cfg.window) for k in range(-2, 3)]
    nonzero = [i for i, c in enumerate(cands) if np.any(c.coeffs)]
    if args.format == "csv":
        head = ["step", "norm"] + [f"dist_{i}" for i in range(len(cands))] + ["edge_fraction"]
        rows = [head] + [[r.step, r.norm.to_real(), *r.distances, r.edge_fraction] for r in recs]
        return _csv(rows)
    limits = []
    if len(recs) >= 3:
        for rep in detect_limit_point(recs, tol):
            if rep.candidate in nonzero:
                limits.append(rep.to_dict())
    doc = {
        "config": exp.shift.name,
        "space": cfg.params.label(),
        "steps": steps,
        "schedule": schedule,
        "candidates": [c.to_mapping() for c in cands],
        "records": [r.to_dict() for r in recs],
        "limit_points": limits,
        "edge_dominated_steps": [r.step for r in recs if r.edge_dominated],
    }
    return dumps(doc) + "\n"


def cmd_matrix(args) -> str:
    exp = _experiment(args)
    cfg, block = exp.shift, exp.matrix
    nu = args.power or block.get("power", 1)
    w = block.get("window")
    window = (w["min"], w["max"]) if w and args.window is None else cfg.window
    M = assemble_matrix(cfg, nu, window)
    if args.format == "csv":
        idx = M.index
        rows = [["row\\col"] + [int(i) for i in idx]]
        rows += [[int(i)] + list(M.entries[k]) for k, i in enumerate(idx)]
        return _csv(rows)
    dec = decompose(cfg, i_max=args.i_max or block.get("i_max", 60))
    try:
        ess = essential_spectrum_estimate(dec).to_dict()
    except BWShiftError as exc:
        ess = {"status": "Inconclusive", "note": str(exc)}
    doc = {
        "power": nu,
        "window": list(window),
        "superdiagonal": {str(k): v for k, v in M.diagonal(nu).items()},
        "decomposition": {
            "window": list(dec.window),
            "alpha": dec.alpha,
            "c": dec.c,
            "T_norms": dec.T_norms,
            "tail_bound": dec.tail_bound,
            "compact": dec.compact,
            "essential_spectrum": ess,
        },
    }
    return dumps(doc) + "\n"


def cmd_norms(args) -> str:
    exp = _experiment(args)
    cfg = exp.shift
    lo, hi = args.monomials
    p = cfg.params.p if cfg.params.norm_kind is NormKind.LP else math.inf
    rows = []
    for nu in range(lo, hi + 1):
        mn = monomial_norm(nu, cfg, strict=False)
        ex = monomial_expansion(nu, cfg) if mn.member else None
        rows.append({"nu": nu, "norm": mn.value,
                     "norm_p": mn.value ** p if math.isfinite(p) else None,
                     "member": mn.member, "terms": mn.terms, "tail_bound": mn.tail_bound,
                     "expansion_head": [] if ex is None else list(ex.coeffs[:6])})
    if args.format == "csv":
        out = [("nu", "norm", "norm_p", "member", "terms")]
        out += [(r["nu"], r["norm"], "" if r["norm_p"] is None else r["norm_p"], str(r["member"]).lower(),
                 r["terms"]) for r in rows]
        return _csv(out)
    return dumps({"space": cfg.params.label(), "monomials": rows}) + "\n"


def cmd_validate(args) -> str:
    exp = _experiment(args, validate=False)
    cfg = exp.shift
    rep = validate_config(cfg._a, cfg._b, cfg._w, cfg.window, cfg.params.basis_variant)
    d = {"config": cfg.name, "valid": True, **rep.to_dict()}
    if args.format == "csv":
        return _csv([("key", "value"), ("valid", "true"), ("r", rep.r), ("R", rep.R),
                     ("assumption2", rep.assumption2)])
    return dumps(d) + "\n"


COMMANDS = {"analyze": cmd_analyze, "orbit": cmd_orbit, "matrix": cmd_matrix, "norms": cmd_norms,
            "validate": cmd_validate}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)      # exits with status 2 on bad flags
    try:
        text = COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"bwshift: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BWShiftError, ArithmeticError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"bwshift: numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    _emit(text, args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
