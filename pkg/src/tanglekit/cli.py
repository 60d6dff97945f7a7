"""Command-line interface: ``tanglekit <subcommand> ...``.

Exit status 0 on success, 1 on domain errors (invalid tangles, parse
errors, numerical failures), 2 on usage errors.
"""
from __future__ import annotations

import argparse
import os
import sys

from . import io
from .errors import TangleError
from .partition import evaluate
from .tangle import OUTER, canonicalize, compose, validate
from .tl import tl_basis, tl_multiply, tl_trace


class UsageError(Exception):
    pass


class _DomainError(Exception):
    pass


def _read(arg):
    """Inline JSON if the argument starts with ``{``, ``-`` for stdin, else a file path."""
    if arg.lstrip().startswith("{"):
        return arg
    if arg == "-":
        return sys.stdin.read()
    try:
        with open(arg, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {arg}: {exc.strerror}") from None


def _precision():
    raw = os.environ.get("TANGLEKIT_PRECISION")
    if not raw:
        return None
    try:
        digits = int(raw)
    except ValueError:
        raise UsageError(f"TANGLEKIT_PRECISION must be an integer, got {raw!r}") from None
    if not 1 <= digits <= 17:
        raise UsageError("TANGLEKIT_PRECISION must lie in 1..17")
    return digits


def _round_floats(obj, digits):
    if digits is None:
        return obj
    if isinstance(obj, float):
        return float(f"{obj:.{digits}g}")
    if isinstance(obj, list):
        return [_round_floats(x, digits) for x in obj]
    if isinstance(obj, dict):
        return {k: _round_floats(v, digits) for k, v in obj.items()}
    if isinstance(obj, str) and digits is not None:
        try:
            return repr(float(f"{float(obj):.{digits}g}"))
        except ValueError:
            return obj
    return obj


def _tangle_text(t):
    lines = [f"outer: arity {t.outer.arity}, base {t.outer.base}, shading {t.shading}"]
    for i, d in enumerate(t.inner):
        lines.append(f"disc {i}: arity {d.arity}, base {d.base}")

    def pt(e):
        return f"outer:{e[1]}" if e[0] == OUTER else f"disc{e[0]}:{e[1]}"

    for a, b in t.strands:
        lines.append(f"strand {pt(a)} -- {pt(b)}")
    for c, a in t.nesting:
        lines.append(f"component at {c} sits in region {a}")
    for l, a in enumerate(t.loops):
        lines.append(f"loop {l} sits in region {a}")
    return "\n".join(lines)


def _tl_text(x):
    if x.is_zero():
        return "0"
    return "\n".join(f"{c}  {list(d.pairs)}" for d, c in x.items())


def cmd_validate(args):
    t = io.parse_tangle(_read(args.tangle))
    problems = validate(t)
    if args.format == "json":
        out = io.dumps({"valid": not problems, "violations": [{"kind": v.kind, "detail": v.detail} for v in problems]})
    else:
        out = "valid" if not problems else "\n".join(f"invalid: {v}" for v in problems)
    return out, (1 if problems else 0)


def cmd_canon(args):
    t = canonicalize(io.parse_tangle(_read(args.tangle)))
    return (io.serialize_tangle(t) if args.format == "json" else _tangle_text(t)), 0


def cmd_compose(args):
    t = io.parse_tangle(_read(args.outer))
    s = io.parse_tangle(_read(args.inner))
    try:
        r = compose(t, args.j, s)
    except IndexError as exc:
        raise _DomainError(f"IndexError: {exc}") from None
    return (io.serialize_tangle(r) if args.format == "json" else _tangle_text(r)), 0


def cmd_tl_basis(args):
    basis = tl_basis(args.n)
    if args.format == "json":
        return io.dumps({"n": args.n, "basis": [[list(p) for p in d.pairs] for d in basis]}), 0
    return "\n".join(str(list(d.pairs)) for d in basis), 0


def cmd_tl_mul(args):
    a = io.parse_tl(_read(args.a))
    b = io.parse_tl(_read(args.b))
    r = tl_multiply(a, b)
    return (io.serialize_tl(r) if args.format == "json" else _tl_text(r)), 0


def cmd_tl_trace(args):
    p = tl_trace(io.parse_tl(_read(args.a)))
    if args.format == "json":
        return io.dumps({"trace": io.poly_to_obj(p)}), 0
    return str(p), 0


def cmd_eval(args):
    t, inputs = io.parse_eval_request(_read(args.request))
    r = evaluate(t, inputs)
    return (io.serialize_tl(r) if args.format == "json" else _tl_text(r)), 0


def cmd_enumerate(args):
    from .weighted import enumerate_genus0

    items = enumerate_genus0(args.d)
    if args.format == "json":
        return io.dumps({"d": args.d, "count": len(items), "tangles": [io.weighted_to_obj(w) for w in items]}), 0
    return "\n".join([f"{len(items)} weighted tangles of degree {args.d}"] + [io.serialize_weighted(w) for w in items]), 0


def _map_arg(args):
    return io.parse_map(_read(args.map))


def cmd_extract(args):
    from .realmaps import extract_tangle

    e = extract_tangle(_map_arg(args), resolution=args.resolution, tol=args.tol)
    diag = _round_floats(e.diagnostics, _precision())
    if args.format == "json":
        return io.serialize_weighted(e, diag), 0
    lines = [_tangle_text(e.tangle), f"total weight {diag['total_weight']}",
             f"weight sum mismatch: {diag['weight_sum_mismatch']}",
             f"critical points: {diag['critical_points']}", f"critical values: {diag['critical_values']}"]
    return "\n".join(lines), 0


def cmd_stability(args):
    from .realmaps import stability_report

    r = stability_report(_map_arg(args), args.eps, args.trials, seed=args.seed, resolution=args.resolution)
    obj = {"stable": r.stable and not r.inconclusive, "trials": r.trials, "resampled": r.resampled,
           "failures": r.failures, "inconclusive": r.inconclusive}
    if args.format == "json":
        return io.dumps(obj), 0
    return " ".join(f"{k}={v}" for k, v in obj.items()), 0


def cmd_render(args):
    from .render import render_svg

    text = _read(args.tangle)
    obj = io._load(text)
    x = io.weighted_from_obj(obj) if isinstance(obj, dict) and "weights" in obj else io.tangle_from_obj(obj)
    return render_svg(x), 0


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json",
                        help="canonical JSON (default) or human-readable text")
    common.add_argument("-o", "--output", help="write the result here instead of stdout")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized subcommands")

    p = argparse.ArgumentParser(prog="tanglekit", description="Planar tangles, Temperley-Lieb algebras, real maps.")
    sub = p.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("validate", cmd_validate, "check a tangle for violations")
    sp.add_argument("tangle")
    sp = add("canon", cmd_canon, "canonical form of a tangle")
    sp.add_argument("tangle")
    sp = add("compose", cmd_compose, "glue S into internal disc j of T")
    sp.add_argument("outer", metavar="T")
    sp.add_argument("j", type=int)
    sp.add_argument("inner", metavar="S")
    sp = add("tl-basis", cmd_tl_basis, "diagram basis of TL_n")
    sp.add_argument("n", type=int)
    sp = add("tl-mul", cmd_tl_mul, "product of two TL elements")
    sp.add_argument("a")
    sp.add_argument("b")
    sp = add("tl-trace", cmd_tl_trace, "closure trace of a TL element")
    sp.add_argument("a")
    sp = add("eval", cmd_eval, "partition function of a tangle on TL inputs")
    sp.add_argument("request")
    sp = add("enumerate", cmd_enumerate, "weighted genus-0 tangles of degree d")
    sp.add_argument("d", type=int)
    sp = add("extract", cmd_extract, "weighted tangle of a real rational map")
    sp.add_argument("map")
    sp.add_argument("--resolution", type=float, default=0.02)
    sp.add_argument("--tol", type=float, default=1e-8)
    sp = add("stability", cmd_stability, "is the extracted tangle stable under perturbation")
    sp.add_argument("map")
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--trials", type=int, required=True)
    sp.add_argument("--resolution", type=float, default=0.02)
    sp = add("render", cmd_render, "draw a tangle as SVG")
    sp.add_argument("tangle")
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        out, status = args.fn(args)
    except UsageError as exc:
        print(f"tanglekit: error: {exc}", file=sys.stderr)
        return 2
    except TangleError as exc:
        print(f"tanglekit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except _DomainError as exc:
        print(f"tanglekit: {exc}", file=sys.stderr)
        return 1
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(out if out.endswith("\n") else out + "\n")
    else:
        sys.stdout.write(out if out.endswith("\n") else out + "\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
