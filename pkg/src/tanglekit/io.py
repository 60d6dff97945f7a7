"""Canonical JSON text formats for tangles, weighted tangles, TL elements and maps.

All writers emit compact JSON (no insignificant whitespace) with keys in a
fixed order, so equal values serialize to identical bytes.  Loop indices
follow the preorder of the loop forest; writers renumber loops into that
order first, which is a no-op for canonical tangles.
"""
from __future__ import annotations

import json
from fractions import Fraction

from .errors import ParseError
from .poly import TwoParamPoly
from .tangle import BLACK, LOOP, OUTER, WHITE, Disc, Tangle
from .tl import TLDiagram, TLElement
from .weighted import WeightedTangle, segments


def _dump(obj):
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def _load(text):
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        return json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None


class _Reader:
    """Small schema checker that reports the JSON path of the offending value."""

    def __init__(self, path="$"):
        self.path = path

    def fail(self, msg, path=None):
        raise ParseError(f"{path or self.path}: {msg}")

    def obj(self, v, keys, path, optional=()):
        if not isinstance(v, dict):
            self.fail("expected an object", path)
        extra = set(v) - set(keys) - set(optional)
        if extra:
            self.fail(f"unexpected keys {sorted(extra)}", path)
        missing = [k for k in keys if k not in v]
        if missing:
            self.fail(f"missing keys {missing}", path)
        return v

    def lst(self, v, path):
        if not isinstance(v, list):
            self.fail("expected a list", path)
        return v

    def int(self, v, path, lo=None):
        if isinstance(v, bool) or not isinstance(v, int):
            self.fail(f"expected an integer, got {v!r}", path)
        if lo is not None and v < lo:
            self.fail(f"expected an integer >= {lo}, got {v}", path)
        return v


R = _Reader()


# ---------------------------------------------------------------------------
# tangles


def _point_json(e):
    d, p = e
    return ["outer", p] if d == OUTER else ["inner", d, p]


def _anchor_json(a):
    d, s = a
    if d == LOOP:
        return ["loop", s]
    return ["outer", s] if d == OUTER else ["inner", d, s]


def _point_parse(v, path):
    R.lst(v, path)
    if len(v) == 2 and v[0] == "outer":
        return (OUTER, R.int(v[1], path + "[1]", 0))
    if len(v) == 3 and v[0] == "inner":
        return (R.int(v[1], path + "[1]", 0), R.int(v[2], path + "[2]", 0))
    R.fail(f"expected [\"outer\", i] or [\"inner\", d, i], got {v!r}", path)


def _anchor_parse(v, path):
    if isinstance(v, list) and len(v) == 2 and v[0] == "loop":
        return (LOOP, R.int(v[1], path + "[1]", 0))
    return _point_parse(v, path)


def loop_preorder(t):
    """Old loop ids in forest preorder (roots and children by increasing id)."""
    kids = {}
    roots = []
    for l, a in enumerate(t.loops):
        if a[0] == LOOP:
            kids.setdefault(a[1], []).append(l)
        else:
            roots.append(l)
    order = []
    stack = list(reversed(roots))
    while stack:
        l = stack.pop()
        order.append(l)
        stack.extend(reversed(kids.get(l, [])))
    if len(order) != len(t.loops):
        raise ParseError("loop forest has a cycle")
    return order


def _renumber_loops(t, order):
    new = {old: i for i, old in enumerate(order)}

    def fix(a):
        return (LOOP, new[a[1]]) if a[0] == LOOP else a

    loops = tuple(fix(t.loops[old]) for old in order)
    nesting = tuple((c, fix(a)) for c, a in t.nesting)
    return Tangle(t.outer, t.inner, t.strands, nesting, loops, t.shading)


def _disc_json(d):
    return {"arity": d.arity, "base": d.base}


def tangle_to_obj(t):
    order = loop_preorder(t)
    t = _renumber_loops(t, order)
    kids = {}
    for l, a in enumerate(t.loops):
        if a[0] == LOOP:
            kids.setdefault(a[1], []).append(l)

    def node(l):
        return [node(c) for c in kids.get(l, [])]

    forest = [[_anchor_json(a), node(l)] for l, a in enumerate(t.loops) if a[0] != LOOP]
    return {
        "outer": _disc_json(t.outer),
        "inner": [_disc_json(d) for d in t.inner],
        "strands": [[_point_json(a), _point_json(b)] for a, b in t.strands],
        "nesting": [{"component": _anchor_json(c), "parent_region": _anchor_json(a)} for c, a in t.nesting],
        "loops": forest,
        "shading": t.shading,
    }


def _disc_parse(v, path):
    R.obj(v, ["arity", "base"], path)
    arity = R.int(v["arity"], path + ".arity", 0)
    base = v["base"]
    if arity == 0:
        if base is not None:
            R.fail("an arity-0 disc has no base point (use null)", path + ".base")
    else:
        R.int(base, path + ".base", 0)
    return Disc(arity, base)


def tangle_from_obj(v, path="$"):
    R.obj(v, ["outer", "inner", "strands", "nesting", "loops", "shading"], path)
    outer = _disc_parse(v["outer"], path + ".outer")
    inner = tuple(_disc_parse(d, f"{path}.inner[{i}]") for i, d in enumerate(R.lst(v["inner"], path + ".inner")))
    strands = []
    for i, s in enumerate(R.lst(v["strands"], path + ".strands")):
        p = f"{path}.strands[{i}]"
        if not isinstance(s, list) or len(s) != 2:
            R.fail("a strand is a pair of endpoints", p)
        strands.append((_point_parse(s[0], p + "[0]"), _point_parse(s[1], p + "[1]")))
    nesting = []
    for i, n in enumerate(R.lst(v["nesting"], path + ".nesting")):
        p = f"{path}.nesting[{i}]"
        R.obj(n, ["component", "parent_region"], p)
        nesting.append((_point_parse(n["component"], p + ".component"),
                        _anchor_parse(n["parent_region"], p + ".parent_region")))
    loops = []

    def walk(children, parent, p):
        for i, ch in enumerate(R.lst(children, p)):
            me = len(loops)
            loops.append((LOOP, parent))
            walk(ch, me, f"{p}[{i}]")

    for i, root in enumerate(R.lst(v["loops"], path + ".loops")):
        p = f"{path}.loops[{i}]"
        if not isinstance(root, list) or len(root) != 2:
            R.fail("a loop root is [anchor, children]", p)
        me = len(loops)
        loops.append(_anchor_parse(root[0], p + "[0]"))
        walk(root[1], me, p + "[1]")
    shading = v["shading"]
    if shading not in (WHITE, BLACK):
        R.fail(f"shading must be \"w\" or \"b\", got {shading!r}", path + ".shading")
    try:
        return Tangle(outer, inner, tuple(strands), tuple(nesting), tuple(loops), shading)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{path}: {exc}") from None


def serialize_tangle(t):
    return _dump(tangle_to_obj(t))


def parse_tangle(text):
    return tangle_from_obj(_load(text))


# ---------------------------------------------------------------------------
# weighted tangles


def weighted_to_obj(wt):
    t = wt.tangle
    order = loop_preorder(t)
    obj = tangle_to_obj(t)
    obj["weights"] = {
        "strands": [wt.strand_weights[s] for s in t.strands],
        "segments": [wt.segment_weights[c] for c in segments(t)],
        "loops": [wt.loop_weights[l] for l in order],
    }
    return obj


def weighted_from_obj(v, path="$"):
    if not isinstance(v, dict) or "weights" not in v:
        R.fail("missing key 'weights'", path)
    rest = {k: x for k, x in v.items() if k not in ("weights", "diagnostics")}
    t = tangle_from_obj(rest, path)
    w = R.obj(v["weights"], ["strands", "segments", "loops"], path + ".weights")
    sw = [R.int(x, f"{path}.weights.strands[{i}]") for i, x in enumerate(R.lst(w["strands"], path))]
    gw = [R.int(x, f"{path}.weights.segments[{i}]") for i, x in enumerate(R.lst(w["segments"], path))]
    lw = [R.int(x, f"{path}.weights.loops[{i}]") for i, x in enumerate(R.lst(w["loops"], path))]
    segs = segments(t)
    if len(sw) != len(t.strands) or len(gw) != len(segs) or len(lw) != len(t.loops):
        R.fail("weight lists do not match the tangle's strands, segments and loops", path + ".weights")
    return WeightedTangle(t, dict(zip(t.strands, sw)), dict(zip(segs, gw)), tuple(lw))


def serialize_weighted(wt, diagnostics=None):
    obj = weighted_to_obj(wt)
    if diagnostics is not None:
        obj["diagnostics"] = diagnostics
    return _dump(obj)


def parse_weighted(text):
    return weighted_from_obj(_load(text))


# ---------------------------------------------------------------------------
# TL elements


def poly_to_obj(p):
    return [[m, n, c] for m, n, c in p.sorted_terms()]


def poly_from_obj(v, path):
    terms = {}
    for i, t in enumerate(R.lst(v, path)):
        p = f"{path}[{i}]"
        if not isinstance(t, list) or len(t) != 3:
            R.fail("a term is [m, n, c]", p)
        m, n, c = R.int(t[0], p, 0), R.int(t[1], p, 0), R.int(t[2], p)
        terms[(m, n)] = terms.get((m, n), 0) + c
    return TwoParamPoly(terms)


def tl_to_obj(x):
    return {
        "n": x.n,
        "shading": x.shading,
        "terms": [{"matching": [list(pr) for pr in d.pairs], "coeff": poly_to_obj(c)} for d, c in x.items()],
    }


def tl_from_obj(v, path="$"):
    R.obj(v, ["n", "terms"], path, optional=["shading"])
    n = R.int(v["n"], path + ".n", 0)
    shading = v.get("shading", WHITE)
    if shading not in (WHITE, BLACK):
        R.fail(f"shading must be \"w\" or \"b\", got {shading!r}", path + ".shading")
    terms = {}
    for i, t in enumerate(R.lst(v["terms"], path + ".terms")):
        p = f"{path}.terms[{i}]"
        R.obj(t, ["matching", "coeff"], p)
        pairs = []
        for j, pr in enumerate(R.lst(t["matching"], p + ".matching")):
            if not isinstance(pr, list) or len(pr) != 2:
                R.fail("a matching entry is a pair of points", f"{p}.matching[{j}]")
            pairs.append((R.int(pr[0], p, 0), R.int(pr[1], p, 0)))
        try:
            d = TLDiagram.from_pairs(n, pairs)
        except (ValueError, IndexError) as exc:
            raise ParseError(f"{p}.matching: {exc}") from None
        c = poly_from_obj(t["coeff"], p + ".coeff")
        terms[d] = terms[d] + c if d in terms else c
    return TLElement(n, terms, shading)


def serialize_tl(x):
    return _dump(tl_to_obj(x))


def parse_tl(text):
    return tl_from_obj(_load(text))


# ---------------------------------------------------------------------------
# real rational maps


def decimal_text(c):
    """Exact decimal text for a rational with a terminating expansion, else ``"n/d"``."""
    c = Fraction(c)
    den = c.denominator
    k2 = k5 = 0
    while den % 2 == 0:
        den //= 2
        k2 += 1
    while den % 5 == 0:
        den //= 5
        k5 += 1
    if den != 1:
        return f"{c.numerator}/{c.denominator}"
    k = max(k2, k5)
    scaled = c * 10 ** k
    digits = str(abs(scaled.numerator))
    sign = "-" if c < 0 else ""
    if k == 0:
        return sign + digits
    digits = digits.rjust(k + 1, "0")
    whole, frac = digits[:-k], digits[-k:].rstrip("0")
    return sign + whole + ("." + frac if frac else "")


def map_to_obj(f):
    return {"p": [decimal_text(c) for c in f.p], "q": [decimal_text(c) for c in f.q]}


def _coeff_parse(v, path):
    if isinstance(v, bool):
        R.fail("expected a number", path)
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError):
            R.fail(f"not a decimal number: {v!r}", path)
    R.fail(f"expected a number, got {v!r}", path)


def map_from_obj(v, path="$"):
    from .realmaps import RealRationalMap

    R.obj(v, ["p", "q"], path)
    p = [_coeff_parse(c, f"{path}.p[{i}]") for i, c in enumerate(R.lst(v["p"], path + ".p"))]
    q = [_coeff_parse(c, f"{path}.q[{i}]") for i, c in enumerate(R.lst(v["q"], path + ".q"))]
    return RealRationalMap(p, q)


def serialize_map(f):
    return _dump(map_to_obj(f))


def parse_map(text):
    return map_from_obj(_load(text))


# ---------------------------------------------------------------------------
# evaluation requests


def parse_eval_request(text):
    v = _load(text)
    R.obj(v, ["tangle", "inputs"], "$")
    t = tangle_from_obj(v["tangle"], "$.tangle")
    inputs = [tl_from_obj(x, f"$.inputs[{i}]") for i, x in enumerate(R.lst(v["inputs"], "$.inputs"))]
    return t, inputs


def serialize_eval_request(t, inputs):
    return _dump({"tangle": tangle_to_obj(t), "inputs": [tl_to_obj(x) for x in inputs]})


def dumps(obj):
    return _dump(obj)


__all__ = [
    "decimal_text",
    "dumps",
    "loop_preorder",
    "map_from_obj",
    "map_to_obj",
    "parse_eval_request",
    "parse_map",
    "parse_tangle",
    "parse_tl",
    "parse_weighted",
    "serialize_eval_request",
    "serialize_map",
    "serialize_tangle",
    "serialize_tl",
    "serialize_weighted",
    "tangle_from_obj",
    "tangle_to_obj",
    "tl_from_obj",
    "tl_to_obj",
    "weighted_from_obj",
    "weighted_to_obj",
]
