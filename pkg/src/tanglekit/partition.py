"""The partition function Z on the Temperley-Lieb planar algebra.

``evaluate(t, inputs)`` substitutes one TL element per internal disc,
resolves strand connectivity by operad composition, removes every closed
loop with its loop parameter, and reads off the outer-boundary diagram.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import EvaluationError, ShadingError, TangleError
from .poly import TwoParamPoly
from .tangle import BLACK, LOOP, OUTER, WHITE, compose, ensure_valid, flip
from .tl import TLDiagram, TLElement


@dataclass(frozen=True)
class OvalNode:
    children: tuple = ()

    def size(self):
        return 1 + sum(c.size() for c in self.children)


@dataclass(frozen=True)
class OvalForest:
    """Closed loops of one region: a rooted forest, children lie directly inside their parent.

    ``colors`` optionally records the inside colour of every loop in preorder;
    when present it must alternate with nesting depth starting from the
    ambient colour.
    """

    roots: tuple = ()
    colors: tuple | None = None
    anchor: tuple | None = None

    def preorder(self):
        out = []

        def walk(node, depth):
            out.append((node, depth))
            for c in node.children:
                walk(c, depth + 1)

        for r in self.roots:
            walk(r, 0)
        return out

    def size(self):
        return sum(r.size() for r in self.roots)


def oval_factor(forest, ambient):
    """``d1^m d2^n``: ``m`` loops with black inside, ``n`` with white inside."""
    if ambient not in (WHITE, BLACK):
        raise ShadingError(f"ambient colour {ambient!r}")
    black = white = 0
    nodes = forest.preorder()
    for i, (_, depth) in enumerate(nodes):
        inside = flip(ambient) if depth % 2 == 0 else ambient
        if forest.colors is not None and forest.colors[i] != inside:
            raise ShadingError(f"loop {i} is recorded {forest.colors[i]!r} but must be {inside!r}")
        if inside == BLACK:
            black += 1
        else:
            white += 1
    return TwoParamPoly.monomial(black, white)


def oval_forests(t):
    """Loops of ``t`` grouped by the region holding each root.

    Returns ``[(ambient colour, OvalForest)]`` sorted by region anchor.
    Only loops are included; floating disc components interrupt nothing
    here because evaluation happens on tangles without internal discs.
    """
    an = t._analysis
    kids = {}
    roots = {}
    for l, anchor in enumerate(t.loops):
        if anchor[0] == LOOP:
            kids.setdefault(anchor[1], []).append(l)
        else:
            roots.setdefault(an.region_of_anchor(anchor), []).append(l)

    def build(l):
        return OvalNode(tuple(sorted((build(c) for c in kids.get(l, [])), key=repr)))

    out = []
    for region, ls in roots.items():
        anchor = an.region_anchor(region)
        forest = OvalForest(tuple(sorted((build(l) for l in ls), key=repr)), anchor=anchor)
        out.append((anchor, an.colors[region], forest))
    out.sort(key=lambda x: x[0])
    return [(color, forest) for _, color, forest in out]


class PlanarAlgebraTarget:
    """How a planar algebra turns closed-up diagrams into its elements.

    Subclasses supply the input/output spaces; :func:`evaluate` handles the
    planar combinatorics.
    """

    def diagrams(self, x):
        """Iterate ``(diagram, coefficient)`` for an input element."""
        raise NotImplementedError

    def as_tangle(self, diagram, shading):
        raise NotImplementedError

    def collect(self, k, shading, pieces):
        """Build the output element from ``[(outer partner list, coefficient)]``."""
        raise NotImplementedError


class TemperleyLiebTarget(PlanarAlgebraTarget):
    def diagrams(self, x):
        return x.items()

    def arity(self, x):
        return x.n

    def shading(self, x):
        return x.shading

    def as_tangle(self, diagram, shading):
        return diagram.to_tangle(shading)

    def collect(self, k, shading, pieces):
        terms = {}
        for partner, c in pieces:
            d = TLDiagram(k, tuple(partner))
            terms[d] = terms[d] + c if d in terms else c
        return TLElement(k, terms, shading)


TL = TemperleyLiebTarget()


def _close_up(t, k):
    """Outer matching (relative to the base point) and loop factor of a disc-free tangle."""
    base = t.outer.base or 0
    m = 2 * k
    partner = [0] * m
    for (d1, p1), (d2, p2) in t.strands:
        if d1 != OUTER or d2 != OUTER:
            raise EvaluationError("internal disc left after substitution")
        a, b = (p1 - base) % m, (p2 - base) % m
        partner[a], partner[b] = b, a
    factor = TwoParamPoly.one()
    for color, forest in oval_forests(t):
        factor = factor * oval_factor(forest, color)
    return partner, factor


def evaluate(t, inputs, target=TL):
    """``Z(t)(inputs)``; one input per internal disc, in disc order."""
    ensure_valid(t)
    if len(inputs) != len(t.inner):
        raise EvaluationError(f"tangle has {len(t.inner)} internal discs but {len(inputs)} inputs")
    an = t._analysis
    for i, (disc, x) in enumerate(zip(t.inner, inputs)):
        if target.arity(x) != disc.arity:
            raise EvaluationError(f"input {i} has arity {target.arity(x)}, disc {i} has {disc.arity}")
        want = an.corner_color(t.base_corner(i))
        if target.shading(x) != want:
            raise EvaluationError(f"input {i} has shading {target.shading(x)!r}, disc {i} needs {want!r}")
    pieces = []
    expansions = [list(target.diagrams(x)) for x in inputs]
    for combo in itertools.product(*expansions):
        cur = t
        coeff = TwoParamPoly.one()
        for diagram, c in combo:
            try:
                cur = compose(cur, 0, target.as_tangle(diagram, cur._analysis.corner_color(cur.base_corner(0))))
            except TangleError as exc:
                raise EvaluationError(str(exc)) from exc
            coeff = coeff * c
        partner, factor = _close_up(cur, t.outer.arity)
        pieces.append((partner, coeff * factor))
    return target.collect(t.outer.arity, t.shading, pieces)


def staged_evaluate(t, j, s, inputs, target=TL):
    """Evaluate ``t o_j s`` in two stages: ``s`` first, then ``t`` with the result in disc ``j``."""
    ns = len(s.inner)
    s_inputs = inputs[j:j + ns]
    inner = evaluate(s, s_inputs, target)
    t_inputs = list(inputs[:j]) + [inner] + list(inputs[j + ns:])
    return evaluate(t, t_inputs, target)


def check_composition(t, j, s, inputs, target=TL):
    """True iff ``Z(t o_j s)(inputs)`` equals the staged evaluation."""
    direct = evaluate(compose(t, j, s), inputs, target)
    return direct == staged_evaluate(t, j, s, inputs, target)


__all__ = [
    "OvalForest",
    "OvalNode",
    "PlanarAlgebraTarget",
    "TL",
    "TemperleyLiebTarget",
    "check_composition",
    "evaluate",
    "oval_factor",
    "oval_forests",
    "staged_evaluate",
]
