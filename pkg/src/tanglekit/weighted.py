"""Weighted planar tangles and their genus-0 enumeration.

Weights sit on strands, boundary segments (the corners of every disc,
one segment for an arity-0 disc) and closed loops.  The total weight of a
tangle coming from a real map is its degree.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import CapacityError, SewingWeightError, ValidationError
from .tangle import (
    BLACK,
    OUTER,
    WHITE,
    Disc,
    Tangle,
    Violation,
    _norm_pair,
    canonical_form,
    compose_detailed,
    ensure_valid,
)
from .tl import tl_basis

MAX_ENUM_DEGREE = 4


def segments(t):
    """All boundary segments of ``t`` as corners, outer disc first."""
    out = []
    for d in t.disc_ids():
        out.extend((d, s) for s in range(t.disc(d).ncorners))
    return out


@dataclass(frozen=True, eq=False)
class WeightedTangle:
    tangle: Tangle
    strand_weights: dict = field(default_factory=dict)
    segment_weights: dict = field(default_factory=dict)
    loop_weights: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "strand_weights",
                           {_norm_pair(*k): v for k, v in self.strand_weights.items()})
        object.__setattr__(self, "segment_weights", dict(self.segment_weights))
        object.__setattr__(self, "loop_weights", tuple(self.loop_weights))
        problems = weight_violations(self)
        if problems:
            raise ValidationError(problems)

    @classmethod
    def zero(cls, t):
        """All strand and segment weights 0, loops weight 1."""
        return cls(t, {s: 0 for s in t.strands}, {c: 0 for c in segments(t)}, (1,) * len(t.loops))

    def key(self):
        t = self.tangle
        return (
            t,
            tuple(self.strand_weights[s] for s in t.strands),
            tuple(self.segment_weights[c] for c in segments(t)),
            self.loop_weights,
        )

    def __eq__(self, other):
        if not isinstance(other, WeightedTangle):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        _, sw, gw, lw = self.key()
        return f"WeightedTangle({self.tangle!r}, strands={sw}, segments={gw}, loops={lw})"


def weight_violations(wt):
    t = wt.tangle
    out = []
    if set(wt.strand_weights) != set(t.strands):
        out.append(Violation("weights", "strand weights do not match the strands"))
    if set(wt.segment_weights) != set(segments(t)):
        out.append(Violation("weights", "segment weights do not match the boundary segments"))
    if len(wt.loop_weights) != len(t.loops):
        out.append(Violation("weights", f"{len(t.loops)} loops but {len(wt.loop_weights)} loop weights"))
    for v in itertools.chain(wt.strand_weights.values(), wt.segment_weights.values()):
        if not isinstance(v, int) or v < 0:
            out.append(Violation("weights", f"weight {v!r} is not a non-negative integer"))
    for v in wt.loop_weights:
        if not isinstance(v, int) or v < 1:
            out.append(Violation("weights", f"loop weight {v!r} must be a positive integer"))
    return out


def total_weight(wt):
    ensure_valid(wt.tangle)
    return sum(wt.strand_weights.values()) + sum(wt.segment_weights.values()) + sum(wt.loop_weights)


def canonicalize_weighted(wt):
    t = wt.tangle
    canon, relab = canonical_form(
        t,
        strand_w=lambda pair: wt.strand_weights[pair],
        seg_w=lambda c: wt.segment_weights[c],
        loop_w=lambda l: wt.loop_weights[l],
    )
    sw = {_norm_pair(relab.point(t, a), relab.point(t, b)): w for (a, b), w in wt.strand_weights.items()}
    gw = {relab.corner(t, c): w for c, w in wt.segment_weights.items()}
    lw = [0] * len(t.loops)
    for l, nl in relab.loop.items():
        lw[nl] = wt.loop_weights[l]
    return WeightedTangle(canon, sw, gw, tuple(lw))


def compose_weighted(t, j, s):
    """Sew ``s`` into internal disc ``j`` of ``t``.

    The segment weights of disc ``j`` must agree with the outer segment
    weights of ``s``.  A strand or loop made of several pieces gets the
    smallest weight among them, since its preimage count is the pointwise
    union of the pieces' counts.
    """
    comp = compose_detailed(t.tangle, j, s.tangle)
    dj = t.tangle.inner[j]
    k = dj.arity
    n2 = 2 * k
    if k == 0:
        glued = [((j, 0), (OUTER, 0))]
    else:
        glued = [((j, c), (OUTER, (c - dj.base + s.tangle.outer.base) % n2)) for c in range(n2)]
    for tc, sc in glued:
        a, b = t.segment_weights[tc], s.segment_weights[sc]
        if a != b:
            raise SewingWeightError(f"segment {tc} has weight {a} but the matching outer segment {sc} has {b}")

    def piece(side, pair):
        return (t if side == "t" else s).strand_weights[pair]

    sw = {pair: min(piece(side, p) for side, p in used) for pair, used in comp.strand_sources.items()}
    lw = []
    for l, src in enumerate(comp.loop_sources):
        if src[0] == "t":
            lw.append(t.loop_weights[src[1]])
        elif src[0] == "s":
            lw.append(s.loop_weights[src[1]])
        else:
            w = min(piece(side, p) for side, p in src[1])
            if w < 1:
                raise SewingWeightError(f"sewn loop {l} would get weight {w}")
            lw.append(w)
    gw = {}
    for (d, c), w in t.segment_weights.items():
        if d != j:
            gw[(comp.t_disc[d], c)] = w
    for (d, c), w in s.segment_weights.items():
        if d != OUTER:
            gw[(comp.s_disc[d], c)] = w
    return WeightedTangle(comp.tangle, sw, gw, tuple(lw))


def euler_count_check(g, d):
    """Number of critical points of a generic degree-``d`` real map of genus ``g``."""
    return 2 * (d + g - 1)


def harnack_disc_count(g):
    """Boundary components of one half of a maximal real curve of genus ``g``."""
    return g + 1


def _loop_shapes(base, nloops):
    """Every way of adding ``nloops`` unweighted loops to ``base``, up to isotopy."""
    from .tangle import canonicalize, regions

    layer = {canonicalize(base)}
    out = [sorted(layer, key=repr)]
    for _ in range(nloops):
        nxt = set()
        for t in layer:
            for r in regions(t):
                nxt.add(canonicalize(Tangle(t.outer, t.inner, t.strands, t.nesting, t.loops + (r.anchor,), t.shading)))
        layer = nxt
        out.append(sorted(layer, key=repr))
    return out


def _compositions(total, nslots, mins):
    """Tuples of length ``nslots`` with entry ``i`` >= ``mins[i]`` summing to ``total``."""
    if nslots == 0:
        if total == 0:
            yield ()
        return
    rest = sum(mins[1:])
    for v in range(mins[0], total - rest + 1):
        for tail in _compositions(total - v, nslots - 1, mins[1:]):
            yield (v,) + tail


def enumerate_genus0(d):
    """Canonical weighted genus-0 tangles of total weight ``d``.

    Outer arity ``k`` runs over ``0..d-1``, every noncrossing matching and
    every loop forest is used, with both base shadings.  The result is
    sorted by canonical key.
    """
    if not isinstance(d, int) or d < 1 or d > MAX_ENUM_DEGREE:
        raise CapacityError(f"enumerate_genus0 supports 1 <= d <= {MAX_ENUM_DEGREE}, got {d!r}")
    seen = {}
    for shading in (WHITE, BLACK):
        for k in range(d):
            for diagram in tl_basis(k):
                base = Tangle(Disc(k, 0 if k else None), (), tuple(((OUTER, a), (OUTER, b)) for a, b in diagram.pairs),
                              (), (), shading)
                for nloops, shapes in enumerate(_loop_shapes(base, d)):
                    for t in shapes:
                        segs = segments(t)
                        mins = [0] * (len(t.strands) + len(segs)) + [1] * nloops
                        for ws in _compositions(d, len(mins), mins):
                            ns = len(t.strands)
                            wt = WeightedTangle(
                                t,
                                dict(zip(t.strands, ws[:ns])),
                                dict(zip(segs, ws[ns:ns + len(segs)])),
                                ws[ns + len(segs):],
                            )
                            c = canonicalize_weighted(wt)
                            seen.setdefault(c.key(), c)
    return [seen[k] for k in sorted(seen, key=repr)]


__all__ = [
    "MAX_ENUM_DEGREE",
    "WeightedTangle",
    "canonicalize_weighted",
    "compose_weighted",
    "enumerate_genus0",
    "euler_count_check",
    "harnack_disc_count",
    "segments",
    "total_weight",
    "weight_violations",
]
