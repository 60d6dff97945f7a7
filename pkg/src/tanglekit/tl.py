"""Temperley-Lieb algebras over ``Z[d1, d2]``.

A diagram on ``n`` strands is a noncrossing perfect matching of ``2n``
points.  Points use the disc labelling of :mod:`tanglekit.tangle`: bottom
positions ``0..n-1`` (left to right) are labels ``0..n-1`` and top position
``i`` is label ``2n-1-i``, so the labels run counterclockwise around the
rectangle and the base point is the bottom-left point.  The region against
the left wall is the base region.  Closed loops are removed with ``d1``
when their inside is black and ``d2`` when it is white.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from . import kernels
from .errors import ArityError, CapacityError, ShadingError
from .poly import TwoParamPoly, specialize
from .tangle import OUTER, WHITE, Disc, Tangle, matching_tangle

MAX_BASIS_N = 12


@dataclass(frozen=True, order=True)
class TLDiagram:
    n: int
    partner: tuple

    def __post_init__(self):
        if len(self.partner) != 2 * self.n:
            raise ValueError("partner list must have 2n entries")

    @classmethod
    def from_pairs(cls, n, pairs):
        partner = [-1] * (2 * n)
        for a, b in pairs:
            partner[a] = b
            partner[b] = a
        if -1 in partner:
            raise ValueError(f"pairs {pairs!r} do not cover all {2 * n} points")
        diagram = cls(n, tuple(partner))
        if not diagram.is_noncrossing():
            raise ValueError(f"matching {pairs!r} has a crossing")
        return diagram

    @property
    def pairs(self):
        return tuple((a, b) for a, b in enumerate(self.partner) if a < b)

    def is_noncrossing(self):
        stack = []
        for p, q in enumerate(self.partner):
            if q > p:
                stack.append(p)
            elif not stack or stack.pop() != q:
                return False
        return True

    def to_tangle(self, shading=WHITE):
        return matching_tangle(self.pairs, self.n, shading)

    def bottom_top(self):
        """Human-readable rectangle form: ``('b', i)`` / ``('t', i)`` pairs, 1-indexed."""
        def lab(p):
            return ("b", p + 1) if p < self.n else ("t", 2 * self.n - p)
        return [(lab(a), lab(b)) for a, b in self.pairs]


def identity_diagram(n):
    return TLDiagram(n, tuple(2 * n - 1 - p for p in range(2 * n)))


def tl_generator(n, i):
    """``e_i``: bottom positions ``i, i+1`` joined, top positions ``i, i+1`` joined (1-indexed)."""
    if not 1 <= i <= n - 1:
        raise IndexError(f"generator index {i} outside 1..{n - 1}")
    partner = list(identity_diagram(n).partner)
    b0, b1 = i - 1, i
    t0, t1 = 2 * n - i, 2 * n - 1 - i
    partner[b0], partner[b1] = b1, b0
    partner[t0], partner[t1] = t1, t0
    return TLDiagram(n, tuple(partner))


@lru_cache(maxsize=None)
def _basis(n):
    if n == 0:
        return (TLDiagram(0, ()),)

    def matchings(lo, hi):
        # noncrossing matchings of the interval [lo, hi)
        if lo == hi:
            yield ()
            return
        for mid in range(lo + 1, hi, 2):
            for inside in matchings(lo + 1, mid):
                for outside in matchings(mid + 1, hi):
                    yield ((lo, mid),) + inside + outside

    out = []
    for pairs in matchings(0, 2 * n):
        partner = [0] * (2 * n)
        for a, b in pairs:
            partner[a], partner[b] = b, a
        out.append(TLDiagram(n, tuple(partner)))
    out.sort()
    return tuple(out)


def tl_basis(n):
    """All Catalan(n) diagrams of TL_n, sorted by partner list."""
    if n < 0 or n > MAX_BASIS_N:
        raise CapacityError(f"tl_basis supports 0 <= n <= {MAX_BASIS_N}, got {n}")
    return list(_basis(n))


def multiply_diagrams(a, b, shading=WHITE):
    """``a * b`` with ``b`` stacked above ``a``; returns ``(diagram, loop factor)``."""
    if a.n != b.n:
        raise ArityError(f"cannot multiply TL_{a.n} by TL_{b.n}")
    partner, black, white = kernels.tl_stack(a.partner, b.partner, a.n, shading == WHITE)
    return TLDiagram(a.n, tuple(partner)), TwoParamPoly.monomial(black, white)


class TLElement:
    """Formal combination of TL_n diagrams with ``TwoParamPoly`` coefficients."""

    __slots__ = ("n", "shading", "_terms")

    def __init__(self, n, terms=None, shading=WHITE):
        self.n = n
        self.shading = shading
        clean = {}
        for d, c in (terms or {}).items():
            if d.n != n:
                raise ArityError(f"diagram on {d.n} strands in a TL_{n} element")
            if not isinstance(c, TwoParamPoly):
                c = TwoParamPoly({(0, 0): c}) if c else TwoParamPoly()
            if not c.is_zero():
                clean[d] = clean[d] + c if d in clean else c
                if clean[d].is_zero():
                    del clean[d]
        self._terms = clean

    @classmethod
    def from_diagram(cls, d, coeff=None, shading=WHITE):
        return cls(d.n, {d: coeff if coeff is not None else TwoParamPoly.one()}, shading)

    @classmethod
    def scalar(cls, p, shading=WHITE):
        return cls(0, {TLDiagram(0, ()): p}, shading)

    @classmethod
    def unit(cls, n, shading=WHITE):
        return cls.from_diagram(identity_diagram(n), shading=shading)

    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items())

    def coefficient(self, d):
        return self._terms.get(d, TwoParamPoly.zero())

    def is_zero(self):
        return not self._terms

    def _check(self, other):
        if not isinstance(other, TLElement):
            return NotImplemented
        if other.n != self.n or other.shading != self.shading:
            raise ArityError(
                f"TL_{self.n}/{self.shading} and TL_{other.n}/{other.shading} are different spaces"
            )
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        terms = dict(self._terms)
        for d, c in other._terms.items():
            terms[d] = terms[d] + c if d in terms else c
        return TLElement(self.n, terms, self.shading)

    def __neg__(self):
        return TLElement(self.n, {d: -c for d, c in self._terms.items()}, self.shading)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, p):
        if not isinstance(p, TwoParamPoly):
            p = TwoParamPoly({(0, 0): p}) if p else TwoParamPoly()
        return TLElement(self.n, {d: c * p for d, c in self._terms.items()}, self.shading)

    def __mul__(self, other):
        if isinstance(other, TLElement):
            return tl_multiply(self, other)
        if isinstance(other, (int, TwoParamPoly)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, TwoParamPoly)):
            return self.scale(other)
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, TLElement):
            return NotImplemented
        return (self.n, self.shading, self._terms) == (other.n, other.shading, other._terms)

    def __hash__(self):
        return hash((self.n, self.shading, frozenset(self._terms.items())))

    def __repr__(self):
        body = " + ".join(f"({c})*{d.pairs}" for d, c in self.items()) or "0"
        return f"TLElement(n={self.n}, {self.shading}: {body})"


def tl_multiply(a, b):
    """Bilinear stacking product ``a * b`` (``b`` above ``a``)."""
    if a.n != b.n:
        raise ArityError(f"cannot multiply TL_{a.n} by TL_{b.n}")
    if a.shading != b.shading:
        raise ArityError("shading mismatch between factors")
    terms = {}
    for da, ca in a._terms.items():
        for db, cb in b._terms.items():
            d, factor = multiply_diagrams(da, db, a.shading)
            c = ca * cb * factor
            terms[d] = terms[d] + c if d in terms else c
    return TLElement(a.n, terms, a.shading)


def stacking_tangle(n, shading=WHITE):
    """Two-disc tangle whose partition function is the TL_n product.

    Disc 0 receives the lower factor and disc 1 the upper one.  Only white
    for ``n > 0``, since the internal base regions must be white.
    """
    if n > 0 and shading != WHITE:
        raise ShadingError("a stacking tangle with n > 0 needs a white base region")
    m = 2 * n
    strands = [((OUTER, p), (0, p)) for p in range(n)]
    strands += [((0, m - 1 - i), (1, i)) for i in range(n)]
    strands += [((1, m - 1 - i), (OUTER, m - 1 - i)) for i in range(n)]
    base = 0 if n else None
    inner = (Disc(n, base), Disc(n, base))
    if n == 0:
        nesting = (((0, 0), (OUTER, 0)), ((1, 0), (OUTER, 0)))
        return Tangle(Disc(0), inner, (), nesting, (), shading)
    return Tangle(Disc(n, 0), inner, tuple(strands), (), (), shading)


def trace_tangle(n, shading=WHITE):
    """Closure tangle: top position ``i`` joined to bottom position ``i`` around the right."""
    if n == 0:
        return Tangle(Disc(0), (Disc(0),), (), (((0, 0), (OUTER, 0)),), (), shading)
    m = 2 * n
    strands = [((0, p), (0, m - 1 - p)) for p in range(n)]
    # the base region of the inner disc (against the left wall) faces outward
    nesting = (((0, m - 1), (OUTER, 0)),)
    return Tangle(Disc(0), (Disc(n, 0),), tuple(strands), nesting, (), shading)


def tl_trace(a):
    """Unnormalised closure trace, a polynomial in ``d1, d2``."""
    from .partition import evaluate

    if a.shading == WHITE:
        result = evaluate(trace_tangle(a.n), [a])
        return result.coefficient(TLDiagram(0, ()))
    # every colour is reversed, so closed loops trade d1 for d2; the
    # coefficients themselves are left alone
    total = TwoParamPoly()
    for d, c in a.items():
        white = tl_trace(TLElement.from_diagram(d))
        total = total + c * TwoParamPoly({(n, m): k for (m, n), k in white.items()})
    return total


__all__ = [
    "TLDiagram",
    "TLElement",
    "identity_diagram",
    "multiply_diagrams",
    "specialize",
    "stacking_tangle",
    "tl_basis",
    "tl_generator",
    "tl_multiply",
    "tl_trace",
    "trace_tangle",
]
