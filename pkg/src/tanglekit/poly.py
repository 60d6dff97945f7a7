"""Sparse polynomials with exact coefficients.

:class:`SparsePoly` stores ``{exponent tuple: coefficient}`` with zero
coefficients dropped.  :class:`TwoParamPoly` is the two-variable integer
specialisation used for loop parameters (``d1``, ``d2``).
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational


class SparsePoly:
    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, terms=None, nvars=2):
        self.nvars = nvars
        clean = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent {exps!r} for {nvars} variables")
            if c:
                clean[exps] = clean.get(exps, 0) + c
                if not clean[exps]:
                    del clean[exps]
        self._terms = clean
        self._hash = None

    @classmethod
    def constant(cls, c, nvars=2):
        return cls({(0,) * nvars: c}, nvars)

    @classmethod
    def variable(cls, i, nvars=2):
        exps = [0] * nvars
        exps[i] = 1
        return cls({tuple(exps): 1}, nvars)

    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self):
        return not self._terms

    def degree(self):
        return max((sum(e) for e in self._terms), default=-1)

    def _coerce(self, other):
        if isinstance(other, SparsePoly):
            if other.nvars != self.nvars:
                raise ValueError("variable count mismatch")
            return other
        if isinstance(other, (int, Fraction)) or isinstance(other, Rational):
            return type(self).constant(other, self.nvars) if type(self) is SparsePoly \
                else type(self)({(0,) * self.nvars: other})
        return NotImplemented

    def _new(self, terms):
        if type(self) is SparsePoly:
            return SparsePoly(terms, self.nvars)
        return type(self)(terms)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return self._new(out)

    __radd__ = __add__

    def __neg__(self):
        return self._new({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return self._new(out)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("non-negative integer powers only")
        result = self._new({(0,) * self.nvars: 1})
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, SparsePoly):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == ({(0,) * self.nvars: other} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    def __call__(self, *point):
        if len(point) != self.nvars:
            raise ValueError("wrong number of arguments")
        total = 0
        for exps, c in self._terms.items():
            term = c
            for x, e in zip(point, exps):
                if e:
                    term = term * x ** e
            total = total + term
        return total

    def __repr__(self):
        return f"{type(self).__name__}({self._terms!r})"


class TwoParamPoly(SparsePoly):
    """Integer polynomial in the loop parameters ``d1`` (black) and ``d2`` (white)."""

    __slots__ = ()

    def __init__(self, terms=None):
        terms = terms or {}
        for c in terms.values():
            if not isinstance(c, int):
                raise TypeError("TwoParamPoly coefficients must be integers")
        super().__init__(terms, 2)

    @classmethod
    def one(cls):
        return cls({(0, 0): 1})

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def monomial(cls, m, n, c=1):
        return cls({(m, n): c})

    def sorted_terms(self):
        """Terms as ``(m, n, c)`` sorted by exponent pair, descending."""
        return [(m, n, c) for (m, n), c in sorted(self._terms.items(), reverse=True)]

    def specialize(self, d1, d2):
        return specialize(self, d1, d2)

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for m, n, c in self.sorted_terms():
            factors = []
            if m:
                factors.append("d1" if m == 1 else f"d1^{m}")
            if n:
                factors.append("d2" if n == 1 else f"d2^{n}")
            mag = abs(c)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(mag)] + factors)
            sign = "-" if c < 0 else "+"
            if not parts:
                parts.append(body if c > 0 else "-" + body)
            else:
                parts.append(f"{sign} {body}")
        return " ".join(parts)


def specialize(p, d1, d2):
    """Evaluate ``p`` exactly at rational ``(d1, d2)``."""
    d1, d2 = Fraction(d1), Fraction(d2)
    total = Fraction(0)
    for (m, n), c in p.items():
        total += c * d1 ** m * d2 ** n
    return total
