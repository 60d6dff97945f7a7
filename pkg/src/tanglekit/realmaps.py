"""Real rational maps of the Riemann sphere and their weighted tangles.

For a real rational function ``f = p/q`` of degree ``d`` the closed upper
half-plane plays the role of one half of the real curve.  The preimage of
the real projective line inside it is a union of arcs joining real critical
points and closed ovals; together with the boundary this is a planar
tangle with no internal discs.

Geometry is done in the Cayley coordinate ``zeta = (z - i)/(z + i)``, which
sends the upper half-plane to the unit disc and ``oo`` to ``1``, so the
point at infinity needs no special chart.  Every point of the locus solves
``cos(a) p(z) - sin(a) q(z) = 0`` for the real value ``tan(a)``, and ``f``
is monotone along each arc, so arcs are traced by continuing one root of
that polynomial in ``a``.  The continuation parameter doubles as the lift
of ``f`` to the universal cover of the real line, which is what the
preimage-count weights need.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import kernels
from .errors import (
    AmbiguityError,
    ConsistencyError,
    GenericityError,
    MapError,
    NumericalError,
)
from .poly import SparsePoly
from .tangle import BLACK, LOOP, OUTER, WHITE, Disc, Tangle, equals
from .weighted import WeightedTangle, canonicalize_weighted, total_weight

TOL_RESIDUAL = 1e-10
TOL_REAL = 1e-8
TOL_TRACE = 1e-8
TOL_SEPARATION = 1e-7
DEFAULT_SAMPLES = 1024
DEFAULT_RESOLUTION = 0.02
# values are ordered around the real projective line starting just above -1
MARK_CUT = -1.0

TWO_PI = 2 * math.pi


def _frac(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, str):
        return Fraction(c.strip())
    if isinstance(c, (int, float)):
        if isinstance(c, float) and not math.isfinite(c):
            raise MapError(f"non-finite coefficient {c!r}")
        return Fraction(c)
    raise MapError(f"coefficient {c!r} is not a real number")


def _trim(cs):
    cs = list(cs)
    while cs and cs[-1] == 0:
        cs.pop()
    return tuple(cs)


def _pmul(a, b):
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def _psub(a, b):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _trim(x - y for x, y in zip(a, b))


def _pderiv(a):
    return _trim(k * c for k, c in enumerate(a) if k)


def _pmod(a, b):
    a = list(a)
    while len(a) >= len(b) and a:
        f = a[-1] / b[-1]
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[shift + i] -= f * c
        a = list(_trim(a[:-1]))
    return _trim(a)


def _gcd_degree(a, b):
    while b:
        a, b = b, _pmod(a, b)
    return len(a) - 1


class RealRationalMap:
    """``f = p/q`` with real coefficients listed in ascending powers.

    Coefficients are stored exactly as fractions; floats convert without
    rounding and decimal strings are parsed exactly.
    """

    __slots__ = ("p", "q", "degree", "_pf", "_qf")

    def __init__(self, p, q=(1,)):
        self.p = _trim(_frac(c) for c in p)
        self.q = _trim(_frac(c) for c in q)
        if not self.q:
            raise MapError("denominator is the zero polynomial")
        if not self.p:
            raise MapError("numerator is the zero polynomial")
        self.degree = max(len(self.p), len(self.q)) - 1
        if self.degree < 1:
            raise MapError("a constant map has no tangle")
        if _gcd_degree(self.p, self.q) > 0:
            raise MapError("numerator and denominator have a common root")
        self._pf = np.array([float(c) for c in self.padded(self.p)])
        self._qf = np.array([float(c) for c in self.padded(self.q)])

    def padded(self, cs):
        return tuple(cs) + (Fraction(0),) * (self.degree + 1 - len(cs))

    @property
    def p_float(self):
        return self._pf

    @property
    def q_float(self):
        return self._qf

    def __call__(self, z):
        pv = npoly.polyval(z, self._pf)
        qv = npoly.polyval(z, self._qf)
        return pv / qv

    def __eq__(self, other):
        if not isinstance(other, RealRationalMap):
            return NotImplemented
        return self.p == other.p and self.q == other.q

    def __hash__(self):
        return hash((self.p, self.q))

    def __repr__(self):
        return f"RealRationalMap(p={[str(c) for c in self.p]}, q={[str(c) for c in self.q]})"

    def wronskian(self):
        """Exact ``p'q - pq'``; its roots are the finite critical points."""
        return _psub(_pmul(_pderiv(self.p), self.q), _pmul(self.p, _pderiv(self.q)))

    def value_angle(self, z):
        """``a`` in ``[0, pi)`` with ``f(z) = tan(a)``, for real ``z`` or ``None`` (infinity)."""
        if z is None:
            pv, qv = self._pf[-1], self._qf[-1]
        else:
            pv, qv = npoly.polyval(z, self._pf), npoly.polyval(z, self._qf)
        return math.atan2(float(np.real(pv)), float(np.real(qv))) % math.pi

    def perturbed(self, rng, eps):
        """All ``2(d+1)`` coefficients moved by independent uniform draws in ``[-eps, eps]``."""
        d = self.degree
        p = [float(c) + eps * rng.uniform(-1, 1) for c in self.padded(self.p)]
        q = [float(c) + eps * rng.uniform(-1, 1) for c in self.padded(self.q)]
        return RealRationalMap(p[: d + 1], q[: d + 1])

    def precompose(self, a, b, c, dd):
        """``f((a z + b)/(c z + dd))`` for a real Mobius map."""
        num = (_frac(b), _frac(a))
        den = (_frac(dd), _frac(c))

        def hom(cs):
            total = ()
            for k, ck in enumerate(self.padded(cs)):
                if not ck:
                    continue
                term = (ck,)
                for _ in range(k):
                    term = _pmul(term, num)
                for _ in range(self.degree - k):
                    term = _pmul(term, den)
                n = max(len(total), len(term))
                total = _trim(
                    (total[i] if i < len(total) else 0) + (term[i] if i < len(term) else 0) for i in range(n)
                )
            return total

        return RealRationalMap(hom(self.p), hom(self.q))


# ---------------------------------------------------------------------------
# critical points


@dataclass(frozen=True)
class CriticalPoint:
    point: complex | None  # None is the point at infinity
    multiplicity: int
    value: complex  # complex('inf') for a pole
    is_real: bool
    residual: float = 0.0

    @property
    def at_infinity(self):
        return self.point is None


@dataclass
class CriticalData:
    degree: int
    points: list
    generic: bool
    reasons: list = field(default_factory=list)
    max_residual: float = 0.0

    @property
    def count(self):
        return sum(c.multiplicity for c in self.points)

    @property
    def infinity_multiplicity(self):
        return sum(c.multiplicity for c in self.points if c.at_infinity)

    @property
    def real_points(self):
        return [c for c in self.points if c.is_real]

    @property
    def values(self):
        return [c.value for c in self.points]


def _chordal(a, b):
    if math.isinf(abs(a)) and math.isinf(abs(b)):
        return 0.0
    if math.isinf(abs(a)):
        return 1 / math.sqrt(1 + abs(b) ** 2)
    if math.isinf(abs(b)):
        return 1 / math.sqrt(1 + abs(a) ** 2)
    return abs(a - b) / math.sqrt((1 + abs(a) ** 2) * (1 + abs(b) ** 2))


def _scaled_residual(coeffs, z):
    num = abs(npoly.polyval(z, coeffs))
    den = float(np.sum(np.abs(coeffs) * np.abs(z) ** np.arange(len(coeffs))))
    return num / den if den else num


def _polish(coeffs, z, real):
    dc = npoly.polyder(coeffs)
    best, best_r = z, _scaled_residual(coeffs, z)
    for _ in range(8):
        dv = npoly.polyval(z, dc)
        if dv == 0:
            break
        z = z - npoly.polyval(z, coeffs) / dv
        if real:
            z = complex(z.real, 0.0)
        r = _scaled_residual(coeffs, z)
        if r < best_r:
            best, best_r = z, r
        if r == 0:
            break
    return best, best_r


def _map_value(f, z):
    pv = npoly.polyval(z, f.p_float)
    qv = npoly.polyval(z, f.q_float)
    scale = max(abs(pv), 1.0) * 1e-13
    if abs(qv) <= scale * 1e-3:
        return complex("inf")
    return complex(pv / qv)


def critical_points(f, tol=TOL_RESIDUAL, real_tol=TOL_REAL, sep_tol=TOL_SEPARATION):
    """Critical points of ``f`` with multiplicity, including the point at infinity.

    Finite critical points are the roots of the exact Wronskian; the order
    at infinity is the drop of its degree below ``2d - 2``.  Residuals are
    relative (backward) errors ``|W(z)| / sum |w_k| |z|^k``.
    """
    d = f.degree
    w = f.wronskian()
    deg_w = len(w) - 1
    inf_mult = 2 * d - 2 - deg_w
    coeffs = np.array([float(c) for c in w])
    roots = npoly.polyroots(coeffs) if deg_w >= 1 else np.array([], dtype=complex)
    polished = []
    for z in roots:
        z = complex(z)
        real = abs(z.imag) <= real_tol * max(1.0, abs(z))
        if real:
            z = complex(z.real, 0.0)
        z, r = _polish(coeffs, z, real)
        polished.append((z, real, r))
    max_res = max((r for _, _, r in polished), default=0.0)
    if max_res > tol:
        raise NumericalError("critical point polishing did not converge", max_res)

    reasons = []
    # complex points come in conjugate pairs; symmetrise them
    cplx = [z for z, real, _ in polished if not real]
    unmatched = list(cplx)
    paired = []
    while unmatched:
        z = unmatched.pop(0)
        j = min(range(len(unmatched)), key=lambda i: abs(unmatched[i] - z.conjugate()), default=None)
        if j is None or abs(unmatched[j] - z.conjugate()) > real_tol * max(1.0, abs(z)) * 10:
            raise NumericalError("complex critical points do not pair under conjugation")
        unmatched.pop(j)
        up = complex(z.real, abs(z.imag))
        paired.extend([up, up.conjugate()])

    points = []
    res = {z: r for z, _, r in polished}
    for z, real, r in polished:
        if real:
            points.append(CriticalPoint(z, 1, _map_value(f, z), True, r))
    for z in paired:
        points.append(CriticalPoint(z, 1, _map_value(f, z), False, res.get(z, 0.0)))
    if inf_mult:
        pd, qd = f.p_float[-1], f.q_float[-1]
        value = complex("inf") if qd == 0 else complex(pd / qd)
        points.append(CriticalPoint(None, inf_mult, value, True, 0.0))

    if inf_mult > 1:
        reasons.append(f"infinity is a critical point of order {inf_mult}")
    finite = [c.point for c in points if not c.at_infinity]
    for i in range(len(finite)):
        for j in range(i + 1, len(finite)):
            if abs(finite[i] - finite[j]) <= sep_tol * max(1.0, abs(finite[i])):
                reasons.append(f"critical points {finite[i]:.6g} and {finite[j]:.6g} coincide within tolerance")
    vals = [c.value for c in points]
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            if _chordal(vals[i], vals[j]) <= sep_tol:
                reasons.append(f"critical values {vals[i]:.6g} and {vals[j]:.6g} coincide within tolerance")
    points.sort(key=_point_key)
    return CriticalData(d, points, not reasons, reasons, max_res)


def _point_key(c):
    if c.is_real:
        return (0, _beta(c.point), 0.0)
    return (1, c.point.real, c.point.imag)


def _beta(x):
    """Position on the real projective line in ``[0, pi)``; increasing = counterclockwise."""
    if x is None:
        return 0.0
    return math.pi / 2 + math.atan(float(np.real(x)))


def cayley(z):
    if z is None:
        return 1 + 0j
    return (z - 1j) / (z + 1j)


def inverse_cayley(zeta):
    zeta = np.asarray(zeta, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        return 1j * (1 + zeta) / (1 - zeta)


# ---------------------------------------------------------------------------
# tracing


@dataclass
class Arc:
    kind: str  # "strand" or "loop"
    zeta: np.ndarray
    alphas: np.ndarray
    start: int | None = None  # index into TracedLocus.real_points
    end: int | None = None

    @property
    def closed(self):
        return self.kind == "loop"

    @property
    def lift(self):
        """Interval swept by the lifted value ``2a``."""
        a0, a1 = 2 * self.alphas[0], 2 * self.alphas[-1]
        return (min(a0, a1), max(a0, a1))

    @property
    def covering_degree(self):
        lo, hi = self.lift
        return int(round((hi - lo) / TWO_PI)) if self.closed else None

    @property
    def z(self):
        return inverse_cayley(self.zeta)


@dataclass
class TracedLocus:
    map: RealRationalMap
    critical: CriticalData
    real_points: list  # CriticalPoint, counterclockwise from infinity
    arcs: list
    alpha_star: float
    resolution: float

    @property
    def strands(self):
        return [a for a in self.arcs if a.kind == "strand"]

    @property
    def loops(self):
        return [a for a in self.arcs if a.kind == "loop"]


def _cayley_coeffs(cs, d):
    out = np.zeros(d + 1, dtype=complex)
    for k, c in enumerate(cs):
        if c:
            term = npoly.polymul(npoly.polypow([1, 1], k), npoly.polypow([1, -1], d - k))
            out[: len(term)] += c * (1j) ** k * term
    return out


class _Tracer:
    h_max = 0.05
    h_min = 1e-13

    def __init__(self, f, resolution, tol):
        self.f = f
        self.d = f.degree
        self.P = _cayley_coeffs(f.p_float, self.d)
        self.Q = _cayley_coeffs(f.q_float, self.d)
        self.resolution = resolution
        self.tol = tol
        self.steps = 0

    def roots(self, alpha):
        c = math.cos(alpha) * self.P - math.sin(alpha) * self.Q
        scale = np.max(np.abs(c))
        n = len(c)
        while n > 1 and abs(c[n - 1]) <= 1e-14 * scale:
            n -= 1
        if n <= 1:
            return np.array([], dtype=complex)
        return npoly.polyroots(c[:n])

    def inside(self, alpha):
        r = self.roots(alpha)
        return r[np.abs(r) < 1 - 1e-9]

    def start_direction(self, zeta_c, alpha_c):
        found = []
        for delta in (1e-7, 1e-5):
            for s in (1, -1):
                r = self.roots(alpha_c + s * delta)
                near = r[(np.abs(r - zeta_c) < 1e-1) & (1 - np.abs(r) > 1e-7)]
                if len(near):
                    found.append((s, delta, near[np.argmin(np.abs(near - zeta_c))]))
            if found:
                break
        dirs = {s for s, _, _ in found}
        if len(dirs) != 1:
            raise NumericalError(f"cannot tell which way the arc at {zeta_c:.6g} leaves the boundary")
        return found[0]

    def follow(self, alpha, zeta, direction, alpha_star, first_step=None, closed_target=None,
               boundary_zetas=None, max_travel=None):
        """Continue a root of ``h_a`` in ``a``; returns ``(path, alphas, hits, how)``.

        ``hits`` lists ``(alpha, zeta)`` at every ``alpha_star + m pi``.
        """
        path = [zeta]
        alphas = [alpha]
        hits = []
        start_alpha = alpha
        prev = None
        last = None
        h = first_step or 1e-4
        max_travel = max_travel or math.pi * (self.d + 1)
        while True:
            self.steps += 1
            if abs(alpha - start_alpha) > max_travel or self.steps > 2_000_000:
                raise NumericalError("arc continuation ran away")
            if direction > 0:
                nb = alpha_star + math.pi * (math.floor((alpha - alpha_star) / math.pi + 1e-12) + 1)
            else:
                nb = alpha_star + math.pi * (math.ceil((alpha - alpha_star) / math.pi - 1e-12) - 1)
            gap = abs(nb - alpha)
            step = min(h, gap)
            at_break = step == gap
            a_new = alpha + direction * step
            rts = self.roots(a_new)
            pred = zeta if prev is None else zeta + (zeta - prev) * (step / last)
            dist = np.abs(rts - pred)
            order = np.argsort(dist)
            i = order[0]
            d1 = dist[i]
            d2 = dist[order[1]] if len(order) > 1 else math.inf
            z_new = complex(rts[i])
            ok = abs(z_new - zeta) <= self.resolution and d1 <= 0.25 * d2
            edge = 1 - abs(zeta)
            if not ok:
                h = step / 2
                if h < self.h_min:
                    if boundary_zetas is not None and edge < 1e-3:
                        return path, alphas, hits, "boundary"
                    raise AmbiguityError(
                        f"two arcs pass within {self.resolution} near zeta={zeta:.6g}; use a finer resolution"
                    )
                continue
            prev, zeta, alpha, last = zeta, z_new, a_new, step
            path.append(zeta)
            alphas.append(alpha)
            if 1 - abs(zeta) < 1e-9:
                if boundary_zetas is None:
                    raise ConsistencyError("a closed oval reached the real line")
                return path, alphas, hits, "boundary"
            if at_break:
                hits.append((alpha, zeta))
                if closed_target is not None and abs(zeta - closed_target) < 1e-6:
                    return path, alphas, hits, "closed"
            h = min(2 * step, self.h_max)


def _value_angle(c, f):
    if c.at_infinity:
        return f.value_angle(None)
    return f.value_angle(c.point.real)


def _choose_alpha_star(angles):
    best, best_gap = 0.0, -1.0
    for j in range(64):
        a = (0.37 + j * math.pi / 64) % math.pi
        gap = min((min(abs(a - b) % math.pi, math.pi - abs(a - b) % math.pi) for b in angles), default=math.pi)
        if gap > best_gap + 1e-12:
            best, best_gap = a, gap
    return best


def trace_locus(f, resolution=DEFAULT_RESOLUTION, tol=TOL_TRACE):
    """Arcs of ``f^-1(RP^1)`` in the closed upper half-plane.

    Raises :class:`GenericityError` for non-generic maps and
    :class:`AmbiguityError` when two arcs cannot be separated at the given
    resolution (a maximal step in the Cayley disc).
    """
    crit = critical_points(f)
    if not crit.generic:
        raise GenericityError("; ".join(crit.reasons))
    tracer = _Tracer(f, resolution, tol)
    real = crit.real_points  # already counterclockwise from infinity
    zetas = [cayley(c.point) for c in real]
    angles = [_value_angle(c, f) for c in real]
    alpha_star = _choose_alpha_star(angles)
    arcs = []
    done = set()
    hit_sets = []
    for i, c in enumerate(real):
        if i in done:
            continue
        s, delta, z1 = tracer.start_direction(zetas[i], angles[i])
        path, alphas, hits, how = tracer.follow(
            angles[i] + s * delta, z1, s, alpha_star, first_step=delta, boundary_zetas=zetas
        )
        last = path[-1]
        j = min(range(len(real)), key=lambda k: abs(zetas[k] - last))
        if j == i or abs(zetas[j] - last) > 5e-2:
            raise NumericalError(f"arc from critical point {i} ended away from any critical point",
                                 abs(zetas[j] - last))
        # put the end on the branch of the lift it was approached from
        aj = angles[j] + math.pi * round((alphas[-1] - angles[j]) / math.pi)
        if abs(aj - alphas[-1]) > 1e-3:
            raise NumericalError("arc end value does not match the critical value", abs(aj - alphas[-1]))
        zeta_path = np.array([zetas[i]] + path + [zetas[j]])
        alpha_path = np.array([angles[i]] + alphas + [aj])
        done.update((i, j))
        arcs.append(Arc("strand", zeta_path, alpha_path, i, j))
        hit_sets.append([z for _, z in hits])

    targets = tracer.inside(alpha_star)
    claimed = np.zeros(len(targets), dtype=bool)

    def claim(points):
        for z in points:
            k = int(np.argmin(np.abs(targets - z)))
            if abs(targets[k] - z) > 1e-6 or claimed[k]:
                raise ConsistencyError("traced arcs do not account for the preimages of a regular value")
            claimed[k] = True

    for hs in hit_sets:
        claim(hs)
    while not claimed.all():
        k = int(np.flatnonzero(~claimed)[0])
        start = complex(targets[k])
        path, alphas, hits, how = tracer.follow(alpha_star, start, 1, alpha_star, closed_target=start)
        claim([z for _, z in hits])
        arcs.append(Arc("loop", np.array([start] + path), np.array([alpha_star] + alphas)))
    return TracedLocus(f, crit, real, arcs, alpha_star, resolution)


# ---------------------------------------------------------------------------
# extraction


def _in_polygon(points, poly):
    """Even-odd rule, vectorised over ``points`` (complex arrays)."""
    px, py = np.real(points)[:, None], np.imag(points)[:, None]
    x1, y1 = np.real(poly), np.imag(poly)
    x2, y2 = np.roll(x1, -1), np.roll(y1, -1)
    cond = (y1 > py) != (y2 > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
    return (np.sum(cond & (px < xint), axis=1) % 2) == 1


def _strand_polygon(arc):
    """The arc closed up by the boundary circle from its end counterclockwise to its start."""
    za, zb = arc.zeta[0], arc.zeta[-1]
    ta, tb = np.angle(za), np.angle(zb)
    if ta <= tb:
        ta += TWO_PI
    ts = np.linspace(tb, ta, 256)[1:-1]
    return np.concatenate([arc.zeta, np.exp(1j * ts)])


def _vote(points, poly):
    inside = _in_polygon(points, poly)
    if inside.all():
        return True
    if not inside.any():
        return False
    raise AmbiguityError("an oval is not cleanly separated from another arc; use a finer resolution")


def _lift_segment(f, b0, b1, n=2048):
    """Lifted value ``2 atan f`` along the boundary from ``beta = b0`` to ``b1``."""
    d = f.degree
    k = np.arange(d + 1)
    while True:
        beta = np.linspace(b0, b1, n)
        X, Y = -np.cos(beta), np.sin(beta)
        mon = X[:, None] ** k * Y[:, None] ** (d - k)
        ph, qh = mon @ f.p_float, mon @ f.q_float
        u = (qh + 1j * ph) / (qh - 1j * ph)
        psi = np.unwrap(np.angle(u))
        if np.max(np.abs(np.diff(psi))) < 0.25 or n > 2 ** 22:
            return psi
        n *= 4


def boundary_evaluation(f):
    """Topological degree of ``f`` on the real projective line."""
    psi = _lift_segment(f, 0.0, math.pi)
    return int(round((psi[-1] - psi[0]) / TWO_PI))


def _sample_angles(n, avoid, tol):
    theta = -math.pi + TWO_PI * (np.arange(n) + 0.5) / n
    keep = np.ones(n, dtype=bool)
    for a in avoid:
        diff = np.abs((theta - a + math.pi) % TWO_PI - math.pi)
        keep &= diff > tol
    return theta[keep]


def _counts(lo, hi, theta):
    m_max = np.ceil((hi - theta) / TWO_PI) - 1
    m_min = np.floor((lo - theta) / TWO_PI) + 1
    return np.maximum(0, m_max - m_min + 1).astype(int)


def _min_readings(lo, hi, theta):
    c = _counts(lo, hi, theta)
    pos = c[c > 0]
    return int(c.min()) if len(c) else 0, int(pos.min()) if len(pos) else 0


class ExtractedTangle(WeightedTangle):
    """A weighted tangle read off a real map, with numerical diagnostics attached."""

    def __init__(self, wt, diagnostics):
        super().__init__(wt.tangle, wt.strand_weights, wt.segment_weights, wt.loop_weights)
        object.__setattr__(self, "diagnostics", diagnostics)

    @property
    def weighted(self):
        return WeightedTangle(self.tangle, self.strand_weights, self.segment_weights, self.loop_weights)


def _mark_key(c, f):
    # value position around RP^1 starting just above MARK_CUT; ties by position
    cut = 2 * math.atan(MARK_CUT)
    psi = 2 * _value_angle(c, f)
    return ((psi - cut) % TWO_PI, _beta(c.point))


def extract_tangle(f, resolution=DEFAULT_RESOLUTION, tol=TOL_TRACE, samples=DEFAULT_SAMPLES):
    locus = trace_locus(f, resolution, tol)
    real = locus.real_points
    n = len(real)
    if n % 2:
        raise ConsistencyError(f"{n} real critical points; the count must be even")
    k = n // 2
    mark = min(range(n), key=lambda i: _mark_key(real[i], f)) if n else None
    label = {i: (i - mark) % n for i in range(n)} if n else {}
    order = sorted(range(n), key=lambda i: label[i])
    betas = [_beta(real[i].point) for i in order]

    crit_angles = [2 * _value_angle(c, f) for c in real]
    theta = _sample_angles(samples, crit_angles, max(tol, 1e-9))

    # boundary segments, corner c runs from label c to label c + 1
    seg_lifts = []
    if n == 0:
        psi = _lift_segment(f, 0.0, math.pi)
        seg_lifts.append((psi[0], psi[-1]))
    else:
        for c in range(n):
            b0, b1 = betas[c], betas[(c + 1) % n]
            if b1 <= b0:
                b1 += math.pi
            psi = _lift_segment(f, b0, b1)
            seg_lifts.append((psi[0], psi[-1]))
    rising = [b > a for a, b in seg_lifts]
    if n and any(rising[c] == rising[(c + 1) % n] for c in range(n)):
        raise ConsistencyError("boundary monotonicity does not alternate at the real critical points")
    # white regions map to the upper half-plane, i.e. f increases along their boundary
    shading = WHITE if rising[-1] else BLACK

    strands = []
    strand_w = {}
    readings = {"strands": [], "segments": [], "loops": []}
    lifts = {"strands": [], "segments": [], "loops": []}
    for arc in locus.strands:
        a, b = label[arc.start], label[arc.end]
        pair = tuple(sorted(((OUTER, a), (OUTER, b))))
        strands.append(pair)
        r = _min_readings(*arc.lift, theta)
        strand_w[pair] = r[0]
        lifts["strands"].append([float(x) for x in arc.lift])
        readings["strands"].append([list(x) for x in pair] + list(r))
    seg_w = {}
    for c, (a, b) in enumerate(seg_lifts):
        r = _min_readings(min(a, b), max(a, b), theta)
        seg_w[(OUTER, c)] = r[0]
        lifts["segments"].append([float(min(a, b)), float(max(a, b))])
        readings["segments"].append([c] + list(r))

    # place ovals: side of every strand, then nesting among ovals
    loops = locus.loops
    probes = [arc.zeta[np.linspace(0, len(arc.zeta) - 2, 7).astype(int)] for arc in loops]
    polys = [_strand_polygon(arc) for arc in locus.strands]
    strand_labels = [(label[arc.start], label[arc.end]) for arc in locus.strands]
    ncorners = max(1, n)

    def corner_sides(c):
        return tuple((c - b) % n < (a - b) % n for a, b in strand_labels)

    corner_by_sides = {}
    for c in range(ncorners):
        corner_by_sides.setdefault(corner_sides(c) if n else (), c)
    inside_of = {}
    for i, pts in enumerate(probes):
        inside_of[i] = [j for j, arc in enumerate(loops) if j != i and _vote(pts, arc.zeta)]
    anchors = []
    for i, pts in enumerate(probes):
        if inside_of[i]:
            parent = max(inside_of[i], key=lambda j: len(inside_of[j]))
            anchors.append((LOOP, parent))
        else:
            sides = tuple(_vote(pts, poly) for poly in polys)
            if sides not in corner_by_sides:
                raise ConsistencyError("an oval lies in no region of the strand diagram")
            anchors.append((OUTER, corner_by_sides[sides]))
    loop_w = []
    for arc in loops:
        r = _min_readings(*arc.lift, theta)
        loop_w.append(r[0])
        lifts["loops"].append([float(x) for x in arc.lift])
        readings["loops"].append(list(r) + [arc.covering_degree])

    t = Tangle(Disc(k, 0 if k else None), (), tuple(strands), (), tuple(anchors), shading)
    wt = canonicalize_weighted(WeightedTangle(t, strand_w, seg_w, tuple(loop_w)))
    image_total = sum(x[-1] for x in readings["strands"]) + sum(x[-1] for x in readings["segments"]) \
        + sum(x[1] for x in readings["loops"])
    diagnostics = {
        "critical_points": [_fmt_point(c.point) for c in locus.critical.points],
        "critical_values": [_fmt_value(c.value) for c in locus.critical.points],
        "multiplicities": [c.multiplicity for c in locus.critical.points],
        "genericity": locus.critical.generic,
        "marked_point": _fmt_point(real[mark].point) if n else None,
        "total_weight": total_weight(wt),
        "total_weight_image": image_total,
        "weight_sum_mismatch": total_weight(wt) != f.degree,
        "readings": readings,
        # intervals of the lifted value 2 atan(f); w(x) counts lifts of x inside
        "lifts": lifts,
    }
    return ExtractedTangle(wt, diagnostics)


def _fmt_point(z):
    if z is None:
        return "inf"
    z = complex(z)
    if z.imag == 0:
        return repr(float(z.real) + 0.0)
    return [float(z.real) + 0.0, float(z.imag) + 0.0]


def _fmt_value(v):
    v = complex(v)
    if math.isinf(abs(v)):
        return "inf"
    if abs(v.imag) <= 1e-12 * max(1.0, abs(v)):
        return repr(float(v.real) + 0.0)
    return [float(v.real) + 0.0, float(v.imag) + 0.0]


# ---------------------------------------------------------------------------
# stability and the grid cross-check


@dataclass
class StabilityReport:
    stable: bool
    trials: int
    resampled: int
    failures: int
    inconclusive: bool = False


def stability_report(f, eps, trials=20, seed=0, resolution=DEFAULT_RESOLUTION):
    if eps == 0 or trials <= 0:
        return StabilityReport(True, 0, 0, 0)
    base = extract_tangle(f, resolution).tangle
    rng = np.random.default_rng(seed)
    done = resampled = failures = 0
    budget = 10 * trials
    while done < trials:
        if resampled > budget:
            return StabilityReport(failures == 0, done, resampled, failures, inconclusive=True)
        g = f.perturbed(rng, eps)
        try:
            if not critical_points(g).generic:
                resampled += 1
                continue
        except (MapError, NumericalError):
            resampled += 1
            continue
        done += 1
        if not equals(extract_tangle(g, resolution).tangle, base):
            failures += 1
    return StabilityReport(failures == 0, done, resampled, failures)


def chamber_stability(f, eps, trials=20, seed=0, resolution=DEFAULT_RESOLUTION):
    """True iff every generic perturbation of size ``eps`` extracts the same tangle."""
    r = stability_report(f, eps, trials, seed, resolution)
    return r.stable and not r.inconclusive


def _complex_parts(cs):
    """``(Re, Im)`` of ``sum c_k (x + i y)^k`` as exact bivariate polynomials."""
    re, im = {}, {}
    for k, c in enumerate(cs):
        if not c:
            continue
        for j in range(k + 1):
            coeff = c * math.comb(k, j)
            # i^j cycles 1, i, -1, -i
            target, sign = [(re, 1), (im, 1), (re, -1), (im, -1)][j % 4]
            key = (k - j, j)
            target[key] = target.get(key, 0) + sign * coeff
    return SparsePoly(re, 2), SparsePoly(im, 2)


def locus_polynomial(f):
    """``G(x, y) = Im(p(z) conj(q(z)))``; its zero set off the real axis is the locus."""
    pr, pi_ = _complex_parts(f.p)
    qr, qi = _complex_parts(f.q)
    return pi_ * qr - pr * qi


def scan_locus(f, xs, ys):
    """Sign changes of ``G`` along the horizontal grid edges, as ``(x, y)`` crossings."""
    g = locus_polynomial(f)
    terms = [(i, j, float(c)) for (i, j), c in g.items()]
    grid = np.array(kernels.eval_grid(terms, [float(x) for x in xs], [float(y) for y in ys]))
    xs = np.asarray(xs, dtype=float)
    out = []
    for r, y in enumerate(ys):
        row = grid[r]
        s = np.sign(row)
        idx = np.flatnonzero(s[:-1] * s[1:] < 0)
        for i in idx:
            t = row[i] / (row[i] - row[i + 1])
            out.append((xs[i] + t * (xs[i + 1] - xs[i]), float(y)))
    return out


__all__ = [
    "Arc",
    "CriticalData",
    "CriticalPoint",
    "ExtractedTangle",
    "RealRationalMap",
    "StabilityReport",
    "TracedLocus",
    "boundary_evaluation",
    "cayley",
    "chamber_stability",
    "critical_points",
    "extract_tangle",
    "inverse_cayley",
    "locus_polynomial",
    "scan_locus",
    "stability_report",
    "trace_locus",
]
