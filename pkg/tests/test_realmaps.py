import math
import random
from fractions import Fraction

import numpy as np
import pytest

from support import random_map
from tanglekit import (
    BLACK,
    WHITE,
    Disc,
    MapError,
    RealRationalMap,
    Tangle,
    canonicalize,
    chamber_stability,
    critical_points,
    extract_tangle,
    stability_report,
    trace_locus,
    validate,
)
from tanglekit.realmaps import boundary_evaluation, scan_locus

SQUARE = RealRationalMap([0, 0, 1])
JOUKOWSKI = RealRationalMap([1, 0, 1], [0, 1])
# two real critical points close together: large perturbations push them off the line
NEAR_FOLD = RealRationalMap([0, Fraction(-3, 100), 0, 1], [1, 0, Fraction(1, 5)])


def generic_map(rng, d):
    while True:
        f = random_map(rng, d)
        if critical_points(f).generic:
            return f


def test_map_construction_errors():
    with pytest.raises(MapError):
        RealRationalMap([1], [1])
    with pytest.raises(MapError):
        RealRationalMap([1, 1], [0])
    with pytest.raises(MapError):
        RealRationalMap([0, 1], [0, 1])
    with pytest.raises(MapError):
        RealRationalMap([float("nan"), 1])
    assert RealRationalMap(["0.1", 1]).p[0] == Fraction(1, 10)


def test_square_critical_points():
    data = critical_points(SQUARE)
    assert data.count == 2 and data.generic
    assert sorted((c.point is None, c.multiplicity) for c in data.points) == [(False, 1), (True, 1)]
    assert all(c.is_real for c in data.points)


def test_joukowski_critical_points():
    data = critical_points(JOUKOWSKI)
    pts = sorted((c.point.real, c.value.real) for c in data.points)
    assert data.generic and data.count == 2
    assert pts == pytest.approx([(-1, -2), (1, 2)], abs=1e-12)


def test_complex_points_pair_off():
    rng = random.Random(61)
    for _ in range(60):
        f = random_map(rng, rng.randrange(2, 6))
        data = critical_points(f)
        assert data.count == 2 * f.degree - 2
        finite = [c.point for c in data.points if c.point is not None and not c.is_real]
        for z in finite:
            assert min(abs(z.conjugate() - w) for w in finite) < 1e-8


def test_degree_drop_puts_points_at_infinity():
    # z^3 + z has Wronskian 3z^2 + 1, so infinity is a double critical point
    data = critical_points(RealRationalMap([0, 1, 0, 1]))
    assert data.infinity_multiplicity == 2 and data.count == 4


def test_square_locus_is_imaginary_axis():
    arcs = trace_locus(SQUARE).strands
    assert len(arcs) == 1
    z = arcs[0].z
    finite = z[np.isfinite(z)]
    assert np.max(np.abs(finite.real)) < 1e-6
    assert np.min(finite.imag) > -1e-9


def test_grid_scan_agrees_with_tracing():
    xs = np.linspace(-2, 2, 401)
    ys = np.linspace(0.1, 0.9, 9)
    crossings = scan_locus(JOUKOWSKI, xs, ys)
    assert len(crossings) == 2 * len(ys)
    for x, y in crossings:
        assert abs(math.hypot(x, y) - 1) < 1e-3


def test_extraction_invariants_on_random_maps():
    rng = random.Random(62)
    for _ in range(25):
        f = generic_map(rng, rng.randrange(2, 6))
        e = extract_tangle(f)
        t = e.tangle
        assert not validate(t)
        assert not t.inner
        assert 2 * t.outer.arity <= 2 * f.degree - 2
        diag = e.diagnostics
        assert diag["weight_sum_mismatch"] == (diag["total_weight"] != f.degree)
        assert len(diag["critical_points"]) == len(diag["critical_values"])


def _rotations(t):
    """Every tangle obtained from ``t`` by moving the outer base point."""
    k2 = t.outer.npoints
    out = set()
    for r in range(max(k2, 1)):
        def rot(e):
            return (e[0], (e[1] + r) % k2) if e[0] == -1 else e
        for shading in (WHITE, BLACK):
            u = Tangle(t.outer, t.inner, tuple((rot(a), rot(b)) for a, b in t.strands),
                       tuple((rot(c), rot(a)) for c, a in t.nesting), tuple(rot(a) for a in t.loops), shading)
            if not validate(u):
                out.add(canonicalize(u))
    return out


def test_mobius_invariance():
    rng = random.Random(63)
    for _ in range(6):
        f = generic_map(rng, rng.randrange(2, 5))
        base = _rotations(extract_tangle(f).tangle)
        for a, b, c, d in ((1, 1, 0, 1), (2, 0, 0, 1), (1, 0, 1, 1), (3, -1, 1, 2)):
            assert a * d - b * c > 0
            g = f.precompose(a, b, c, d)
            if not critical_points(g).generic:
                continue
            assert canonicalize(extract_tangle(g).tangle) in base


def test_boundary_degree():
    assert boundary_evaluation(SQUARE) == 0
    assert boundary_evaluation(RealRationalMap([0, 1])) == 1
    assert boundary_evaluation(RealRationalMap([0, -1])) == -1
    rng = random.Random(64)
    for _ in range(30):
        f = random_map(rng, rng.randrange(1, 6))
        y = rng.uniform(-3, 3)
        # signed count of real preimages of the regular value y
        roots = np.roots((f.p_float - y * f.q_float)[::-1])
        real = roots[np.abs(roots.imag) < 1e-9].real
        wr = np.polynomial.polynomial.Polynomial([float(c) for c in f.wronskian()] or [0.0])
        signs = [np.sign(wr(x) / np.polynomial.polynomial.polyval(x, f.q_float) ** 2) for x in real]
        assert boundary_evaluation(f) == int(sum(signs))


def test_stability():
    assert chamber_stability(SQUARE, 0.0)
    assert chamber_stability(SQUARE, 1e-3, trials=20)
    assert chamber_stability(NEAR_FOLD, 1e-4, trials=20)
    r = stability_report(NEAR_FOLD, 0.3, trials=20, seed=0)
    assert r.failures > 0 and not r.stable
    assert stability_report(NEAR_FOLD, 0.3, trials=20, seed=0) == r
