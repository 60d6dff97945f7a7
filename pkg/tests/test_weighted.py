import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from support import base_region_color, random_composable, random_weighted
from tanglekit import (
    OUTER,
    WHITE,
    CapacityError,
    Disc,
    SewingWeightError,
    Tangle,
    ValidationError,
    WeightedTangle,
    canonicalize_weighted,
    compose,
    compose_detailed,
    compose_weighted,
    empty_disc,
    enumerate_genus0,
    euler_count_check,
    harnack_disc_count,
    identity_tangle,
    total_weight,
)
from tanglekit import io
from tanglekit.weighted import MAX_ENUM_DEGREE, segments

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def matched_pair(rng, max_weight=3):
    """A composable pair with random weights that agree along the glued boundary."""
    while True:
        t, j, s = random_composable(rng, max_inner=3, max_points=12)
        if base_region_color(t, j) == s.shading:
            break
    ws = random_weighted(rng, s, max_weight)
    wt = random_weighted(rng, t, max_weight)
    dj = t.inner[j]
    n2 = 2 * dj.arity
    seg = dict(wt.segment_weights)
    if dj.arity == 0:
        seg[(j, 0)] = ws.segment_weights[(OUTER, 0)]
    else:
        for c in range(n2):
            seg[(j, c)] = ws.segment_weights[(OUTER, (c - dj.base + s.outer.base) % n2)]
    wt = WeightedTangle(t, wt.strand_weights, seg, wt.loop_weights)
    return wt, j, ws


def glued_weight(wt, j):
    return sum(w for (d, _), w in wt.segment_weights.items() if d == j)


def test_total_weight_examples():
    assert total_weight(WeightedTangle.zero(identity_tangle(2))) == 0
    loop = Tangle(Disc(0), (), (), (), ((OUTER, 0),))
    assert total_weight(WeightedTangle(loop, {}, {(OUTER, 0): 0}, (2,))) == 2
    strand = Tangle(Disc(1, 0), (), (((OUTER, 0), (OUTER, 1)),), (), ((OUTER, 0),))
    wt = WeightedTangle(strand, {((OUTER, 0), (OUTER, 1)): 1}, {(OUTER, 0): 1, (OUTER, 1): 0}, (1,))
    assert total_weight(wt) == 3


def test_weight_invariants():
    t = identity_tangle(1)
    with pytest.raises(ValidationError):
        WeightedTangle(t, {}, {c: 0 for c in segments(t)})
    loop = Tangle(Disc(0), (), (), (), ((OUTER, 0),))
    with pytest.raises(ValidationError):
        WeightedTangle(loop, {}, {(OUTER, 0): 0}, (0,))
    with pytest.raises(ValidationError):
        WeightedTangle(t, {s: -1 for s in t.strands}, {c: 0 for c in segments(t)})


def test_zero_weights_stay_zero():
    rng = random.Random(41)
    for _ in range(50):
        while True:
            t, j, s = random_composable(rng)
            if base_region_color(t, j) == s.shading:
                break
        zt, zs = WeightedTangle.zero(t), WeightedTangle.zero(s)
        if any(src[0] == "new" for src in compose_detailed(t, j, s).loop_sources):
            # a loop closed from weight-0 pieces cannot carry weight >= 1
            with pytest.raises(SewingWeightError):
                compose_weighted(zt, j, zs)
            continue
        got = compose_weighted(zt, j, zs)
        assert got.tangle == compose(t, j, s)
        assert sum(got.strand_weights.values()) + sum(got.segment_weights.values()) == 0


def test_concatenated_strand_takes_the_minimum():
    t = identity_tangle(1)
    a, b = t.strands
    outer = WeightedTangle(t, {a: 2, b: 2}, {c: 0 for c in segments(t)})
    inner = WeightedTangle(t, {a: 1, b: 3}, {c: 0 for c in segments(t)})
    got = compose_weighted(outer, 0, inner)
    assert got.strand_weights == {a: 1, b: 2}


def test_sewing_mismatch():
    t = identity_tangle(1)
    zero = {s: 0 for s in t.strands}
    a = WeightedTangle(t, zero, {c: 0 for c in segments(t)})
    segs = {c: 0 for c in segments(t)}
    segs[(OUTER, 0)] = 1
    b = WeightedTangle(t, zero, segs)
    with pytest.raises(SewingWeightError):
        compose_weighted(a, 0, b)


def test_degree_additivity_with_empty_boundary():
    loop = Tangle(Disc(0), (), (), (), ((OUTER, 0),), WHITE)
    host = Tangle(Disc(0), (Disc(0),), (), (((0, 0), (OUTER, 0)),), ((OUTER, 0),), WHITE)
    a = WeightedTangle(host, {}, {(OUTER, 0): 1, (0, 0): 0}, (2,))
    b = WeightedTangle(loop, {}, {(OUTER, 0): 0}, (3,))
    assert total_weight(compose_weighted(a, 0, b)) == total_weight(a) + total_weight(b) == 6


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_degree_bookkeeping(seed):
    rng = random.Random(seed)
    wt, j, ws = matched_pair(rng)
    detail = compose_detailed(wt.tangle, j, ws.tangle)

    def piece(side, pair):
        return (wt if side == "t" else ws).strand_weights[pair]

    joins = [[piece(side, p) for side, p in used] for used in detail.strand_sources.values()]
    joins += [[piece(side, p) for side, p in src[1]] for src in detail.loop_sources if src[0] == "new"]
    if any(min(ws_) < 1 for ws_ in joins[len(detail.strand_sources):]):
        with pytest.raises(SewingWeightError):
            compose_weighted(wt, j, ws)
        return
    got = compose_weighted(wt, j, ws)
    for pair, used in detail.strand_sources.items():
        assert got.strand_weights[pair] == min(piece(side, p) for side, p in used)
    # glued segments vanish from both sides; each join keeps only its lightest piece
    lost = 2 * glued_weight(wt, j) + sum(sum(w) - min(w) for w in joins)
    assert total_weight(got) == total_weight(wt) + total_weight(ws) - lost


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_canonical_weighted_is_stable(seed):
    rng = random.Random(seed)
    wt = random_weighted(rng)
    c = canonicalize_weighted(wt)
    assert canonicalize_weighted(c) == c
    assert total_weight(c) == total_weight(wt)


def test_counting_helpers():
    assert [euler_count_check(0, 2), euler_count_check(0, 4), euler_count_check(1, 1)] == [2, 6, 2]
    assert harnack_disc_count(0) == 1 and harnack_disc_count(3) == 4


def test_enumeration_properties():
    assert MAX_ENUM_DEGREE >= 4
    for d in range(1, 4):
        items = enumerate_genus0(d)
        assert items == enumerate_genus0(d)
        texts = [io.serialize_weighted(w) for w in items]
        assert len(set(texts)) == len(texts)
        for w in items:
            assert total_weight(w) == d
            assert not w.tangle.inner
            assert 2 * w.tangle.outer.arity <= 2 * d - 2
            assert canonicalize_weighted(w) == w
    shapes = {w.tangle for w in enumerate_genus0(4) if w.tangle.outer.arity == 3 and not w.tangle.loops}
    assert len(shapes) == 2 * 5


def test_enumeration_bounds():
    for d in (0, MAX_ENUM_DEGREE + 1, 2.0):
        with pytest.raises(CapacityError):
            enumerate_genus0(d)
    assert all(total_weight(w) == 1 for w in enumerate_genus0(1))
    assert empty_disc().outer.arity == 0
