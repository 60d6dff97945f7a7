import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from support import random_map, random_tangle, random_tl, random_weighted, scramble
from tanglekit import (
    BLACK,
    ParseError,
    RealRationalMap,
    TLElement,
    canonicalize,
    empty_disc,
    identity_tangle,
    tl_basis,
)
from tanglekit import io

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_tangle_key_order_and_compactness():
    text = io.serialize_tangle(identity_tangle(1))
    assert list(json.loads(text)) == ["outer", "inner", "strands", "nesting", "loops", "shading"]
    assert " " not in text and "\n" not in text


def test_equal_tangles_serialize_identically():
    rng = random.Random(71)
    for _ in range(100):
        t = random_tangle(rng)
        u = scramble(rng, t)
        assert io.serialize_tangle(canonicalize(t)) == io.serialize_tangle(canonicalize(u))


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as info:
        io.parse_tangle('{"outer": {"arity": 1,\n "base": }')
    assert info.value.line == 2 and info.value.column is not None
    with pytest.raises(ParseError):
        io.parse_tangle('{"outer": {"arity": 1, "base": 0}}')
    with pytest.raises(ParseError):
        io.parse_tangle(io.serialize_tangle(empty_disc()).replace('"w"', '"grey"'))
    with pytest.raises(ParseError):
        io.parse_tl('{"n": -1, "terms": []}')
    with pytest.raises(ParseError):
        io.parse_map('{"p": ["x"], "q": ["1"]}')


def test_map_decimals_are_exact():
    f = io.parse_map('{"p": ["0.1", "0", "1"], "q": ["3"]}')
    assert f == RealRationalMap(["0.1", 0, 1], [3])
    assert io.parse_map(io.serialize_map(f)) == f


def test_empty_disc_request():
    text = io.serialize_eval_request(empty_disc(BLACK), [])
    t, inputs = io.parse_eval_request(text)
    assert t == empty_disc(BLACK) and inputs == []


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_round_trips(seed):
    rng = random.Random(seed)
    t = random_tangle(rng)
    assert io.parse_tangle(io.serialize_tangle(t)) == t
    w = random_weighted(rng)
    assert io.parse_weighted(io.serialize_weighted(w)) == w
    n = rng.randrange(5)
    x = random_tl(rng, n, tl_basis(n), rng.choice("wb"))
    assert io.parse_tl(io.serialize_tl(x)) == x
    f = random_map(rng, rng.randrange(1, 6))
    assert io.parse_map(io.serialize_map(f)) == f


def test_zero_element_round_trip():
    z = TLElement(3)
    assert io.parse_tl(io.serialize_tl(z)) == z
