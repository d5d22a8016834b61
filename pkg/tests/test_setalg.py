from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from filterlab.errors import InvalidArgument, InvalidBlocking
from filterlab.setalg import (
    ALL_N,
    ArithProgression,
    BlockSelector,
    ColumnSet,
    Complement,
    Derived,
    Difference,
    Dyadic,
    EventuallyPeriodic,
    ExplicitBoundaries,
    FiniteSet,
    Intersection,
    Powers,
    Union,
    counting,
    density,
    make_blocking,
    make_columns,
    member,
    normalize,
    pair,
    set_from_json,
    set_to_json,
    unpair,
)


def test_member_examples():
    assert member(ArithProgression(0, 2), 4)
    assert not member(Complement(FiniteSet({1, 2, 3})), 2)
    sel = BlockSelector(Dyadic(), "min")
    assert [n for n in range(1, 20) if member(sel, n)] == [1, 2, 3, 5, 9, 17]


def test_counting_examples():
    assert counting(ArithProgression(0, 2), 100) == 50
    assert counting(Powers(2), 10 ** 6) == sum(1 for k in range(1, 1001) if k * k <= 10 ** 6) == 1000
    assert counting(BlockSelector(Dyadic(), "min"), 1 << 20) == 21


def test_density_examples():
    d = density(ArithProgression(0, 2), 1000)
    assert d.exact and d.value == Fraction(1, 2)
    d = density(BlockSelector(Dyadic(), "min"), 1 << 20)
    assert not d.exact and d.upper <= Fraction(22, 1 << 20)
    d = density(Complement(BlockSelector(Dyadic(), "min")), 1 << 20)
    assert not d.exact and d.estimate >= 1 - Fraction(22, 1 << 20)


def test_normalize_examples():
    assert normalize(Union([ArithProgression(0, 2), ArithProgression(1, 2)])).period == "1"
    e = normalize(Intersection([ArithProgression(0, 2), ArithProgression(0, 3)]))
    assert len(e.period) == 6
    assert all(e.bit(n) == (n % 6 == 0) for n in range(1, 10_001))
    assert normalize(ColumnSet(ALL_N)) is None


def test_blockings():
    assert [list(Dyadic().piece(k)) for k in range(1, 5)] == [[1], [2], [3, 4], [5, 6, 7, 8]]
    eb = ExplicitBoundaries([2, 4, 8])
    assert [list(eb.piece(k)) for k in range(1, 4)] == [[1, 2], [3, 4], [5, 6, 7, 8]]
    with pytest.raises(InvalidBlocking):
        make_blocking("explicit", bounds=[2, 2, 3])
    cols = make_columns()
    assert all(unpair(*pair(n)) == n for n in range(1, 100_001))
    assert cols is not None


@pytest.mark.parametrize("D", [Dyadic(), ExplicitBoundaries([3, 5, 9, 20]), Derived(ArithProgression(2, 3), Dyadic())])
def test_pieces_partition_ground(D):
    ground = getattr(D, "ground", ALL_N)
    seen = {}
    for k in range(1, D.pieces_meeting(2000) + 1):
        for n in D.piece(k):
            assert n not in seen
            seen[n] = k
    for n in range(1, 2001):
        if n in ground:
            assert seen.get(n) == D.piece_of(n)


def test_serde_errors_carry_location():
    with pytest.raises(InvalidArgument, match=r"\$\.args\[1\]"):
        set_from_json({"op": "union", "args": [{"gen": "ap", "first": 1, "step": 2}, {"gen": "nope"}]})


# -- properties ------------------------------------------------------------------------

leaf = st.one_of(
    st.builds(ArithProgression, st.integers(1, 12), st.integers(1, 7)),
    st.builds(lambda xs: FiniteSet(xs), st.frozensets(st.integers(1, 60), max_size=6)),
    st.builds(lambda p, q: EventuallyPeriodic(p, q or "1"),
              st.text("01", max_size=6), st.text("01", min_size=1, max_size=5)),
)
exprs = st.recursive(
    leaf,
    lambda inner: st.one_of(
        st.builds(Complement, inner),
        st.builds(lambda a, b: Union([a, b]), inner, inner),
        st.builds(lambda a, b: Intersection([a, b]), inner, inner),
        st.builds(Difference, inner, inner),
    ),
    max_leaves=6,
)


@settings(max_examples=60, deadline=None)
@given(exprs)
def test_normal_form_preserves_membership(s):
    e = normalize(s)
    assert e is not None
    mask = s.mask(2000)
    assert all(bool(mask[n - 1]) == e.bit(n) == member(s, n) for n in range(1, 2001))


@settings(max_examples=60, deadline=None)
@given(exprs, st.integers(1, 3000))
def test_counting_complement_adds_up(s, n):
    assert counting(s, n) + counting(Complement(s), n) == n
    assert counting(s, n) <= counting(s, n + 1)


@settings(max_examples=40, deadline=None)
@given(exprs)
def test_exact_densities_sum_to_one(s):
    a, b = density(s, 1000), density(Complement(s), 1000)
    if a.exact and b.exact:
        assert a.value + b.value == 1
        assert 0 <= a.value <= 1


@settings(max_examples=40, deadline=None)
@given(exprs)
def test_json_round_trip(s):
    t = set_from_json(set_to_json(s))
    assert np.array_equal(s.mask(500), t.mask(500))


@given(st.integers(1, 10 ** 9))
def test_pairing_bijective(n):
    r, c = pair(n)
    assert r >= 1 and c >= 1 and unpair(r, c) == n
