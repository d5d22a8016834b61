from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from filterlab.certcheck import verify_certificate
from filterlab.errors import InvalidArgument, InvalidChain, InvalidTrace
from filterlab.filters import (
    BaseChain,
    ColumnFd,
    ColumnFD,
    CountableBase,
    Frechet,
    Statistical,
    block_respecting_check,
    constant_chain,
    diagonal_check,
    fd_drop_chain,
    fd_tails_chain,
    filter_from_json,
    product,
    split_stationary,
    standard_embedding,
    strongly_diagonal_witness,
    sum_filter,
    tails_chain,
    trace,
)
from filterlab.setalg import (
    ALL_N,
    ArithProgression,
    BlockSelector,
    ColumnSet,
    Complement,
    Derived,
    Dyadic,
    FiniteSet,
    Intersection,
    Powers,
    RowRule,
    Union,
    counting,
    pair,
    rectangle,
)
from filterlab.verdict import jsonable

EVENS, ODDS = ArithProgression(2, 2), ArithProgression(1, 2)
H = 10_000


def test_statistical_membership():
    v = Statistical().contains(Complement(EVENS), H)
    assert v.refuted
    assert Statistical().contains(Complement(BlockSelector(Dyadic(), "min")), 1 << 20).proved
    assert Statistical().is_stationary(EVENS, H).proved


def test_column_fd_membership_and_stationarity():
    F = ColumnFD()
    B = ColumnSet(ArithProgression(3, 1), RowRule("cofinite", drop=2))  # B_{3,C}, C = first two rows
    assert F.contains(B, H).proved
    assert F.is_stationary(ColumnSet(FiniteSet({1})), H).refuted
    standard = ColumnSet(EVENS, RowRule("subsample", first=1, step=2))
    assert F.is_stationary(standard, H).proved


def test_trace_sum_product():
    T = trace(Frechet(), EVENS)
    assert T.contains(Intersection([EVENS, ArithProgression(20, 1)]), H).proved
    assert T.contains(ArithProgression(4, 4), H).refuted
    with pytest.raises(InvalidTrace):
        trace(Frechet(), FiniteSet({1, 2}))
    S = sum_filter(Frechet(), ODDS, Statistical(), EVENS)
    assert S.contains(Union([ODDS, Complement(Powers(2))]), H).proved
    assert S.contains(Union([ODDS, ArithProgression(4, 4)]), H).refuted
    P = product(Frechet(), Frechet())
    assert P.contains(rectangle(ALL_N, ArithProgression(6, 1)), H).proved
    with pytest.raises(InvalidArgument):
        sum_filter(Frechet(), ODDS, Frechet(), ArithProgression(3, 2))


def test_block_respecting_examples():
    v = block_respecting_check(Statistical(), ALL_N, Dyadic(), 1 << 20)
    assert v.refuted and v.certificate["min_selector_count"] <= 21
    v = block_respecting_check(Frechet(), EVENS, Derived(EVENS, Dyadic()), H)
    assert v.proved
    J = v.certificate["J"]
    D = v.certificate["blocking"]
    for k in range(1, D.pieces_meeting(H) + 1):
        assert sum(1 for n in D.piece(k) if n in J) == 1
    standard = ColumnSet(ALL_N, RowRule("cofinite", drop=1))
    v = block_respecting_check(ColumnFD(), standard, Derived(standard, Dyadic()), 1 << 14)
    assert v.proved
    assert len(v.certificate["picks_per_column"]) >= 3
    assert verify_certificate(jsonable(v)).proved


def test_diagonal_examples():
    assert diagonal_check(CountableBase(ALL_N), tails_chain(3), ALL_N, H).proved
    v = diagonal_check(ColumnFD(), fd_tails_chain(), ALL_N, H)
    assert v.refuted and "stationary" in v.certificate["argument"]
    v = diagonal_check(Frechet(), tails_chain(), EVENS, H)
    assert v.proved and v.certificate["J"] == EVENS
    bad = BaseChain("custom", rule=lambda n: ArithProgression(1, n))
    with pytest.raises(InvalidChain):
        diagonal_check(Frechet(), bad, ALL_N, H)


def test_strongly_diagonal_examples():
    v = strongly_diagonal_witness(CountableBase(ALL_N), tails_chain(2), ALL_N, H)
    assert v.proved
    assert verify_certificate(jsonable(v)).proved
    v = strongly_diagonal_witness(ColumnFd(), fd_drop_chain(), ColumnSet(FiniteSet({1})), 1000)
    assert v.proved
    assert all(pair(j)[1] == 1 for j in v.certificate["J_prefix"])
    v = strongly_diagonal_witness(CountableBase(EVENS), constant_chain(EVENS), ALL_N, H)
    assert v.proved and set(v.certificate["layers"]) == {"inf"}


def test_split_examples():
    s = split_stationary(Frechet(), EVENS, H)
    assert [n for n in range(1, 20) if n in s.I1] == [2, 6, 10, 14, 18]
    assert [n for n in range(1, 20) if n in s.I2] == [4, 8, 12, 16]
    s = split_stationary(Statistical(), ArithProgression(0, 2), H)
    n = 10 ** 6
    assert all(v.proved for v in s.verdicts)
    assert Fraction(counting(s.I1, n), n) >= Fraction(1, 4) and Fraction(counting(s.I2, n), n) >= Fraction(1, 4)
    std = ColumnSet(ALL_N)
    s = split_stationary(ColumnFD(), std, H)
    assert all(v.proved for v in s.verdicts)


def test_standard_embedding_examples():
    F = ColumnFD()
    emb, v = standard_embedding(F, ColumnSet(ALL_N, RowRule("cofinite", drop=1)))
    assert v.proved
    assert all(pair(emb(n)) == (pair(n)[0] + 1, pair(n)[1]) for n in range(1, 200))
    emb, v = standard_embedding(F, ColumnSet(EVENS), samples=20, horizon=H)
    assert v.proved
    assert all(pair(emb(n))[1] == 2 * pair(n)[1] for n in range(1, 200))
    with pytest.raises(InvalidArgument):
        standard_embedding(F, ColumnSet(FiniteSet({1})))


def test_filter_json():
    F = filter_from_json({"kind": "trace", "parent": "statistical", "I": {"gen": "ap", "first": 1, "step": 2}})
    assert F.contains(Complement(FiniteSet({3})), H).proved
    with pytest.raises(InvalidArgument, match=r"\$\.parent"):
        filter_from_json({"kind": "trace", "parent": {"kind": "nope"}, "I": {"gen": "ap", "first": 1, "step": 2}})
    assert filter_from_json({"kind": "countableBase", "base": "tails"}).contains(ArithProgression(9, 1), H).proved


# -- properties ------------------------------------------------------------------------

FILTERS = [Frechet(), Statistical(), ColumnFD(), ColumnFd(), CountableBase(EVENS), trace(Statistical(), ODDS),
           sum_filter(Frechet(), ODDS, Statistical(), EVENS)]

sets = st.one_of(
    st.builds(ArithProgression, st.integers(1, 8), st.integers(1, 4)),
    st.builds(lambda xs: Complement(FiniteSet(xs)), st.frozensets(st.integers(1, 50), max_size=5)),
    st.builds(lambda c, d: ColumnSet(ArithProgression(c, 1), RowRule("cofinite", drop=d)),
              st.integers(1, 4), st.integers(0, 3)),
    st.builds(lambda c: Complement(ColumnSet(FiniteSet({c}))), st.integers(1, 4)),
)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(FILTERS), sets, sets)
def test_filter_axioms(F, A, B):
    a, b = F.contains(A, H), F.contains(B, H)
    if a.proved and b.proved:
        assert not F.contains(Intersection([A, B]), H).refuted
    if a.proved:
        assert not F.contains(Union([A, B]), H).refuted
        assert not F.is_stationary(A, H).refuted
    assert not F.contains(FiniteSet(()), H).proved
    assert not F.contains(Complement(FiniteSet({1, 2, 3})), H).refuted
