from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from filterlab.errors import InvalidArgument
from filterlab.l1seq import (
    BlockSigns,
    EventuallyPeriodicSigns,
    L1Vec,
    Summing,
    apply,
    canonical_basis,
    cesaro_means,
    constant_vector,
    head_mass,
    perturbed_basis,
    remark_sequence,
    seq_from_json,
    sign_functional,
    tail_mass,
    user_defined,
)
from filterlab.setalg import pair

F = Fraction


def test_norm_coord_apply():
    e3 = L1Vec.unit(3)
    assert e3.norm1() == 1 and e3.coord(3) == 1 and e3.coord(4) == 0
    assert apply(Summing(), L1Vec.unit(1) + L1Vec.unit(2)) == 2
    v = L1Vec.of({2: F(-1, 3), 5: 2})
    assert v.norm1() == F(7, 3)
    assert (v - v).is_zero()


def test_scaled_vectors_stay_rational():
    v = L1Vec.of({1: 1, 2: -1}, sqrt_half=True)
    assert v.norm1_sq() == 2
    with pytest.raises(InvalidArgument):
        v.norm1()
    with pytest.raises(InvalidArgument):
        Summing()(v)
    with pytest.raises(InvalidArgument):
        v + L1Vec.unit(3)
    # f(v) = 2/sqrt(2) = sqrt(2) >= 1 but < 3/2
    f = EventuallyPeriodicSigns((1, -1), (0,))
    assert f.at_least(v, 1) and not f.at_least(v, F(3, 2))


def test_masses():
    assert tail_mass(L1Vec.unit(5), 6) == 0
    assert head_mass(L1Vec.of({1: F(1, 2), 9: 1}), 1) == F(1, 2)


def test_functional_values_are_validated():
    with pytest.raises(InvalidArgument):
        EventuallyPeriodicSigns((F(3, 2),), (1,))
    with pytest.raises(InvalidArgument):
        BlockSigns(((0, 4),), (2,))
    with pytest.raises(InvalidArgument):
        BlockSigns(((0, 4), (3, 8)), (1, 1))
    f = BlockSigns(((0, 2), (2, 6)), (1, -1))
    assert [f.value(k) for k in range(1, 8)] == [1, 1, -1, -1, -1, -1, 0]


def test_named_sequences():
    g = remark_sequence()
    for n in range(1, 500):
        m = pair(n)[1]
        want = {n: 2} if n == m else {n: 1, m: 1}
        assert g(n).coords == want
    assert canonical_basis()(7) == L1Vec.unit(7)
    x = perturbed_basis()(4)
    assert x.coords == {1: F(1, 4), 5: 1} and x.norm1() == F(5, 4)
    assert seq_from_json({"name": "perturbed_basis"})(4) == x
    with pytest.raises(InvalidArgument, match=r"\$\.name"):
        seq_from_json({"name": "nope"})


def test_cesaro_means_examples():
    v = L1Vec.of({1: F(1, 2), 3: -1})
    assert all(cesaro_means(constant_vector(v), n) == v for n in (1, 5, 17))
    m = cesaro_means(canonical_basis(), 4)
    assert m == L1Vec.of({k: F(1, 4) for k in range(1, 5)}) and m.norm1() == 1
    # 100 squares each move the mean by at most (||v|| + 1) / n
    v = L1Vec.of({1: F(1, 2), 3: F(-1, 2)})
    squares = {k * k for k in range(1, 101)}
    g = user_defined(lambda n: L1Vec.unit(n) if n in squares else v)
    n = 10 ** 4
    assert (cesaro_means(g, n) - v).norm1() <= F(2, 100)


# -- properties ------------------------------------------------------------------------

rats = st.fractions(min_value=-5, max_value=5, max_denominator=12)
vecs = st.dictionaries(st.integers(1, 40), rats, max_size=8).map(L1Vec.of)
unit_rats = st.fractions(min_value=-1, max_value=1, max_denominator=8)
functionals = st.one_of(
    st.just(Summing()),
    st.builds(lambda p, q: EventuallyPeriodicSigns(tuple(p), tuple(q)),
              st.lists(unit_rats, max_size=4), st.lists(unit_rats, min_size=1, max_size=3)),
    st.builds(lambda vals: BlockSigns(tuple((5 * i, 5 * i + 5) for i in range(len(vals))), tuple(vals)),
              st.lists(unit_rats, max_size=6)),
)


@given(vecs, vecs)
def test_triangle_inequality(u, v):
    assert (u + v).norm1() <= u.norm1() + v.norm1()


@given(vecs, st.integers(0, 45))
def test_head_tail_partition(v, m):
    assert v.head_mass(m) + v.tail_mass(m + 1) == v.norm1()
    assert v.tail_mass(1) == v.norm1()


@given(functionals, vecs)
def test_functionals_have_norm_at_most_one(f, v):
    assert abs(f(v)) <= v.norm1()


@given(vecs)
def test_sign_functional_attains_norm(v):
    assert sign_functional(v)(v) == v.norm1()


@settings(max_examples=30, deadline=None)
@given(functionals, st.lists(vecs, min_size=1, max_size=6))
def test_cesaro_commutes_with_functionals(f, xs):
    g = user_defined(lambda n: xs[n - 1])
    n = len(xs)
    assert f(cesaro_means(g, n)) == sum((f(x) for x in xs), F(0)) / n


def test_vector_json_round_trip():
    v = L1Vec.of({3: F(1, 2), 10: -2}, sqrt_half=True)
    assert L1Vec.from_json(v.to_json()) == v
    assert v.to_json() == {"coords": {"3": "1/2", "10": "-2"}, "scaleSqrtHalf": True}
