from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from filterlab.constructions import build_block_counterexample
from filterlab.convergence import (
    ConvergenceQuery,
    almost_schur_check,
    cluster_refuter,
    f_limit,
    far_density,
    stat_vs_cesaro,
    strong_cesaro,
)
from filterlab.errors import InvalidArgument
from filterlab.filters import ColumnFD, Frechet, Statistical
from filterlab.l1seq import (
    L1Vec,
    Summing,
    alternating,
    canonical_basis,
    cesaro_means,
    decaying_unit,
    harmonic,
    identity,
    remark_sequence,
    scalar_constant,
    squares_indicator,
    user_defined,
)
from filterlab.setalg import ALL_N, ArithProgression, Dyadic

F = Fraction
H = 10_000


def test_f_limit_examples():
    assert f_limit(ConvergenceQuery(Frechet(), harmonic(), 0, "scalar", F(1, 100), H)).proved
    assert f_limit(ConvergenceQuery(Statistical(), squares_indicator(), 0, "scalar", F(1, 2), H)).proved
    assert f_limit(ConvergenceQuery(Frechet(), squares_indicator(), 0, "scalar", F(1, 2), H)).refuted
    assert f_limit(ConvergenceQuery(Frechet(), canonical_basis(), 0, "coord", F(1, 2), H)).proved
    assert f_limit(ConvergenceQuery(Frechet(), canonical_basis(), 0, "norm", F(1, 2), H)).refuted


def test_f_limit_walsh_sequence_norm_mode():
    seq, _ = build_block_counterexample(Statistical(), ALL_N, Dyadic(), F(1, 2), horizon=1 << 14, functionals=0)
    assert f_limit(ConvergenceQuery(Statistical(), seq, 0, "norm", F(1, 2), 1 << 14)).refuted
    assert almost_schur_check(Statistical(), seq, 1, horizon=1 << 14).refuted


def test_query_validation():
    with pytest.raises(InvalidArgument):
        ConvergenceQuery(Frechet(), harmonic(), 0, "scalar", 0, H)
    with pytest.raises(InvalidArgument):
        ConvergenceQuery(Frechet(), canonical_basis(), 0, "weak", F(1, 2), H)
    with pytest.raises(InvalidArgument):
        ConvergenceQuery(Frechet(), harmonic(), 0, "norm", F(1, 2), H)


def test_cluster_refuter_examples():
    r = cluster_refuter(Frechet(), alternating(), 1, F(1, 2), H)
    assert r is not None and r.stationarity.proved
    assert [j for j in range(1, 12) if r.member(j)] == [1, 3, 5, 7, 9, 11]
    assert cluster_refuter(ColumnFD(), remark_sequence(), 0, F(1, 2), H, mode="coord") is None
    r = cluster_refuter(Statistical(), identity(), 0, 1, H)
    assert r is not None and r.stationarity.proved
    assert all(r.member(j) for j in range(1, 100))
    assert cluster_refuter(Frechet(), harmonic(), 0, F(1, 10), H) is None


def test_almost_schur_examples():
    assert almost_schur_check(Frechet(), decaying_unit(1), F(1, 10), horizon=H).proved
    v = almost_schur_check(Frechet(), canonical_basis(), 1, horizon=H)
    assert v.refuted
    with pytest.raises(InvalidArgument):
        almost_schur_check(Frechet(), harmonic(), 1)


def test_strong_cesaro_examples():
    rep = strong_cesaro(squares_indicator(), 0, 10 ** 6)
    assert rep.average(10 ** 6) == F(1, 1000)
    assert stat_vs_cesaro(squares_indicator(), 0, 10 ** 6, F(1, 100)).proved
    alt = alternating()
    for x in (F(0), F(1), F(-1), F(7, 3)):
        rep = strong_cesaro(alt, x, H)
        assert all(a >= 1 for n, a in rep.table if n % 2 == 0)
        v = stat_vs_cesaro(alt, x, H, F(1, 2))
        assert v.proved and v.certificate["diagnostics"]["cesaro"] == "not convergent"
    assert all(a == 0 for _, a in strong_cesaro(scalar_constant(5), 5, H).table)


def test_stat_vs_cesaro_needs_bound():
    with pytest.raises(InvalidArgument):
        stat_vs_cesaro(user_defined(lambda n: F(1, n), kind="scalar"), 0, 100, F(1, 10))


def test_far_density_counts():
    assert far_density(squares_indicator(), 0, F(1, 2), 10 ** 4) == F(100, 10 ** 4)
    assert far_density(harmonic(), 0, F(1, 10), 1000) == F(10, 1000)


# -- properties ------------------------------------------------------------------------

rats = st.fractions(min_value=-3, max_value=3, max_denominator=6)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(["harmonic", "alternating", "identity", "constant"]), rats, rats)
def test_frechet_agrees_with_classical_limit(kind, a, b):
    eps = F(1, 4)
    if kind == "harmonic":
        seq, conv = harmonic(a, b), True
    elif kind == "alternating":
        seq, conv, b = alternating(a), a == 0, a
    elif kind == "identity":
        seq, conv = identity(a), a == 0 and b == 0
    else:
        seq, conv = scalar_constant(a), a == b
    v = f_limit(ConvergenceQuery(Frechet(), seq, b, "scalar", eps, H))
    assert v.proved == conv and v.refuted == (not conv)


VSEQS = [canonical_basis(), decaying_unit(1), remark_sequence(),
         user_defined(lambda n: L1Vec.of({1: F(1, n), n + 1: F(1, 2)}))]


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(VSEQS), st.sampled_from([Frechet(), Statistical(), ColumnFD()]),
       st.sampled_from([F(1, 4), F(1, 2), F(3, 2)]))
def test_mode_monotonicity(seq, Fl, eps):
    fam = (Summing(),)
    norm = f_limit(ConvergenceQuery(Fl, seq, 0, "norm", eps, 2000))
    weak = f_limit(ConvergenceQuery(Fl, seq, 0, "weak", eps, 2000, family=fam))
    coord = f_limit(ConvergenceQuery(Fl, seq, 0, "coord", eps, 2000))
    if norm.proved:
        assert weak.proved
    if weak.proved:
        assert not coord.refuted


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([alternating(), identity(), squares_indicator(), harmonic(1, 1)]),
       st.sampled_from([Frechet(), Statistical()]), rats)
def test_refuter_set_never_refuted_stationary(seq, Fl, x):
    r = cluster_refuter(Fl, seq, x, F(1, 3), H)
    if r is not None:
        assert not r.stationarity.refuted


def test_cesaro_means_of_norm_statistical_limit():
    # x_n = e_1 off the squares, e_n on them: F_s-norm-convergent to e_1
    squares = {k * k for k in range(1, 40)}
    seq = user_defined(lambda n: L1Vec.unit(n) if n in squares else L1Vec.unit(1))
    e1 = L1Vec.unit(1)
    dists = [(cesaro_means(seq, n) - e1).norm1() for n in (100, 400, 1500)]
    assert dists[0] > dists[1] > dists[2] and dists[2] < F(1, 10)
