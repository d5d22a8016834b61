import json
from fractions import Fraction

import pytest

from filterlab.certcheck import check_text, verify_certificate
from filterlab.constructions import (
    DeltaSchedule,
    Ineq,
    build_block_counterexample,
    d_max,
    extract_basic_subsequence,
    extract_fd_claim,
    failing,
    oscillation_functional,
    perturbation_check,
    walsh_system,
)
from filterlab.errors import InvalidArgument, PreconditionError
from filterlab.filters import ColumnFD, Frechet, Statistical
from filterlab.l1seq import L1Vec, canonical_basis, remark_sequence, user_defined
from filterlab.setalg import ALL_N, ColumnSet, Dyadic, pair, unpair
from filterlab.verdict import jsonable

F = Fraction


def test_perturbation_exact_block_basis():
    y = [L1Vec.unit(n, 2) for n in range(1, 6)]
    rep = perturbation_check(y, [(n - 1, n) for n in range(1, 6)], F(1, 2), samples=200)
    assert rep.worst_ratio == 1 and rep.violations == 0 and rep.max_perturbation == 0 and rep.ok


def test_perturbation_small_tails():
    y = [L1Vec.of({2 * n: 1, 2 * n + 1: F(1, 8)}) for n in range(1, 8)]
    rep = perturbation_check(y, [(2 * n - 1, 2 * n) for n in range(1, 8)], F(1, 2), eps0=1, samples=1000)
    assert rep.c1 == F(1, 2) and rep.violations == 0 and rep.ok


def test_perturbation_boundary_rejected():
    y = [L1Vec.unit(1), L1Vec.of({2: 1, 3: F(1, 4)})]
    with pytest.raises(PreconditionError):
        perturbation_check(y, [(0, 1), (1, 2)], F(1, 2), eps0=1)
    with pytest.raises(InvalidArgument):
        perturbation_check(y, [(0, 2), (1, 3)], F(1, 2), eps0=1)


def test_delta_schedule():
    s = DeltaSchedule.geometric(F(1, 2))
    assert s(1) == F(1, 32) and s.total() == F(1, 16) and s.partial(3) == F(7, 128)
    with pytest.raises(InvalidArgument):
        DeltaSchedule(F(1, 2), F(1, 8))
    with pytest.raises(InvalidArgument):
        DeltaSchedule(F(1, 2), F(1, 100), F(1))
    with pytest.raises(InvalidArgument):
        s(0)


def test_extraction_canonical_basis():
    v = extract_basic_subsequence(Frechet(), canonical_basis(), ALL_N, horizon=1 << 12, samples=100)
    assert v.proved
    cert = v.certificate["certificate"]
    assert all(p == 0 for p in cert.perturbations)
    assert verify_certificate(jsonable(v)).proved


def test_extraction_rejects_remark_sequence_along_standard_set():
    with pytest.raises(PreconditionError):
        extract_basic_subsequence(ColumnFD(), remark_sequence(), ColumnSet(ALL_N), horizon=5000, samples=10)


def test_fd_claim_canonical():
    v = extract_fd_claim(canonical_basis(), horizon=5000, samples=100)
    assert v.proved
    cert = v.certificate["certificate"]
    assert cert.report.max_perturbation == 0
    assert len(set(cert.columns)) >= 3


def test_fd_claim_perturbed():
    seq = user_defined(lambda n: L1Vec.of([(n + 1, 1), (1, F(1, n))]))
    v = extract_fd_claim(seq, horizon=5000, samples=100)
    assert v.proved
    cert = v.certificate["certificate"]
    for n, (lo, hi) in zip(cert.n, cert.blocks):
        z = seq(n)
        assert z.norm1() - z.restrict(lo, hi).norm1() <= F(1, n)
    assert verify_certificate(jsonable(v)).proved


def test_fd_claim_rejects_constant_column():
    seq = user_defined(lambda n: L1Vec.unit(pair(n)[1]))
    with pytest.raises(PreconditionError):
        extract_fd_claim(seq, horizon=2000, samples=10)


def test_walsh_small_dimensions():
    w = walsh_system(1, samples=50)
    assert w.symbolic and not failing(w.records)
    assert w.vector(1).norm1_sq() == 2
    w = walsh_system(2, samples=50)
    assert w.bounds([1, 1]) == (16, 16, 32)
    assert w.bounds([1, 0]) == (8, 16, 16)
    with pytest.raises(InvalidArgument):
        walsh_system(17)


def test_counterexample_preconditions():
    assert d_max(F(1, 2)) == 8 and d_max(1) == 2
    seq, cert = build_block_counterexample(Statistical(), ALL_N, Dyadic(), 1, horizon=1 << 12, functionals=0)
    assert cert.d_max == 2
    assert all(seq(n).norm1_sq() == 2 for n in range(1, 17))
    with pytest.raises(PreconditionError):
        build_block_counterexample(Frechet(), ALL_N, Dyadic(), F(1, 2), horizon=1 << 12, functionals=0)


def _basis_blocks(n):
    z = {k: L1Vec.unit(k) for k in range(1, n + 1)}
    return z, {k: (k - 1, k) for k in z}


def test_oscillation_examples():
    z, blocks = _basis_blocks(10_000)
    f, rep = oscillation_functional(z, blocks)
    assert rep.refutes
    assert all(rep.oscillation(c["column"]) == 2 for c in rep.columns[:20])
    # along column 1 the values alternate
    assert [f(z[unpair(r, 1)]) for r in range(1, 5)] == [-1, 1, -1, 1]
    _, rep = oscillation_functional(z, blocks, signs=lambda n: 1)
    assert not rep.refutes and rep.oscillation(1) == 0
    z2 = {k: v.scale(2) for k, v in z.items()}
    _, rep = oscillation_functional(z2, blocks)
    assert rep.refutes and rep.oscillation(1) == 4


def test_oscillation_rejects_bad_blocks():
    z = {1: L1Vec.unit(1), 2: L1Vec.unit(2)}
    with pytest.raises(InvalidArgument):
        oscillation_functional(z, {1: (0, 2), 2: (1, 3)})
    with pytest.raises(InvalidArgument):
        oscillation_functional(z, {1: (0, 1), 2: (2, 3)})


def test_certificate_tamper_detected():
    v = extract_fd_claim(canonical_basis(), horizon=2000, samples=20)
    doc = json.loads(json.dumps(jsonable(v)))
    assert verify_certificate(doc).proved
    recs = doc["certificate"]["certificate"]["records"]
    recs[0]["lhs"] = "5"
    out = verify_certificate(doc)
    assert out.refuted and out.certificate["first_failure"]["kind"] == "inequality"
    with pytest.raises(InvalidArgument, match="line 1"):
        check_text("{nope")
    assert verify_certificate({"nothing": 1}).status == "Consistent"


def test_ineq_round_trip_large_numbers():
    r = Ineq("tiny", F(1, 2 ** 5000), F(1, 3 ** 9), "<")
    assert Ineq.from_json(json.loads(json.dumps(r.to_json()))) == r
    assert r.holds()
