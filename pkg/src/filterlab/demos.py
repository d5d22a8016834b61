"""Named end-to-end demonstrations.  Each demo runs a handful of checks with an
expected outcome and reports whether every check came out as expected."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .constructions import build_block_counterexample, extract_fd_claim, oscillation_functional
from .convergence import ConvergenceQuery, almost_schur_check, f_limit
from .errors import InvalidArgument
from .filters import (
    ColumnFD,
    Frechet,
    Statistical,
    block_respecting_check,
    diagonal_check,
    fd_tails_chain,
    sum_filter,
    trace,
)
from .l1seq import BlockSigns, EventuallyPeriodicSigns, L1Vec, Summing, canonical_basis, remark_sequence
from .setalg import ALL_N, ArithProgression, Derived, Dyadic, column_set, pair, rectangle
from .verdict import CONSISTENT, PROVED, REFUTED, consistent, proved, refuted


@dataclass
class DemoResult:
    name: str
    anchor: str
    checks: dict = field(default_factory=dict)  # id -> (expected status, Verdict)

    def add(self, cid: str, expected: str, v):
        self.checks[cid] = (expected, v)

    @property
    def matched(self) -> bool:
        return all(v.status == e for e, v in self.checks.values())

    def verdict(self, horizon: int):
        rows = {cid: {"expected": e, "got": v.status} for cid, (e, v) in sorted(self.checks.items())}
        if self.matched:
            return proved(horizon, demo=self.name, anchor=self.anchor, checks=rows)
        if any(v.status == CONSISTENT for _, v in self.checks.values()):
            return consistent(horizon, demo=self.name, anchor=self.anchor, checks=rows)
        return refuted(horizon, demo=self.name, anchor=self.anchor, checks=rows)


def theorem2(horizon=1 << 16, seed=0, samples=200) -> DemoResult:
    r = DemoResult("theorem2", "a Schur filter must be block-respecting: Walsh blocks defeat any "
                               "filter without bounded selectors")
    F, eps = Statistical(), Fraction(1, 2)
    r.add("block-respecting", REFUTED, block_respecting_check(F, ALL_N, Dyadic(), horizon))
    seq, cert = build_block_counterexample(F, ALL_N, Dyadic(), eps, horizon=horizon, functionals=samples, seed=seed)
    ok = (proved if cert.ok else refuted)(horizon, certificate=cert)
    r.add("weak-certificate", PROVED, ok)
    fam = (Summing(), EventuallyPeriodicSigns((), (1, -1)), BlockSigns(((0, 64),), (1,)))
    r.add("weak-null", PROVED, f_limit(ConvergenceQuery(F, seq, 0, "weak", eps, horizon, family=fam)))
    r.add("coordinatewise-null", PROVED, f_limit(ConvergenceQuery(F, seq, 0, "coord", eps, horizon)))
    r.add("norm-null", REFUTED, f_limit(ConvergenceQuery(F, seq, 0, "norm", eps, horizon)))
    r.add("almost-schur", REFUTED, almost_schur_check(F, seq, 1, horizon=horizon))
    return r


def theorem4(horizon=100_000, seed=0, samples=200) -> DemoResult:
    r = DemoResult("theorem4", "the column filter F_D is block-respecting but not diagonal, and still "
                               "fails the Schur property through a per-column oscillating functional")
    F = ColumnFD()
    r.add("block-respecting", PROVED, block_respecting_check(F, ALL_N, Dyadic(), min(horizon, 1 << 14)))
    r.add("diagonal", REFUTED, diagonal_check(F, fd_tails_chain(), ALL_N, horizon))
    r.add("claim", PROVED, extract_fd_claim(canonical_basis(), horizon=min(horizon, 20_000), samples=samples,
                                            seed=seed))
    n = min(horizon, 10_000)
    z = {k: L1Vec.unit(k) for k in range(1, n + 1)}
    _, rep = oscillation_functional(z, {k: (k - 1, k) for k in z})
    weak = (refuted if rep.refutes else consistent)(n, rule="oscillation of a blockwise sign functional",
                                                     columns_checked=len(rep.columns), first=rep.columns[:3])
    r.add("weak-null-by-oscillation", REFUTED, weak)
    return r


def theorem13(horizon=1 << 20, seed=0, samples=200) -> DemoResult:
    r = DemoResult("theorem13", "the statistical filter is not block-respecting: one point per dyadic "
                                "block is a density-zero set")
    r.add("block-respecting", REFUTED, block_respecting_check(Statistical(), ALL_N, Dyadic(), horizon))
    return r


def theorem15(horizon=100_000, seed=0, samples=200) -> DemoResult:
    r = DemoResult("theorem15", "traces of a filter on stationary sets can be block-respecting while the "
                                "filter is not, so the property does not pass to larger filters")
    N1, N2 = ArithProgression(1, 2), ArithProgression(2, 2)
    F = sum_filter(Frechet(), N1, Statistical(), N2)
    r.add("F on N2", REFUTED, block_respecting_check(F, N2, Derived(N2, Dyadic()), horizon))
    r.add("trace F(N1)", PROVED, block_respecting_check(trace(F, N1), N1, Derived(N1, Dyadic()), horizon))
    return r


def remark5(horizon=100_000, seed=0, samples=200) -> DemoResult:
    r = DemoResult("remark5", "x_n = e_n + e_column(n) is coordinate-wise F_D-null, yet along every "
                              "standard set some column coordinate sticks at 1")
    s = remark_sequence()
    r.add("F_D coordinatewise-null", PROVED, f_limit(ConvergenceQuery(ColumnFD(), s, 0, "coord", 1, horizon)))
    sets = {"even columns": column_set(ArithProgression(2, 2)),
            "rows 1 mod 3 from column 3": rectangle(ArithProgression(1, 3), ArithProgression(3, 1)),
            "all columns": column_set(ALL_N)}
    for name, J in sets.items():
        r.add(f"along {name}", REFUTED, f_limit(ConvergenceQuery(trace(Frechet(), J), s, 0, "coord", 1, horizon)))
    return r


def stuck_indices(J, column: int, horizon: int) -> int:
    """|{n <= horizon in J : n lies in the given column}|: the indices where
    coordinate ``column`` of the remark sequence equals 1."""
    return sum(1 for n in range(1, horizon + 1) if pair(n)[1] == column and n in J)


DEMOS: dict[str, Callable[..., DemoResult]] = {
    "theorem2": theorem2,
    "theorem4": theorem4,
    "theorem13": theorem13,
    "theorem15": theorem15,
    "remark5": remark5,
}


def run_demo(name: str, **kw) -> DemoResult:
    if name not in DEMOS:
        raise InvalidArgument(f"unknown demo {name!r}; choose from {', '.join(DEMOS)}")
    return DEMOS[name](**kw)
