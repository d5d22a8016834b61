"""Gliding-hump extractions.

``extract_basic_subsequence`` follows the block-respecting route: tail cuts
m(n), thresholds n_i from head-mass decay, blocks D_i = (n_{i-1}, n_i] ∩ I, a
selector from the filter's block-respecting witness, then one stationary half
of it, whose terms are small perturbations of a block basis.

``extract_fd_claim`` is the column version: indices are taken from the
columns in triangular order 1 | 1 2 | 1 2 3 | ... so that the selected set
meets every column infinitely often.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from ..errors import InvalidArgument, PreconditionError
from ..filters import Filter, Frechet, block_respecting_check
from ..filters.handles import Trace
from ..setalg import (
    ALL_N,
    ArithProgression,
    Derived,
    ExplicitBoundaries,
    FiniteSet,
    Image,
    SetExpr,
    counting,
    nth,
)
from ..setalg.pairing import unpair
from ..l1seq import L1Vec, SeqGen, ZERO
from ..verdict import Verdict, consistent, proved
from .perturbation import PerturbationReport, perturbation_check
from .records import Ineq, failing
from .schedule import DeltaSchedule

DEFAULT_EXTRACT_HORIZON = 1 << 20
NORM_SCAN = 4096


def tail_cut(v: L1Vec, delta: Fraction) -> int:
    """Least m >= 1 with sum_{k >= m} |v_k| < delta."""
    acc = Fraction(0)
    m = v.max_index() + 1
    for k, c in reversed(v.items):
        if acc + abs(c) >= delta:
            return k + 1
        acc += abs(c)
        m = k
    return 1 if acc < delta else m


def _coordinatewise_precondition(seq: SeqGen, I: SetExpr, eps: Fraction, horizon: int, coords):
    from ..convergence import ConvergenceQuery, f_limit

    G = Frechet() if I == ALL_N else Trace(Frechet(), I)
    v = f_limit(ConvergenceQuery(G, seq, ZERO, "coord", eps, horizon, coords=coords))
    if v.refuted:
        k = v.certificate.get("failing", "")
        raise PreconditionError(f"the sequence does not converge coordinate-wise to 0 along I ({k})",
                                index=int(k.split()[-1]) if k.startswith("coord") else None)
    return v


def _norm_precondition(seq: SeqGen, I: SetExpr, eps: Fraction, horizon: int) -> int:
    upto = min(horizon, NORM_SCAN, seq.reach(horizon))
    for n in range(1, upto + 1):
        if n in I and not seq(n).norm1_sq() > eps * eps:
            raise PreconditionError(f"||x_{n}|| does not exceed eps = {eps}", index=n)
    return upto


@dataclass
class ExtractionCertificate:
    I: SetExpr
    eps: Fraction
    schedule: DeltaSchedule
    m: dict = field(default_factory=dict)  # n -> m(n)
    n: list = field(default_factory=list)  # n_1, n_2, ...
    picks: list = field(default_factory=list)  # j_1, j_2, ... (one per block)
    parity: Optional[int] = None  # 1: odd half kept, 2: even half
    selected: list = field(default_factory=list)  # (t, j_t, (lo, hi]) per kept vector
    perturbations: list = field(default_factory=list)
    lower_bounds: list = field(default_factory=list)  # a_i = ||y_i||
    records: list = field(default_factory=list)
    report: Optional[PerturbationReport] = None
    verdicts: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def J(self) -> SetExpr:
        return FiniteSet(frozenset(j for _, j, _ in self.selected))

    @property
    def c1(self) -> Optional[Fraction]:
        return None if self.report is None else self.report.c1

    def failing(self) -> list:
        out = failing(self.records)
        if self.report is not None:
            out += failing(self.report.records)
        return out

    def to_json(self):
        from ..verdict import jsonable

        return {
            "I": jsonable(self.I), "eps": str(self.eps), "schedule": self.schedule.to_json(),
            "m": {str(k): v for k, v in sorted(self.m.items())}, "n": self.n, "picks": self.picks,
            "parity": self.parity,
            "selected": [{"t": t, "j": j, "block": list(b)} for t, j, b in self.selected],
            "perturbations": [str(p) for p in self.perturbations],
            "lowerBounds": [str(a) for a in self.lower_bounds],
            "records": [r.to_json() for r in self.records],
            "perturbationReport": None if self.report is None else self.report.to_json(),
            "verdicts": {k: v.to_json() for k, v in self.verdicts.items()}, "notes": self.notes,
        }


class _Cuts:
    """m(n): the declared support bound plus one when available (the tail is
    then empty), else the least tail cut made nondecreasing along a scan."""

    def __init__(self, seq: SeqGen, schedule: DeltaSchedule, I: SetExpr):
        self.seq, self.schedule, self.I = seq, schedule, I
        self.declared = seq.support_bound(1) is not None
        self._scan_n, self._scan_m = 0, 0
        self.values: dict = {}

    def __call__(self, n: int) -> int:
        if n <= 0:
            return 0
        if n in self.values:
            return self.values[n]
        if self.declared:
            m = max(self.seq.support_bound(n) + 1, tail_cut(self.seq(n), self.schedule(n)))
        else:
            while self._scan_n < n:
                self._scan_n += 1
                j = self._scan_n
                self._scan_m = max(self._scan_m, tail_cut(self.seq(j), self.schedule(j)))
            m = self._scan_m
        self.values[n] = m
        return m


def _next_in(I: SetExpr, lo: int) -> int:
    """Least element of I that is >= lo."""
    if I == ALL_N:
        return lo
    return nth(I, counting(I, lo - 1) + 1)


def extract_basic_subsequence(F: Filter, seq: SeqGen, I: SetExpr = ALL_N, schedule: Optional[DeltaSchedule] = None,
                              horizon: int = DEFAULT_EXTRACT_HORIZON, samples: int = 1000, seed: int = 0,
                              coords=None, max_blocks: int = 64) -> Verdict:
    if seq.is_scalar:
        raise InvalidArgument("extraction needs a vector-valued sequence")
    schedule = schedule or DeltaSchedule.geometric(Fraction(1, 2))
    eps = schedule.eps
    st_I = F.is_stationary(I, horizon)
    if st_I.refuted:
        raise PreconditionError("I is not stationary")
    coord_v = _coordinatewise_precondition(seq, I, schedule(1), horizon, coords)
    norm_upto = _norm_precondition(seq, I, eps, horizon)
    cert = ExtractionCertificate(I, eps, schedule)
    cert.verdicts["stationarity_of_I"] = st_I
    cert.verdicts["coordinatewise"] = coord_v
    cert.notes.append(f"norms checked to exceed eps on I up to {norm_upto}")
    cert.notes.append("a_i = ||y_i|| is only bounded below by eps; no normalisation to a_i >= 1 is made")
    m = _Cuts(seq, schedule, I)
    if not m.declared:
        cert.notes.append("m(n) is the running maximum of the least tail cuts (no declared support bound)")
    reach = seq.reach(horizon)

    # thresholds n_i
    ns = [_next_in(I, 1)]
    empirical = False
    while len(ns) < max_blocks:
        i = len(ns)
        mi = m(ns[-1])
        N = seq.head_decay(mi, schedule(i))
        if N is None:
            empirical = True
            N = _empirical_decay(seq, mi, schedule(i), ns[-1] + 1, reach)
            if N is None:
                break
        nxt = _next_in(I, max(ns[-1] + 1, N))
        if nxt > reach:
            break
        ns.append(nxt)
    if empirical:
        cert.notes.append("head-mass decay thresholds observed at the horizon only (no declared decay)")
    cert.n = ns
    K = len(ns)
    for i, ni in enumerate(ns, 1):
        cert.m[ni] = m(ni)
        v = seq(ni)
        cert.records.append(Ineq(f"tail: sum_(k>={m(ni)}) |x_{ni}(k)| < delta_{ni}", v.tail_mass(m(ni)),
                                 schedule(ni), "<"))
        if i < K:
            nxt = ns[i]
            cert.records.append(Ineq(f"head: sum_(k<={m(ni)}) |x_{nxt}(k)| < delta_{i}",
                                     seq(nxt).head_mass(m(ni)), schedule(i), "<"))
    if K < 4:
        return consistent(horizon, reason="fewer than four blocks fit below the horizon", certificate=cert)

    base = ExplicitBoundaries(ns)
    D = base if I == ALL_N else Derived(I, base, "interval")
    br = block_respecting_check(F, I, D, horizon)
    cert.verdicts["block_respecting"] = br
    if not br.proved or "J" not in br.certificate:
        return consistent(horizon, reason="no block-respecting selector is certified", certificate=cert)
    J = br.certificate["J"]
    bounds = [0] + ns
    for i in range(1, K + 1):
        j = J.pick(i)
        if not bounds[i - 1] < j <= bounds[i] or j not in I:
            raise AssertionError(f"selector left block {i}")
        cert.picks.append(j)

    halves = {2: Image(ArithProgression(2, 2), J), 1: Image(ArithProgression(1, 2), J)}
    sts = {p: F.is_stationary(h, horizon) for p, h in halves.items()}
    cert.verdicts.update({"even_half": sts[2], "odd_half": sts[1]})
    parity = next((p for p in (2, 1) if sts[p].proved), None)
    if parity is None:
        parity = next((p for p in (2, 1) if sts[3 - p].refuted), None)
        if parity is not None:
            cert.notes.append("the other half is not stationary, so this one is (J is stationary)")
    if parity is None:
        return consistent(horizon, reason="neither half of the selector is certified stationary",
                          certificate=cert)
    cert.parity = parity

    ys, blocks = [], []
    for t in range(parity, K + 1, 2):
        j = cert.picks[t - 1]
        lo = m(bounds[t - 2]) if t >= 3 else 0
        hi = m(bounds[t])
        y = seq(j)
        mj = m(j)
        cert.m[j] = mj
        cert.records.append(Ineq(f"tail: sum_(k>={mj}) |x_{j}(k)| < delta_{j}", y.tail_mass(mj), schedule(j), "<"))
        cert.records.append(Ineq(f"m({j}) <= m(n_{t})", mj, hi, "<="))
        if t >= 3:
            cert.records.append(Ineq(f"j_{t} = {j} >= n_{t - 1}", j, bounds[t - 1], ">"))
            cert.records.append(Ineq(f"head: sum_(k<={lo}) |x_{j}(k)| < delta_{t - 2}", y.head_mass(lo),
                                     schedule(t - 2), "<"))
        p = y.norm1() - y.restrict(lo, hi).norm1()
        # with the head and tail records this gives ||y - z|| < delta_(t-2) + delta_j
        cert.records.append(Ineq(f"||y - z|| for j={j} = head + tail", p,
                                 y.head_mass(lo) + y.tail_mass(hi + 1), "=="))
        cert.records.append(Ineq(f"||y - z|| for j={j} <= 2 delta_{max(t - 2, 1)}", p,
                                 2 * schedule(max(t - 2, 1)), "<="))
        cert.selected.append((t, j, (lo, hi)))
        cert.perturbations.append(p)
        cert.lower_bounds.append(y.norm1())
        ys.append(y)
        blocks.append((lo, hi))
    cert.report = perturbation_check(ys, blocks, eps, None, samples, seed)
    bad = cert.failing()
    if bad or cert.report.violations:
        return consistent(horizon, reason="some recorded inequality fails", failing=[r.to_json() for r in bad],
                          certificate=cert)
    return proved(horizon, certificate=cert, kept=len(ys), c1=cert.report.c1)


def _empirical_decay(seq, m, delta, start, reach, window: int = 4096) -> Optional[int]:
    last_bad = None
    top = min(reach, start + window)
    for j in range(start, top + 1):
        if seq(j).head_mass(m) >= delta:
            last_bad = j
    if last_bad == top:
        return None
    return start if last_bad is None else last_bad + 1


# -- the column claim ------------------------------------------------------------------


def triangular_columns():
    """1 | 1 2 | 1 2 3 | ..."""
    r = 1
    while True:
        yield from range(1, r + 1)
        r += 1


@dataclass
class ClaimCertificate:
    eps: Fraction
    schedule: DeltaSchedule
    n: list = field(default_factory=list)
    columns: list = field(default_factory=list)
    m: list = field(default_factory=list)
    s: list = field(default_factory=list)
    blocks: list = field(default_factory=list)
    records: list = field(default_factory=list)
    report: Optional[PerturbationReport] = None
    notes: list = field(default_factory=list)

    @property
    def J(self) -> SetExpr:
        return FiniteSet(frozenset(self.n))

    def rows_per_column(self) -> dict:
        out: dict = {}
        for c in self.columns:
            out[c] = out.get(c, 0) + 1
        return out

    def to_json(self):
        return {"eps": str(self.eps), "schedule": self.schedule.to_json(), "n": self.n, "columns": self.columns,
                "m": self.m, "s": self.s, "blocks": [list(b) for b in self.blocks],
                "rowsPerColumn": {str(k): v for k, v in self.rows_per_column().items()},
                "records": [r.to_json() for r in self.records],
                "perturbationReport": None if self.report is None else self.report.to_json(), "notes": self.notes}


def extract_fd_claim(seq: SeqGen, schedule: Optional[DeltaSchedule] = None, horizon: int = 100_000,
                     samples: int = 1000, seed: int = 0, min_rounds: int = 3) -> Verdict:
    """Pick n_1, n_2, ... from the columns in triangular order with
    sum_{k <= s(i)} |z_{n_{i+1}}(k)| < eps / 2^(i+3), s(i) = max_{k <= i} m(n_k)."""
    if seq.is_scalar:
        raise InvalidArgument("the claim needs a vector-valued sequence")
    schedule = schedule or DeltaSchedule.geometric(Fraction(1, 2))
    eps = schedule.eps
    reach = seq.reach(horizon)
    cert = ClaimCertificate(eps, schedule)
    next_row: dict = {}
    order = triangular_columns()
    s_prev = 0
    i = 0
    for c in order:
        r = next_row.get(c, 1)
        bound = eps / 2 ** (i + 3)  # requirement on index i+1 given s(i)
        chosen = None
        while True:
            n = unpair(r, c)
            if n > reach:
                break
            z = seq(n)
            if i == 0 or z.head_mass(s_prev) < bound:
                chosen = (n, r, z)
                break
            r += 1
        if chosen is None:
            rounds = _full_rounds(len(cert.n))
            if rounds < min_rounds:
                raise PreconditionError(
                    f"no index of column {c} up to {reach} has head mass below {bound}: per-column "
                    "coordinate-wise convergence to 0 fails or is not visible at this horizon", index=c)
            break
        n, r, z = chosen
        next_row[c] = r + 1
        if not z.norm1_sq() > eps * eps:
            raise PreconditionError(f"||z_{n}|| does not exceed eps = {eps}", index=n)
        i += 1
        mn = tail_cut(z, schedule(n))
        if seq.support_bound(n) is not None:
            mn = max(mn, seq.support_bound(n) + 1)
        cert.records.append(Ineq(f"tail: sum_(k>={mn}) |z_{n}(k)| < delta_{n}", z.tail_mass(mn), schedule(n), "<"))
        if i > 1:
            cert.records.append(Ineq(f"head: sum_(k<={s_prev}) |z_{n}(k)| < eps/2^{i + 2}", z.head_mass(s_prev),
                                     bound, "<"))
        cert.n.append(n)
        cert.columns.append(c)
        cert.m.append(mn)
        cert.blocks.append((s_prev, mn))
        s_prev = max(s_prev, mn)
        cert.s.append(s_prev)
    if len(cert.n) < 2:
        raise PreconditionError("the horizon leaves fewer than two indices")
    zs = [seq(n) for n in cert.n]
    for idx, (z, (lo, hi)) in enumerate(zip(zs, cert.blocks), 1):
        p = z.norm1() - z.restrict(lo, hi).norm1()
        cert.records.append(Ineq(f"||z - w|| at i={idx} < eps/4", p, eps / 4, "<"))
    # the perturbations are below eps/4, so the perturbation check runs with eps' = eps/2 < ||z_n||
    cert.report = perturbation_check(zs, cert.blocks, eps / 2, None, samples, seed)
    cert.notes.append(f"{_full_rounds(len(cert.n))} full triangular rounds below the horizon")
    bad = failing(cert.records) + failing(cert.report.records)
    if bad or cert.report.violations:
        return consistent(horizon, reason="some recorded inequality fails", failing=[b.to_json() for b in bad],
                          certificate=cert)
    return proved(horizon, certificate=cert, J=cert.J, columns_met=len(set(cert.columns)), c1=cert.report.c1)


def _full_rounds(count: int) -> int:
    r = 0
    while (r + 1) * (r + 2) // 2 <= count:
        r += 1
    return r


__all__ = ["ExtractionCertificate", "ClaimCertificate", "extract_basic_subsequence", "extract_fd_claim",
           "tail_cut", "triangular_columns"]
