"""Witness and refuter procedures for combinatorial filter properties.

Each check dispatches on the filter kind.  A strategy either certifies its
answer with an argument that holds for every n (plus horizon data an
independent checker can re-verify) or returns Consistent.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from ..errors import InvalidArgument, PreconditionError
from ..setalg import (
    ALL_N,
    ArithProgression,
    Blocking,
    BlockSelector,
    ColumnSet,
    ColumnSplit,
    Derived,
    Difference,
    Dyadic,
    Embed,
    EventuallyPeriodic,
    FiniteSet,
    Image,
    Intersection,
    Pullback,
    RowRule,
    SetExpr,
    colview,
    counting,
    dense_lower,
    iter_elements,
    log_bound,
    normalize,
    standard_structure,
    transport,
)
from ..setalg.pairing import pair, unpair
from ..verdict import Verdict, consistent, proved, refuted
from .chains import INF, BaseChain
from .handles import (
    DEFAULT_HORIZON,
    ColumnFD,
    ColumnFd,
    CountableBase,
    Filter,
    Frechet,
    Statistical,
    Sum,
    Trace,
)

# budget for greedy witness searches (candidates examined)
SEARCH_BUDGET = 5_000_000


def is_subset(a: SetExpr, b: SetExpr) -> Optional[bool]:
    d = Difference(a, b)
    e = normalize(d)
    if e is not None:
        return e.is_empty()
    v = colview(d)
    if v is not None:
        return v.nonempty_columns().is_empty()
    return None


def _same_set(a: SetExpr, b: SetExpr) -> bool:
    if a == b:
        return True
    x, y = normalize(a), normalize(b)
    return x is not None and y is not None and x.minimized() == y.minimized()


def blocking_for(I: SetExpr, D: Blocking) -> Blocking:
    """D itself when it partitions I, else D carried onto I by ranks."""
    ground = getattr(D, "ground", None)
    if ground is None or _same_set(ground, I):
        return D
    return Derived(I, D, "rank")


def _picks_table(J: BlockSelector, D: Blocking, horizon: int, keep: int = 64):
    k = D.pieces_meeting(horizon)
    picks = [J.pick(i) for i in range(1, k + 1)]
    return {"pieces_checked": k, "first_picks": picks[:keep], "last_pick": picks[-1] if picks else None}


# -- block-respecting -----------------------------------------------------------------


def block_respecting_check(F: Filter, I: SetExpr = ALL_N, D: Optional[Blocking] = None,
                           horizon: int = DEFAULT_HORIZON) -> Verdict:
    """Is there a stationary J ⊆ I meeting every piece of D exactly once?"""
    D = blocking_for(I, D or Dyadic())
    st = F.is_stationary(I, horizon)
    if st.refuted:
        raise PreconditionError("the blocked set is not stationary")
    return _block_respecting(F, I, D, horizon, st)


def _block_respecting(F, I, D, horizon, st) -> Verdict:
    if isinstance(F, CountableBase):
        if F.ground == ALL_N:
            J = BlockSelector(D, "min")
            arg = "one point in each of infinitely many pieces gives an infinite set"
            return proved(horizon, strategy="min-selector", J=J, blocking=D, argument=arg,
                          picks=_picks_table(J, D, horizon))
        J = BlockSelector(D, "route", route_set=F.ground)
        arg = "I meets the ground infinitely; the selector picks inside the ground whenever the piece allows"
        data = dict(strategy="route-to-ground", J=J, blocking=D, argument=arg, picks=_picks_table(J, D, horizon),
                    stationarity_of_I=st)
        return proved(horizon, **data) if st.proved else consistent(horizon, **data)

    if isinstance(F, Statistical):
        J = BlockSelector(D, "min")
        if D.growth == "log":
            k = D.pieces_meeting(horizon)
            cnt = counting(J, horizon)
            return refuted(
                horizon,
                strategy="log-growth",
                argument=("a set with at most one point per piece has at most as many points in [1, n] "
                          "as there are pieces meeting [1, n], which is O(log n); so its density is 0 "
                          "and its complement is a member"),
                blocking=D,
                pieces_meeting_horizon=k,
                log_bound_horizon=log_bound(horizon),
                min_selector=J,
                min_selector_count=cnt,
                density_bound=Fraction(k, horizon),
                min_selector_density_bound=Fraction(cnt, horizon),
            )
        if isinstance(D.growth, int):
            low = dense_lower(I)
            if low is not None:
                return proved(
                    horizon,
                    strategy="bounded-pieces",
                    argument="pieces hold at most s points, so the min-selector keeps 1/s of I's density",
                    J=J, blocking=D, max_piece=D.growth, lower_density_I=low,
                    lower_density_J=low / D.growth, picks=_picks_table(J, D, horizon),
                )
        cnt = counting(J, horizon)
        return consistent(horizon, strategy=None, min_selector_count=cnt,
                          density_estimate=Fraction(cnt, horizon))

    if isinstance(F, ColumnFD):
        v = colview(I)
        if v is None:
            return consistent(horizon, note="I is outside the column fragment")
        M = v.infinite_columns()
        J = BlockSelector(D, "route", route_cols=EventuallyPeriodic.of(M))
        per_col = _column_counts(J, D, horizon)
        arg = ("targets cycle through the infinite columns of I in triangular order and each target "
               "is served, so every such column receives infinitely many picks")
        return proved(horizon, strategy="route-triangular", J=J, blocking=D, argument=arg,
                      infinite_columns=M, picks_per_column=per_col, picks=_picks_table(J, D, horizon))

    if isinstance(F, ColumnFd):
        v = colview(I)
        if v is None:
            return consistent(horizon, note="I is outside the column fragment")
        c = v.infinite_columns().nth(1)
        J = BlockSelector(D, "route", route_set=ColumnSet(FiniteSet({c})))
        arg = f"column {c} meets I infinitely; routing into it yields infinitely many picks there"
        return proved(horizon, strategy="route-single-column", J=J, blocking=D, column=c, argument=arg,
                      picks=_picks_table(J, D, horizon))

    if isinstance(F, Trace):
        if is_subset(I, F.I):
            inner = _block_respecting(F.parent, I, D, horizon, st)
            return Verdict(inner.status, {"strategy": "trace-delegation", "inner": inner}, horizon)
        return consistent(horizon, note="blocked set is not inside the trace set")

    if isinstance(F, Sum):
        for name, Fi, Ni in (("N1", F.F1, F.N1), ("N2", F.F2, F.N2)):
            if is_subset(I, Ni):
                Ii = Pullback(I, Ni)
                Di = transport(D, Ni)
                sti = Fi.is_stationary(Ii, horizon)
                if sti.refuted:
                    raise PreconditionError(f"the blocked set is not stationary inside {name}")
                inner = _block_respecting(Fi, Ii, Di, horizon, sti)
                cert = {"strategy": "sum-delegation", "part": name, "inner": inner}
                if inner.proved:
                    cert["J"] = Image(inner.certificate["J"], Ni)
                return Verdict(inner.status, cert, horizon)
        return consistent(horizon, note="blocked set meets both parts; no strategy")

    return consistent(horizon, note=f"no block-respecting strategy for {F.kind}")


def _column_counts(J: SetExpr, D: Blocking, horizon: int, cols: int = 8):
    counts = {}
    for n in J.mask(horizon).nonzero()[0] + 1:
        c = pair(int(n))[1]
        if c <= cols:
            counts[c] = counts.get(c, 0) + 1
    return counts


# -- diagonal and strongly diagonal -------------------------------------------------------


def _check_chain(F: Filter, chain: BaseChain, horizon: int, sample: int = 16):
    chain.check_decreasing()
    verdicts = {}
    for n in sorted({1, 2, 3, 5, 8, sample, min(horizon, 1000)}):
        v = F.contains(chain(n), horizon)
        if v.refuted:
            raise PreconditionError(f"A_{n} is not a member of the filter", index=n)
        verdicts[n] = v
    return all(v.proved for v in verdicts.values()), verdicts


def diagonal_check(F: Filter, chain: BaseChain, I: SetExpr = ALL_N, horizon: int = DEFAULT_HORIZON) -> Verdict:
    """Is there a stationary J ⊆ I with J \\ A_n finite for every n?"""
    members_ok, _ = _check_chain(F, chain, horizon)
    st = F.is_stationary(I, horizon)
    if st.refuted:
        raise PreconditionError("I is not stationary")

    if isinstance(F, ColumnFD) and chain.tag == "fd_tails":
        return refuted(
            horizon,
            strategy="column-tails",
            argument=("if J \\ A_n is finite for every n then J ∩ D_c ⊆ J \\ A_(c+1) is finite for every "
                      "column c, so no column meets J infinitely and J is not stationary"),
            chain=chain.to_json(),
        )
    if type(F) is Frechet:
        data = dict(strategy="whole-set", J=I, argument="members of the Fréchet filter are cofinite",
                    stationarity=st)
        return proved(horizon, **data) if st.proved and members_ok else consistent(horizon, **data)
    if isinstance(F, (CountableBase, ColumnFd)):
        w = strongly_diagonal_witness(F, chain, I, horizon)
        return Verdict(w.status, {"strategy": "strongly-diagonal", "witness": w}, horizon)
    return consistent(horizon, note=f"no diagonal strategy for {F.kind}")


def _candidates(F: Filter, I: SetExpr):
    """Increasing stream of points J may use, and the reason J is stationary."""
    if isinstance(F, CountableBase):
        G = I if F.ground == ALL_N else Intersection([I, F.ground])
        return iter_elements(G), "J is an infinite subset of the ground"
    v = colview(I)
    if v is None:
        return None, None
    inf = v.infinite_columns()
    if inf.is_empty():
        return None, None
    c = inf.nth(1)
    rows = v.rows(c)
    return (unpair(r, c) for r in rows.iter_elements()), f"J is an infinite subset of column {c}"


def strongly_diagonal_witness(F: Filter, chain: BaseChain, I: SetExpr = ALL_N,
                              horizon: int = DEFAULT_HORIZON, min_picks: int = 100) -> Verdict:
    """Greedy J ⊆ I meeting each layer A_n \\ A_(n+1) at most once, with layers
    strictly increasing, until layer ``horizon`` is passed."""
    if not isinstance(F, (CountableBase, ColumnFd)):
        return consistent(horizon, note=f"no strongly diagonal strategy for {F.kind}")
    members_ok, _ = _check_chain(F, chain, horizon)
    st = F.is_stationary(I, horizon)
    if st.refuted:
        raise PreconditionError("I is not stationary")
    stream, why = _candidates(F, I)
    if stream is None:
        return consistent(horizon, note="I is outside the supported fragment")

    picks, layers = [], []
    last = 0
    examined = 0
    constant = chain.tag == "constant"
    for j in stream:
        examined += 1
        if examined > SEARCH_BUDGET:
            break
        L = chain.layer(j)
        if L == 0:
            continue
        if L == INF or L > last:
            picks.append(j)
            layers.append(L)
            if L != INF:
                last = L
        if len(picks) >= min_picks and (last >= horizon or constant):
            break
    done = len(picks) >= min_picks and (last >= horizon or constant)
    data = dict(
        strategy="greedy-layers",
        argument=("every A_n contains all but finitely many candidates, so layers are unbounded and the "
                  "greedy choice never stops; " + why),
        chain=chain.to_json(),
        J_prefix=picks,
        layers=["inf" if L == INF else L for L in layers],
        last_layer=last,
        base_sets_met=(picks[-1] - 1) if picks and isinstance(F, CountableBase) else None,
    )
    if done and members_ok and st.proved:
        return proved(horizon, **data)
    data["note"] = "partial witness" if not done else "chain membership or stationarity not certified"
    return consistent(horizon, **data)


# -- splitting -----------------------------------------------------------------


@dataclass
class Split:
    I1: SetExpr
    I2: SetExpr
    verdicts: tuple

    def to_json(self):
        from ..verdict import jsonable

        return {"I1": jsonable(self.I1), "I2": jsonable(self.I2),
                "verdicts": [v.to_json() for v in self.verdicts]}


def split_stationary(F: Filter, I: SetExpr, horizon: int = DEFAULT_HORIZON) -> Split:
    """Two disjoint stationary sets with union I."""
    st = F.is_stationary(I, horizon)
    if st.refuted:
        raise PreconditionError("I is not stationary")

    def both(rule, argument):
        cert = {"rule": rule, "argument": argument, "stationarity_of_I": st}
        return tuple(Verdict(st.status, cert, horizon) for _ in range(2))

    if isinstance(F, (ColumnFD, ColumnFd)):
        I1, I2 = ColumnSplit(I, 1), ColumnSplit(I, 0)
        return Split(I1, I2, (F.is_stationary(I1, horizon), F.is_stationary(I2, horizon)))
    if isinstance(F, CountableBase):
        G = I if F.ground == ALL_N else Intersection([I, F.ground])
        I1 = Image(ArithProgression(1, 2), G)
        return Split(I1, Difference(I, I1), both(
            "alternate-by-enumeration", "halves of an infinite part of the ground are infinite"))
    if isinstance(F, Statistical):
        I1, I2 = Image(ArithProgression(1, 2), I), Image(ArithProgression(2, 2), I)
        return Split(I1, I2, both(
            "alternate-by-enumeration",
            "each half holds at least half of the points of I below n, minus one, so keeps half its upper density"))
    if isinstance(F, Trace):
        inner = split_stationary(F.parent, Intersection([I, F.I]), horizon)
        return Split(inner.I1, Difference(I, inner.I1), inner.verdicts)
    if isinstance(F, Sum):
        for Fi, Ni in ((F.F1, F.N1), (F.F2, F.N2)):
            Ii = Pullback(I, Ni)
            if Fi.is_stationary(Ii, horizon).proved:
                inner = split_stationary(Fi, Ii, horizon)
                I1 = Image(inner.I1, Ni)
                return Split(I1, Difference(I, I1), inner.verdicts)
    I1 = Image(ArithProgression(1, 2), I)
    note = {"note": f"no splitting strategy for {F.kind}"}
    return Split(I1, Difference(I, I1), (consistent(horizon, **note), consistent(horizon, **note)))


# -- standard embedding ------------------------------------------------------------------


@dataclass
class StandardEmbedding:
    """Order-preserving bijection s of N onto a standard set J: the m-th column
    goes onto J's part in the m-th column that J meets infinitely."""

    target: SetExpr
    cols: object  # EP of the columns J meets infinitely

    def __call__(self, n: int) -> int:
        r, m = pair(n)
        c = self.cols.nth(m)
        rows = colview(self.target).rows(c)
        return unpair(rows.nth(r), c)

    def image(self, B: SetExpr) -> SetExpr:
        return Embed(B, self.target)

    def to_json(self):
        from ..verdict import jsonable

        return {"target": jsonable(self.target), "columns": jsonable(self.cols),
                "sample": {n: self(n) for n in range(1, 11)}}


def _sample_base_sets(rng: random.Random, count: int):
    """B_{m,C} members and column-deficient non-members."""
    out = []
    for i in range(count):
        m = rng.randint(1, 6)
        exc = frozenset((rng.randint(m, m + 4), rng.randint(1, 5)) for _ in range(rng.randint(0, 4)))
        if i % 2 == 0:
            out.append(ColumnSet(ArithProgression(m, 1), RowRule("cofinite", drop=rng.randint(0, 3)), exc))
        else:
            step = rng.randint(2, 3)
            out.append(ColumnSet(ArithProgression(m, 1), RowRule("subsample", first=1, step=step), exc))
    return out


def standard_embedding(F: ColumnFD, J: SetExpr, samples: int = 20, horizon: int = 10_000, seed: int = 0):
    """The embedding of N onto the standard set J with the check that base sets
    B are members exactly when their images are members of the trace on J."""
    if not isinstance(F, ColumnFD):
        raise InvalidArgument("standard embeddings are defined for the column filter F_D")
    st = standard_structure(J)  # raises InvalidArgument when J is not standard
    emb = StandardEmbedding(J, st.cols)
    T = Trace(F, J)
    rng = random.Random(seed)
    rows = []
    agree = True
    for B in _sample_base_sets(rng, samples):
        a = F.contains(B, horizon)
        b = T.contains(emb.image(B), horizon)
        ok = a.status == b.status
        agree = agree and ok
        rows.append({"set": B, "in_F": a.status, "image_in_trace": b.status, "agree": ok})
    # spot-check the map itself: order preserving and onto J near the start
    vals = [emb(n) for n in range(1, 200)]
    in_target = all(v in J for v in vals)
    verdict = (proved if agree and in_target else refuted)(horizon, checks=rows, map_in_target=in_target)
    return emb, verdict
