"""Concrete filters on N with membership and stationarity decisions.

A set is stationary for F when it meets every member of F, which is the same
as its complement not belonging to F.  All filters here are free: cofinite
sets are members and finite sets are not.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import InvalidArgument, InvalidTrace
from ..setalg import (
    ALL_N,
    ColumnSet,
    ColumnPartition,
    COLUMNS,
    Complement,
    Difference,
    EventuallyPeriodic,
    Intersection,
    Pullback,
    SetExpr,
    Union,
    colview,
    complement_of,
    counting,
    dense_lower,
    is_infinite,
    normalize,
    set_from_json,
    set_to_json,
    sparse_bound,
)
from ..verdict import Verdict, all_of, any_of, consistent, proved, refuted

DEFAULT_HORIZON = 1 << 16
# horizon evidence is gathered by scanning masks; keep it bounded
EVIDENCE_CAP = int(os.environ.get("FILTERLAB_EVIDENCE_CAP", 1 << 20))


def _evidence(X: SetExpr, horizon: int) -> dict:
    """Counts of the complement X near the horizon, for Consistent verdicts."""
    cap = max(2, min(horizon, EVIDENCE_CAP))
    m = X.mask(cap)
    full = int(np.count_nonzero(m))
    upper_half = int(np.count_nonzero(m[cap // 2:]))
    return {"checked_upto": cap, "complement_count": full, "complement_count_upper_half": upper_half}


class Filter:
    kind = "filter"

    # -- entry points ---------------------------------------------------------

    def contains(self, A: SetExpr, horizon: int = DEFAULT_HORIZON) -> Verdict:
        e = normalize(A)
        if e is not None and e.is_empty():
            return refuted(horizon, rule="empty-set")
        if e is not None and e.is_cofinite():
            return proved(horizon, rule="cofinite", missing=e.complement().elements())
        v = self._contains(A, horizon)
        if v.consistent:
            s = self._structural(A, horizon)
            if s is not None and not s.consistent:
                return s
        return v

    def is_stationary(self, A: SetExpr, horizon: int = DEFAULT_HORIZON) -> Verdict:
        return self._stationary(A, horizon)

    # -- per-kind hooks -------------------------------------------------------

    def _contains(self, A, horizon) -> Verdict:  # pragma: no cover - abstract
        raise NotImplementedError

    def _stationary(self, A, horizon) -> Verdict:
        return self.contains(complement_of(A), horizon).negated(rule="complement-not-member")

    def _structural(self, A, horizon):
        # rules that hold in every filter
        if isinstance(A, Union):
            parts = [self.contains(a, horizon) for a in A.args]
            for a, v in zip(A.args, parts):
                if v.proved:
                    return proved(horizon, rule="superset-of-member", member=a, because=v)
            return None
        if isinstance(A, Intersection):
            return all_of({str(i): self.contains(a, horizon) for i, a in enumerate(A.args)}, horizon)
        if isinstance(A, Difference):
            return self._structural(Intersection([A.a, complement_of(A.b)]), horizon)
        return None

    def to_json(self):  # pragma: no cover - abstract
        raise NotImplementedError

    # convenience
    def trace(self, I: SetExpr) -> "Trace":
        return Trace(self, I)


@dataclass(frozen=True)
class CountableBase(Filter):
    """The filter generated by the tails G \\ [1, k] of an infinite set G."""

    ground: SetExpr = ALL_N
    kind = "countableBase"

    def __post_init__(self):
        if is_infinite(self.ground) is False:
            raise InvalidArgument("countable base needs an infinite ground set")

    def base(self, k: int) -> SetExpr:
        return Difference(self.ground, EventuallyPeriodic("1" * k, "0"))

    def _contains(self, A, horizon):
        X = Intersection([self.ground, complement_of(A)]) if self.ground != ALL_N else complement_of(A)
        inf = is_infinite(X)
        if inf is False:
            e = normalize(X)
            return proved(horizon, rule="complement-finite", complement=X,
                          elements=None if e is None else e.elements())
        if inf is True:
            return refuted(horizon, rule="complement-infinite", complement=X)
        return consistent(horizon, **_evidence(X, horizon))

    def to_json(self):
        return {"kind": "countableBase", "base": "tails", "ground": set_to_json(self.ground)}


@dataclass(frozen=True)
class Frechet(CountableBase):
    kind = "frechet"

    def to_json(self):
        return {"kind": "frechet"}


@dataclass(frozen=True)
class Statistical(Filter):
    """Complements of density-zero sets."""

    kind = "statistical"

    def _contains(self, A, horizon):
        X = complement_of(A)
        e = normalize(X)
        if e is not None:
            d = e.density()
            if d == 0:
                return proved(horizon, rule="complement-density", density=d, complement=X)
            return refuted(horizon, rule="complement-density", density=d, complement=X)
        b = sparse_bound(X)
        if b is not None:
            return proved(horizon, rule="complement-sparse", complement=X, bound=b,
                          count_at_horizon=counting(X, horizon))
        low = dense_lower(X)
        if low is not None:
            return refuted(horizon, rule="complement-dense", complement=X, lower_density=low)
        ev = _evidence(X, horizon)
        ev["density_estimate"] = Fraction(ev["complement_count"], ev["checked_upto"])
        return consistent(horizon, **ev)

    def to_json(self):
        return {"kind": "statistical"}


@dataclass(frozen=True)
class _ColumnFilter(Filter):
    columns: ColumnPartition = COLUMNS

    def _deleted(self, v, cols, horizon):
        # sample of the finite per-column deletions C_n = D_n \ A
        out = {}
        for c in cols:
            rows = v.rows(c).complement()
            out[c] = [r for r in rows.elements()] if rows.is_finite() else None
        return out

    def _view(self, A):
        return colview(A)


@dataclass(frozen=True)
class ColumnFD(_ColumnFilter):
    """Generated by B_{m,C}: the union over columns n >= m of D_n minus a finite C_n."""

    kind = "columnFD"

    def _contains(self, A, horizon):
        v = self._view(A)
        if v is None:
            return consistent(horizon, **_evidence(complement_of(A), horizon))
        bad = v.coinfinite_columns()
        if bad.is_finite():
            bad_cols = bad.elements()
            m = (max(bad_cols) if bad_cols else 0) + 1
            sample = range(m, m + max(v.bound, 1) + v.period)
            return proved(horizon, rule="base-containment", m=m, exceptional_columns=bad_cols,
                          deletions=self._deleted(v, sample, horizon))
        return refuted(horizon, rule="infinitely-many-columns-missed", columns=bad,
                       first_columns=[bad.nth(k) for k in range(1, 6)])

    def _stationary(self, A, horizon):
        v = self._view(A)
        if v is None:
            return consistent(horizon, **_evidence(A, horizon))
        inf = v.infinite_columns()
        if inf.is_finite():
            return refuted(horizon, rule="finitely-many-infinite-columns", infinite_columns=inf.elements())
        return proved(horizon, rule="infinitely-many-infinite-columns", infinite_columns=inf,
                      first_columns=[inf.nth(k) for k in range(1, 6)])

    def to_json(self):
        return {"kind": "columnFD", "pairing": self.columns.pairing}


@dataclass(frozen=True)
class ColumnFd(_ColumnFilter):
    """Generated by B_C: every column D_n minus a finite C_n."""

    kind = "columnFd"

    def _contains(self, A, horizon):
        v = self._view(A)
        if v is None:
            return consistent(horizon, **_evidence(complement_of(A), horizon))
        bad = v.coinfinite_columns()
        if bad.is_empty():
            sample = range(1, max(v.bound, 1) + v.period + 1)
            return proved(horizon, rule="base-containment", deletions=self._deleted(v, sample, horizon))
        return refuted(horizon, rule="column-missed-infinitely", column=bad.nth(1))

    def _stationary(self, A, horizon):
        v = self._view(A)
        if v is None:
            return consistent(horizon, **_evidence(A, horizon))
        inf = v.infinite_columns()
        if inf.is_empty():
            return refuted(horizon, rule="every-column-met-finitely")
        return proved(horizon, rule="column-met-infinitely", column=inf.nth(1))

    def to_json(self):
        return {"kind": "columnFd", "pairing": self.columns.pairing}


@dataclass(frozen=True)
class Trace(Filter):
    """The filter generated by {A ∩ I : A in parent}."""

    parent: Filter
    I: SetExpr
    kind = "trace"

    def __post_init__(self):
        v = self.parent.is_stationary(self.I, DEFAULT_HORIZON)
        if v.refuted:
            raise InvalidTrace("trace set is not stationary for the parent filter")

    def _contains(self, A, horizon):
        return self.parent.contains(Union([A, complement_of(self.I)]), horizon)

    def _stationary(self, A, horizon):
        return self.parent.is_stationary(Intersection([A, self.I]), horizon)

    def to_json(self):
        return {"kind": "trace", "parent": self.parent.to_json(), "I": set_to_json(self.I)}


def _disjoint(N1: SetExpr, N2: SetExpr, upto: int = 10_000) -> bool:
    a, b = normalize(N1), normalize(N2)
    if a is not None and b is not None:
        return a.intersection(b).is_empty()
    return not np.any(N1.mask(upto) & N2.mask(upto))


@dataclass(frozen=True)
class Sum(Filter):
    """F1 on N1 plus F2 on N2: A is a member iff its trace on each part is.
    Each F_i lives on N and is carried to N_i by the increasing enumeration."""

    F1: Filter
    N1: SetExpr
    F2: Filter
    N2: SetExpr
    kind = "sum"

    def __post_init__(self):
        for N in (self.N1, self.N2):
            if is_infinite(N) is False:
                raise InvalidArgument("sum parts must be infinite")
        if not _disjoint(self.N1, self.N2):
            raise InvalidArgument("sum parts must be disjoint")

    def _contains(self, A, horizon):
        return all_of({"N1": self.F1.contains(Pullback(A, self.N1), horizon),
                       "N2": self.F2.contains(Pullback(A, self.N2), horizon)}, horizon)

    def _stationary(self, A, horizon):
        return any_of({"N1": self.F1.is_stationary(Pullback(A, self.N1), horizon),
                       "N2": self.F2.is_stationary(Pullback(A, self.N2), horizon)}, horizon)

    def to_json(self):
        return {"kind": "sum", "F1": self.F1.to_json(), "N1": set_to_json(self.N1),
                "F2": self.F2.to_json(), "N2": set_to_json(self.N2)}


def rectangle_sides(A: SetExpr):
    """(rows, cols) when A is a pairing rectangle up to finitely many points."""
    if isinstance(A, ColumnSet):
        return EventuallyPeriodic.of(A.rule.ep()), A.cols
    return None


@dataclass(frozen=True)
class Product(Filter):
    """Generated by rectangles A1 x A2 under the diagonal pairing (rows from F1,
    columns from F2).  Decided for rectangle arguments only."""

    F1: Filter
    F2: Filter
    kind = "product"

    def _contains(self, A, horizon):
        sides = rectangle_sides(A)
        if sides is None:
            return consistent(horizon, note="membership is decided for rectangles only")
        # removing finitely many points keeps a rectangle over free factors inside the filter
        rows, cols = sides
        return all_of({"rows": self.F1.contains(rows, horizon), "cols": self.F2.contains(cols, horizon)}, horizon)

    def _stationary(self, A, horizon):
        sides = rectangle_sides(A)
        if sides is None or A.exceptions:
            return consistent(horizon, note="stationarity is decided for rectangles only")
        rows, cols = sides
        return all_of({"rows": self.F1.is_stationary(rows, horizon),
                       "cols": self.F2.is_stationary(cols, horizon)}, horizon)

    def to_json(self):
        return {"kind": "product", "F1": self.F1.to_json(), "F2": self.F2.to_json()}


# -- constructors ------------------------------------------------------------------


def contains(F: Filter, A: SetExpr, horizon: int = DEFAULT_HORIZON) -> Verdict:
    return F.contains(A, horizon)


def is_stationary(F: Filter, A: SetExpr, horizon: int = DEFAULT_HORIZON) -> Verdict:
    return F.is_stationary(A, horizon)


def trace(F: Filter, I: SetExpr) -> Trace:
    return Trace(F, I)


def sum_filter(F1: Filter, N1: SetExpr, F2: Filter, N2: SetExpr) -> Sum:
    return Sum(F1, N1, F2, N2)


def product(F1: Filter, F2: Filter) -> Product:
    return Product(F1, F2)


NAMED = {
    "frechet": Frechet,
    "statistical": Statistical,
    "columnFD": ColumnFD,
    "columnFd": ColumnFd,
}


def filter_from_json(d, where: str = "$") -> Filter:
    if isinstance(d, str):
        d = {"kind": d}
    if not isinstance(d, dict) or "kind" not in d:
        raise InvalidArgument(f"{where}: filter definition needs a 'kind'")
    kind = d["kind"]
    if kind in ("frechet", "statistical"):
        return NAMED[kind]()
    if kind in ("columnFD", "columnFd"):
        if d.get("pairing", "cantor-diagonal") != "cantor-diagonal":
            raise InvalidArgument(f"{where}.pairing: only the cantor-diagonal pairing is supported")
        return NAMED[kind]()
    if kind == "countableBase":
        base = d.get("base", "tails")
        if base == "tails":
            ground = set_from_json(d["ground"], where + ".ground") if "ground" in d else ALL_N
            return CountableBase(ground)
        if isinstance(base, list) and base:
            sets = [set_from_json(b, f"{where}.base[{i}]") for i, b in enumerate(base)]
            for i in range(1, len(sets)):
                extra = Difference(sets[i], sets[i - 1])
                if is_infinite(extra) is True or counting(extra, 10_000) > 0:
                    raise InvalidArgument(f"{where}.base[{i}]: base sets must decrease")
            return CountableBase(sets[-1])
        raise InvalidArgument(f"{where}.base: expected 'tails' or a list of sets")
    if kind == "trace":
        return Trace(filter_from_json(d.get("parent"), where + ".parent"),
                     set_from_json(d.get("I"), where + ".I"))
    if kind == "sum":
        return Sum(filter_from_json(d.get("F1"), where + ".F1"), set_from_json(d.get("N1"), where + ".N1"),
                   filter_from_json(d.get("F2"), where + ".F2"), set_from_json(d.get("N2"), where + ".N2"))
    if kind == "product":
        return Product(filter_from_json(d.get("F1"), where + ".F1"), filter_from_json(d.get("F2"), where + ".F2"))
    raise InvalidArgument(f"{where}.kind: unknown filter kind {kind!r}")
