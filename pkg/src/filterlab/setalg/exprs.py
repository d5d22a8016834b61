"""Finitely describable subsets of N and their structural evaluation.

Every node is an immutable dataclass; membership is decided by structural
recursion.  Nodes that admit an eventually periodic normal form are reduced
by :func:`normalize`, which the counting and density code rely on.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Optional

import numpy as np

from .ep import ALL, EMPTY, EP, ep_finite, ep_progression
from .pairing import pair, pair_arrays, unpair


class SetExpr:
    """Base class.  Subclasses implement ``member``; ``mask`` may be vectorised."""

    def member(self, n: int) -> bool:  # pragma: no cover - abstract
        raise NotImplementedError

    def __contains__(self, n: int) -> bool:
        return n >= 1 and self.member(n)

    def mask(self, n: int) -> np.ndarray:
        return np.fromiter((self.member(k) for k in range(1, n + 1)), dtype=bool, count=n)

    def __or__(self, other):
        return Union((self, other))

    def __and__(self, other):
        return Intersection((self, other))

    def __sub__(self, other):
        return Difference(self, other)

    def __invert__(self):
        return Complement(self)


# -- generators -----------------------------------------------------------------


@dataclass(frozen=True)
class FiniteSet(SetExpr):
    elems: frozenset

    def __init__(self, elems=()):
        object.__setattr__(self, "elems", frozenset(int(e) for e in elems))

    def member(self, n):
        return n in self.elems

    def mask(self, n):
        out = np.zeros(n, dtype=bool)
        idx = [e - 1 for e in self.elems if 1 <= e <= n]
        out[idx] = True
        return out


@dataclass(frozen=True)
class ArithProgression(SetExpr):
    """{first + k*step : k >= 0} restricted to N."""

    first: int
    step: int

    def __post_init__(self):
        if self.step < 1:
            raise ValueError("step must be a positive natural")

    def member(self, n):
        return n >= self.first and (n - self.first) % self.step == 0

    def mask(self, n):
        idx = np.arange(1, n + 1, dtype=np.int64)
        return (idx >= self.first) & ((idx - self.first) % self.step == 0)


@dataclass(frozen=True)
class EventuallyPeriodic(SetExpr):
    prefix: str
    period: str

    def __post_init__(self):
        EP(self.prefix, self.period)  # validation

    @property
    def ep(self) -> EP:
        return EP(self.prefix, self.period)

    @classmethod
    def of(cls, ep: EP) -> "EventuallyPeriodic":
        return cls(ep.prefix, ep.period)

    def member(self, n):
        return self.ep.bit(n)

    def mask(self, n):
        return self.ep.mask(n)


def _iroot(x: int, e: int) -> int:
    """Largest r >= 0 with r**e <= x."""
    if x < 0:
        raise ValueError("negative radicand")
    if x < 2:
        return x
    r = int(round(x ** (1.0 / e)))
    while r ** e > x:
        r -= 1
    while (r + 1) ** e <= x:
        r += 1
    return r


@dataclass(frozen=True)
class Powers(SetExpr):
    """{coeff * k**exponent + offset : k >= 1}; exponent 2 gives the squares."""

    exponent: int = 2
    coeff: int = 1
    offset: int = 0

    def __post_init__(self):
        if self.exponent < 1 or self.coeff < 1 or self.offset < 0:
            raise ValueError("exponent and coeff must be positive, offset non-negative")

    def count(self, n: int) -> int:
        x = n - self.offset
        if x < self.coeff:
            return 0
        return _iroot(x // self.coeff, self.exponent)

    def member(self, n):
        x = n - self.offset
        if x < self.coeff or x % self.coeff:
            return False
        r = _iroot(x // self.coeff, self.exponent)
        return r ** self.exponent == x // self.coeff

    def mask(self, n):
        out = np.zeros(n, dtype=bool)
        vals = [self.coeff * k ** self.exponent + self.offset for k in range(1, self.count(n) + 1)]
        if vals:
            out[np.array(vals, dtype=np.int64) - 1] = True
        return out


@dataclass(frozen=True)
class RowRule:
    """Which rows of a selected column belong to a ColumnSet.

    kinds: ``cofinite`` (all rows after the first ``drop``), ``finite`` (the
    listed rows), ``subsample`` (rows first, first+step, ...), ``rows`` (rows in
    a normalisable SetExpr, used for product rectangles).
    """

    kind: str = "cofinite"
    drop: int = 0
    rows: tuple = ()
    first: int = 1
    step: int = 1
    expr: Optional[SetExpr] = None

    def __post_init__(self):
        if self.kind not in ("cofinite", "finite", "subsample", "rows"):
            raise ValueError(f"unknown row rule {self.kind!r}")
        if self.kind == "rows" and (self.expr is None or normalize(self.expr) is None):
            raise ValueError("row rule 'rows' needs an eventually periodic SetExpr")

    def ep(self) -> EP:
        if self.kind == "cofinite":
            return EP("0" * self.drop, "1").minimized()
        if self.kind == "finite":
            return ep_finite(self.rows)
        if self.kind == "subsample":
            return ep_progression(self.first, self.step)
        return normalize(self.expr)


@dataclass(frozen=True)
class ColumnSet(SetExpr):
    """Union over the columns c in ``cols`` of the rows chosen by ``rule``,
    minus the finitely many (col, row) ``exceptions``."""

    cols: SetExpr
    rule: RowRule = RowRule()
    exceptions: frozenset = frozenset()

    def __post_init__(self):
        if normalize(self.cols) is None:
            raise ValueError("column selector must be eventually periodic")
        object.__setattr__(self, "exceptions", frozenset((int(c), int(r)) for c, r in self.exceptions))

    def member(self, n):
        r, c = pair(n)
        return c in self.cols and self.rule.ep().bit(r) and (c, r) not in self.exceptions

    def mask(self, n):
        if n == 0:
            return np.zeros(0, dtype=bool)
        rows, cols = pair_arrays(n)
        colmask = normalize(self.cols).mask(int(cols.max()))
        rowmask = self.rule.ep().mask(int(rows.max()))
        out = colmask[cols - 1] & rowmask[rows - 1]
        for c, r in self.exceptions:
            m = unpair(r, c)
            if m <= n:
                out[m - 1] = False
        return out


@dataclass(frozen=True)
class BlockSelector(SetExpr):
    """One element from each piece of a blocking.

    ``choice`` is ``min``, ``max`` or ``route``.  A routed selector prefers, in
    each piece, an element of its current target (a column or a fixed set); the
    column targets cycle through ``route_cols`` in triangular order 1; 1,2;
    1,2,3; ... and advance only when served, so every target column receives
    infinitely many picks whenever it meets infinitely many pieces.
    """

    blocking: object
    choice: str = "min"
    route_cols: Optional[SetExpr] = None
    route_set: Optional[SetExpr] = None
    _memo: dict = field(default_factory=dict, compare=False, hash=False, repr=False)
    _lock: object = field(default_factory=threading.Lock, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if self.choice not in ("min", "max", "route"):
            raise ValueError(f"unknown choice rule {self.choice!r}")
        if self.choice == "route" and (self.route_cols is None) == (self.route_set is None):
            raise ValueError("route selector needs exactly one of route_cols / route_set")

    def pick(self, k: int) -> int:
        if self.choice == "min":
            return self.blocking.first_of(k)
        if self.choice == "max":
            return self.blocking.piece(k)[-1]
        with self._lock:
            picks = self._memo.setdefault("picks", [])
            state = self._memo.setdefault("state", {"slot": 0})
            while len(picks) < k:
                picks.append(self._route_next(len(picks) + 1, state))
            return picks[k - 1]

    def _route_next(self, k, state):
        piece = self.blocking.piece(k)
        if self.route_set is not None:
            for n in piece:
                if n in self.route_set:
                    return n
            return piece[0]
        target = _triangular_target(self.route_cols, state["slot"])
        for n in piece:
            if pair(n)[1] == target:
                state["slot"] += 1
                return n
        return piece[0]

    def picks_upto(self, n: int) -> list[int]:
        out = []
        k = 1
        while self.blocking.first_of(k) <= n:
            p = self.pick(k)
            if p <= n:
                out.append(p)
            k += 1
        return out

    def member(self, n):
        k = self.blocking.piece_of(n)
        return k is not None and self.pick(k) == n

    def mask(self, n):
        out = np.zeros(n, dtype=bool)
        picks = self.picks_upto(n)
        if picks:
            out[np.array(picks) - 1] = True
        return out


def _triangular_target(cols: SetExpr, slot: int) -> int:
    # slot 0,1,2,3,4,5,... -> rank 1; 1,2; 1,2,3; ...
    t = 1
    while slot >= t:
        slot -= t
        t += 1
    return nth(cols, slot + 1)


# -- boolean structure ---------------------------------------------------------


@dataclass(frozen=True)
class Complement(SetExpr):
    arg: SetExpr

    def member(self, n):
        return not self.arg.member(n)

    def mask(self, n):
        return ~self.arg.mask(n)


@dataclass(frozen=True)
class Union(SetExpr):
    args: tuple

    def __init__(self, args):
        object.__setattr__(self, "args", tuple(args))

    def member(self, n):
        return any(a.member(n) for a in self.args)

    def mask(self, n):
        out = np.zeros(n, dtype=bool)
        for a in self.args:
            out |= a.mask(n)
        return out


@dataclass(frozen=True)
class Intersection(SetExpr):
    args: tuple

    def __init__(self, args):
        object.__setattr__(self, "args", tuple(args))

    def member(self, n):
        return all(a.member(n) for a in self.args)

    def mask(self, n):
        out = np.ones(n, dtype=bool)
        for a in self.args:
            out &= a.mask(n)
        return out


@dataclass(frozen=True)
class Difference(SetExpr):
    a: SetExpr
    b: SetExpr

    def member(self, n):
        return self.a.member(n) and not self.b.member(n)

    def mask(self, n):
        return self.a.mask(n) & ~self.b.mask(n)


# -- transport through enumerations -------------------------------------------------


@dataclass(frozen=True)
class Pullback(SetExpr):
    """{k : k-th element of ``ground`` lies in ``inner``}."""

    inner: SetExpr
    ground: SetExpr

    def member(self, n):
        try:
            return nth(self.ground, n) in self.inner
        except IndexError:
            return False

    def mask(self, n):
        out = np.zeros(n, dtype=bool)
        if n == 0:
            return out
        try:
            top = nth(self.ground, n)
        except IndexError:
            return np.fromiter((self.member(k) for k in range(1, n + 1)), dtype=bool, count=n)
        idx = np.nonzero(self.ground.mask(top))[0][:n]
        out[:] = self.inner.mask(top)[idx]
        return out


@dataclass(frozen=True)
class Image(SetExpr):
    """{k-th element of ``ground`` : k in ``inner``}."""

    inner: SetExpr
    ground: SetExpr

    def member(self, n):
        return n in self.ground and counting(self.ground, n) in self.inner

    def mask(self, n):
        g = self.ground.mask(n)
        ranks = np.cumsum(g)
        top = int(ranks[-1]) if n else 0
        inner = self.inner.mask(max(top, 1))
        out = np.zeros(n, dtype=bool)
        sel = g & (ranks >= 1)
        out[sel] = inner[ranks[sel] - 1]
        return out


@dataclass(frozen=True)
class ColumnSplit(SetExpr):
    """Elements of ``inner`` whose rank inside their own column has the given parity
    (1 = odd ranks, 0 = even ranks)."""

    inner: SetExpr
    parity: int

    def member(self, n):
        if n not in self.inner:
            return False
        r, c = pair(n)
        rank = sum(1 for rr in range(1, r + 1) if unpair(rr, c) in self.inner)
        return rank % 2 == self.parity % 2

    def mask(self, n):
        m = self.inner.mask(n)
        idx = np.nonzero(m)[0]
        out = np.zeros(n, dtype=bool)
        if idx.size == 0:
            return out
        _, cols = pair_arrays(n)
        c = cols[idx]
        order = np.argsort(c, kind="stable")
        cs = c[order]
        starts = np.r_[0, np.nonzero(np.diff(cs))[0] + 1]
        group_start = np.repeat(starts, np.diff(np.r_[starts, cs.size]))
        rank = np.empty_like(order)
        rank[order] = np.arange(cs.size) - group_start + 1
        out[idx] = rank % 2 == self.parity % 2
        return out


@dataclass(frozen=True)
class Embed(SetExpr):
    """Image of ``inner`` under the standard embedding of N onto the standard
    set ``target``: column m, row r goes to the r-th element of ``target`` in the
    m-th column where ``target`` is infinite."""

    inner: SetExpr
    target: SetExpr

    def member(self, n):
        from .colview import standard_structure

        if n not in self.target:
            return False
        st = standard_structure(self.target)
        r, c = pair(n)
        if not st.cols.bit(c):
            return False
        m = st.cols.count(c)
        rank = st.rows(c).count(r)
        return unpair(rank, m) in self.inner


# -- normal forms, enumeration, counting ----------------------------------------


@lru_cache(maxsize=4096)
def normalize(s: SetExpr) -> Optional[EP]:
    """Eventually periodic normal form, or None outside the periodic fragment."""
    if isinstance(s, FiniteSet):
        return ep_finite(s.elems)
    if isinstance(s, ArithProgression):
        return ep_progression(s.first, s.step)
    if isinstance(s, EventuallyPeriodic):
        return s.ep.minimized()
    if isinstance(s, Complement):
        e = normalize(s.arg)
        return None if e is None else e.complement().minimized()
    if isinstance(s, (Union, Intersection)):
        parts = [normalize(a) for a in s.args]
        if any(p is None for p in parts):
            return None
        acc = EMPTY if isinstance(s, Union) else ALL
        for p in parts:
            acc = acc.union(p) if isinstance(s, Union) else acc.intersection(p)
        return acc
    if isinstance(s, Difference):
        a, b = normalize(s.a), normalize(s.b)
        return None if a is None or b is None else a.difference(b)
    if isinstance(s, Pullback):
        a, g = normalize(s.inner), normalize(s.ground)
        return None if a is None or g is None else a.pullback(g)
    if isinstance(s, Image):
        a, g = normalize(s.inner), normalize(s.ground)
        return None if a is None or g is None else a.pushforward(g)
    return None


class _Enumerator:
    def __init__(self, s: SetExpr):
        self.s = s
        self.found: list[int] = []
        self.next_n = 1
        self.lock = threading.Lock()

    def nth(self, k: int, limit: int) -> int:
        with self.lock:
            while len(self.found) < k:
                if self.next_n > limit:
                    raise IndexError(f"fewer than {k} elements below {limit}")
                chunk = min(max(1024, self.next_n), limit - self.next_n + 1)
                lo = self.next_n
                m = self.s.mask(lo + chunk - 1)[lo - 1:]
                self.found.extend((np.nonzero(m)[0] + lo).tolist())
                self.next_n = lo + chunk
            return self.found[k - 1]


@lru_cache(maxsize=1024)
def _enumerator(s: SetExpr) -> _Enumerator:
    return _Enumerator(s)


SCAN_LIMIT = 1 << 26


def nth(s: SetExpr, k: int) -> int:
    """k-th smallest element of s (k >= 1); IndexError if it does not exist."""
    e = normalize(s)
    if e is not None:
        return e.nth(k)
    if isinstance(s, Powers):
        return s.coeff * k ** s.exponent + s.offset
    return _enumerator(s).nth(k, SCAN_LIMIT)


def nth_scan(s: SetExpr, k: int) -> int:
    return _enumerator(s).nth(k, SCAN_LIMIT)


def iter_elements(s: SetExpr) -> Iterator[int]:
    k = 1
    while True:
        try:
            yield nth(s, k)
        except IndexError:
            return
        k += 1


def counting(s: SetExpr, n: int) -> int:
    """|s ∩ [1, n]|, exact."""
    if n <= 0:
        return 0
    e = normalize(s)
    if e is not None:
        return e.count(n)
    if isinstance(s, Powers):
        return s.count(n)
    if isinstance(s, BlockSelector):
        return len(s.picks_upto(n))
    return int(np.count_nonzero(s.mask(n)))


def member(s: SetExpr, n: int) -> bool:
    return n in s


ALL_N = ArithProgression(1, 1)
EMPTY_SET = FiniteSet(())
