"""Column-wise analysis of set expressions.

Through the diagonal pairing every subset of N is a family of row sets, one
per column.  For expressions built from column sets, finite and cofinite
pieces, the row set of each column is eventually periodic and, past a finite
``bound``, depends only on the column index modulo ``period``.  That makes the
questions the column filters ask ("how many columns are met infinitely
often?") decidable by inspecting one period of columns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

from ..errors import InvalidArgument
from .ep import ALL, EMPTY, EP, ep_finite, ep_progression
from .exprs import (
    ColumnSet,
    ColumnSplit,
    Complement,
    Difference,
    Embed,
    Intersection,
    SetExpr,
    Union,
    normalize,
)
from .pairing import pair


@dataclass
class ColView:
    bound: int
    period: int
    rows_fn: Callable[[int], EP]

    def __post_init__(self):
        self.rows = lru_cache(maxsize=None)(self.rows_fn)

    def columns_where(self, pred: Callable[[EP], bool]) -> EP:
        """The set of columns whose row set satisfies ``pred``, as an EP over columns."""
        pre = "".join("1" if pred(self.rows(c)) else "0" for c in range(1, self.bound + 1))
        per = "".join("1" if pred(self.rows(c)) else "0"
                      for c in range(self.bound + 1, self.bound + self.period + 1))
        return EP(pre, per).minimized()

    def infinite_columns(self) -> EP:
        return self.columns_where(lambda r: not r.is_finite())

    def nonempty_columns(self) -> EP:
        return self.columns_where(lambda r: not r.is_empty())

    def coinfinite_columns(self) -> EP:
        return self.columns_where(lambda r: not r.is_cofinite())

    def is_finite_set(self) -> bool:
        return self.infinite_columns().is_empty() and self.nonempty_columns().is_finite()


def _finite_view(elems) -> ColView:
    by_col: dict[int, list[int]] = {}
    for n in elems:
        r, c = pair(n)
        by_col.setdefault(c, []).append(r)
    bound = max(by_col, default=0)
    return ColView(bound, 1, lambda c: ep_finite(by_col.get(c, ())))


def _combine(views, op) -> ColView:
    bound = max(v.bound for v in views)
    period = 1
    for v in views:
        period = math.lcm(period, v.period)

    def rows(c):
        acc = views[0].rows(c)
        for v in views[1:]:
            acc = op(acc, v.rows(c))
        return acc

    return ColView(bound, period, rows)


@lru_cache(maxsize=4096)
def colview(s: SetExpr) -> Optional[ColView]:
    """Column view of ``s`` or None when the expression leaves the supported fragment."""
    if isinstance(s, ColumnSet):
        cols = normalize(s.cols)
        rule = s.rule.ep()
        exc: dict[int, list[int]] = {}
        for c, r in s.exceptions:
            exc.setdefault(c, []).append(r)
        bound = max([len(cols.prefix)] + list(exc))

        def rows(c):
            if not cols.bit(c):
                return EMPTY
            return rule.difference(ep_finite(exc[c])) if c in exc else rule

        return ColView(bound, len(cols.period), rows)
    if isinstance(s, Complement):
        v = colview(s.arg)
        if v is None:
            return None
        return ColView(v.bound, v.period, lambda c: v.rows(c).complement())
    if isinstance(s, (Union, Intersection)):
        views = [colview(a) for a in s.args]
        if any(v is None for v in views) or not views:
            return None
        op = EP.union if isinstance(s, Union) else EP.intersection
        return _combine(views, op)
    if isinstance(s, Difference):
        a, b = colview(s.a), colview(s.b)
        if a is None or b is None:
            return None
        return _combine([a, b], EP.difference)
    if isinstance(s, ColumnSplit):
        v = colview(s.inner)
        if v is None:
            return None
        ranks = ep_progression(1 if s.parity % 2 else 2, 2)
        return ColView(v.bound, v.period, lambda c: ranks.pushforward(v.rows(c)))
    if isinstance(s, Embed):
        return _embed_view(s)
    e = normalize(s)
    if e is None:
        return None
    if e.is_finite():
        return _finite_view(e.elements())
    if e.is_cofinite():
        fv = _finite_view(e.complement().elements())
        return ColView(fv.bound, 1, lambda c: fv.rows(c).complement())
    return None


@dataclass
class StandardStructure:
    cols: EP  # columns where the set is infinite
    rows: Callable[[int], EP]


@lru_cache(maxsize=1024)
def standard_structure(target: SetExpr) -> StandardStructure:
    """Decompose a standard set: a union of infinite row sets over infinitely many
    columns, with every other column empty."""
    v = colview(target)
    if v is None:
        raise InvalidArgument("target is outside the column fragment")
    inf_cols = v.infinite_columns()
    partial = v.columns_where(lambda r: r.is_finite() and not r.is_empty())
    if inf_cols.is_finite():
        raise InvalidArgument("not a standard set: only finitely many columns are met infinitely often")
    if not partial.is_empty():
        raise InvalidArgument("not a standard set: some column is met in a non-empty finite set")
    return StandardStructure(inf_cols, v.rows)


def _embed_view(s: Embed) -> Optional[ColView]:
    vb = colview(s.inner)
    if vb is None:
        return None
    st = standard_structure(s.target)
    vj = colview(s.target)
    M = st.cols
    # columns past this bound have both their own type and their rank's type generic
    bound = max(vj.bound, len(M.prefix))
    if vb.bound > 0:
        bound = max(bound, M.nth(vb.bound))
    period = math.lcm(vj.period, len(M.period)) * vb.period

    def rows(c):
        if not M.bit(c):
            return EMPTY
        m = M.count(c)
        return vb.rows(m).pushforward(vj.rows(c))

    return ColView(bound, period, rows)


__all__ = ["ColView", "colview", "standard_structure", "StandardStructure", "ALL", "EMPTY"]
