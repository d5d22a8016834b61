"""Closed algebra of finitely describable subsets of N = {1, 2, ...}."""

from .blocking import (
    Blocking,
    Derived,
    Dyadic,
    ExplicitBoundaries,
    Transported,
    log_bound,
    make_blocking,
    transport,
)
from .colview import ColView, colview, standard_structure
from .density import DensityReport, bound_value, complement_of, dense_lower, density, is_infinite, sparse_bound
from .ep import EP
from .exprs import (
    ALL_N,
    EMPTY_SET,
    ArithProgression,
    BlockSelector,
    ColumnSet,
    ColumnSplit,
    Complement,
    Difference,
    Embed,
    EventuallyPeriodic,
    FiniteSet,
    Image,
    Intersection,
    Powers,
    Pullback,
    RowRule,
    SetExpr,
    Union,
    counting,
    iter_elements,
    member,
    normalize,
    nth,
)
from .pairing import COLUMNS, ColumnPartition, make_columns, pair, unpair
from .serde import blocking_from_json, blocking_to_json, set_from_json, set_to_json


def make_normalized(s: SetExpr):
    """normalize() wrapped back into a SetExpr, or None."""
    e = normalize(s)
    return None if e is None else EventuallyPeriodic.of(e)


def column_set(cols: SetExpr, drop: int = 0, exceptions=()) -> ColumnSet:
    return ColumnSet(cols, RowRule("cofinite", drop=drop), frozenset(exceptions))


def rectangle(rows: SetExpr, cols: SetExpr) -> ColumnSet:
    """The pairing rectangle {n : row(n) in rows, column(n) in cols}."""
    return ColumnSet(cols, RowRule("rows", expr=rows))
