"""JSON encoding of set expressions and blockings (round-trip stable)."""

from __future__ import annotations

from ..errors import InvalidArgument
from .blocking import Blocking, Derived, Dyadic, ExplicitBoundaries, Transported
from .exprs import (
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
)


def _rule_to_json(r: RowRule) -> dict:
    if r.kind == "cofinite":
        return {"kind": "cofinite", "drop": r.drop}
    if r.kind == "finite":
        return {"kind": "finite", "rows": list(r.rows)}
    if r.kind == "subsample":
        return {"kind": "subsample", "first": r.first, "step": r.step}
    return {"kind": "rows", "expr": set_to_json(r.expr)}


def set_to_json(s: SetExpr):
    if isinstance(s, FiniteSet):
        return {"gen": "finite", "elems": sorted(s.elems)}
    if isinstance(s, ArithProgression):
        return {"gen": "ap", "first": s.first, "step": s.step}
    if isinstance(s, EventuallyPeriodic):
        return {"gen": "ep", "prefix": s.prefix, "period": s.period}
    if isinstance(s, Powers):
        return {"gen": "powers", "exponent": s.exponent, "coeff": s.coeff, "offset": s.offset}
    if isinstance(s, ColumnSet):
        return {"gen": "colset", "cols": set_to_json(s.cols), "rule": _rule_to_json(s.rule),
                "exceptions": sorted([list(e) for e in s.exceptions])}
    if isinstance(s, BlockSelector):
        out = {"gen": "selector", "blocking": blocking_to_json(s.blocking), "choice": s.choice}
        if s.route_cols is not None:
            out["route_cols"] = set_to_json(s.route_cols)
        if s.route_set is not None:
            out["route_set"] = set_to_json(s.route_set)
        return out
    if isinstance(s, Pullback):
        return {"gen": "pullback", "inner": set_to_json(s.inner), "ground": set_to_json(s.ground)}
    if isinstance(s, Image):
        return {"gen": "image", "inner": set_to_json(s.inner), "ground": set_to_json(s.ground)}
    if isinstance(s, ColumnSplit):
        return {"gen": "colsplit", "inner": set_to_json(s.inner), "parity": s.parity}
    if isinstance(s, Embed):
        return {"gen": "embed", "inner": set_to_json(s.inner), "target": set_to_json(s.target)}
    if isinstance(s, Complement):
        return {"op": "compl", "args": [set_to_json(s.arg)]}
    if isinstance(s, Union):
        return {"op": "union", "args": [set_to_json(a) for a in s.args]}
    if isinstance(s, Intersection):
        return {"op": "inter", "args": [set_to_json(a) for a in s.args]}
    if isinstance(s, Difference):
        return {"op": "diff", "args": [set_to_json(s.a), set_to_json(s.b)]}
    raise InvalidArgument(f"cannot encode {type(s).__name__}")


def _need(d, key, where):
    if not isinstance(d, dict) or key not in d:
        raise InvalidArgument(f"{where}: missing field {key!r}")
    return d[key]


def _int(d, key, where, default=None):
    v = d.get(key, default) if isinstance(d, dict) else None
    if not isinstance(v, int) or isinstance(v, bool):
        raise InvalidArgument(f"{where}.{key}: expected an integer, got {v!r}")
    return v


def _rule_from_json(d, where) -> RowRule:
    kind = _need(d, "kind", where)
    try:
        if kind == "cofinite":
            return RowRule("cofinite", drop=_int(d, "drop", where, 0))
        if kind == "finite":
            return RowRule("finite", rows=tuple(int(r) for r in _need(d, "rows", where)))
        if kind == "subsample":
            return RowRule("subsample", first=_int(d, "first", where, 1), step=_int(d, "step", where, 1))
        if kind == "rows":
            return RowRule("rows", expr=set_from_json(_need(d, "expr", where), where + ".expr"))
    except ValueError as exc:
        raise InvalidArgument(f"{where}: {exc}") from exc
    raise InvalidArgument(f"{where}.kind: unknown row rule {kind!r}")


def set_from_json(d, where: str = "$") -> SetExpr:
    if not isinstance(d, dict):
        raise InvalidArgument(f"{where}: expected an object, got {type(d).__name__}")
    try:
        if "op" in d:
            op = d["op"]
            args = _need(d, "args", where)
            if not isinstance(args, list):
                raise InvalidArgument(f"{where}.args: expected a list")
            parts = [set_from_json(a, f"{where}.args[{i}]") for i, a in enumerate(args)]
            if op == "compl" and len(parts) == 1:
                return Complement(parts[0])
            if op == "union":
                return Union(parts)
            if op == "inter":
                return Intersection(parts)
            if op == "diff" and len(parts) == 2:
                return Difference(*parts)
            raise InvalidArgument(f"{where}.op: bad operator {op!r} with {len(parts)} args")
        gen = _need(d, "gen", where)
        if gen == "finite":
            return FiniteSet(int(e) for e in _need(d, "elems", where))
        if gen == "ap":
            return ArithProgression(_int(d, "first", where), _int(d, "step", where))
        if gen == "ep":
            return EventuallyPeriodic(str(_need(d, "prefix", where)), str(_need(d, "period", where)))
        if gen == "powers":
            return Powers(_int(d, "exponent", where, 2), _int(d, "coeff", where, 1), _int(d, "offset", where, 0))
        if gen == "colset":
            return ColumnSet(set_from_json(_need(d, "cols", where), where + ".cols"),
                             _rule_from_json(d.get("rule", {"kind": "cofinite"}), where + ".rule"),
                             frozenset(tuple(e) for e in d.get("exceptions", [])))
        if gen == "selector":
            return BlockSelector(
                blocking_from_json(_need(d, "blocking", where), where + ".blocking"),
                d.get("choice", "min"),
                set_from_json(d["route_cols"], where + ".route_cols") if "route_cols" in d else None,
                set_from_json(d["route_set"], where + ".route_set") if "route_set" in d else None,
            )
        if gen == "pullback":
            return Pullback(set_from_json(_need(d, "inner", where), where + ".inner"),
                            set_from_json(_need(d, "ground", where), where + ".ground"))
        if gen == "image":
            return Image(set_from_json(_need(d, "inner", where), where + ".inner"),
                         set_from_json(_need(d, "ground", where), where + ".ground"))
        if gen == "colsplit":
            return ColumnSplit(set_from_json(_need(d, "inner", where), where + ".inner"), _int(d, "parity", where))
        if gen == "embed":
            return Embed(set_from_json(_need(d, "inner", where), where + ".inner"),
                         set_from_json(_need(d, "target", where), where + ".target"))
    except (ValueError, TypeError) as exc:
        raise InvalidArgument(f"{where}: {exc}") from exc
    raise InvalidArgument(f"{where}.gen: unknown generator {d.get('gen')!r}")


def blocking_to_json(b: Blocking):
    return b.to_json()


def blocking_from_json(d, where: str = "$") -> Blocking:
    if d == "dyadic":
        return Dyadic()
    if not isinstance(d, dict):
        raise InvalidArgument(f"{where}: expected 'dyadic' or an object")
    kind = _need(d, "kind", where)
    if kind == "dyadic":
        return Dyadic()
    if kind == "explicit":
        return ExplicitBoundaries(_need(d, "bounds", where))
    if kind == "derived":
        return Derived(set_from_json(_need(d, "ground", where), where + ".ground"),
                       blocking_from_json(d.get("base", "dyadic"), where + ".base"),
                       d.get("via", "rank"))
    if kind == "transported":
        return Transported(blocking_from_json(_need(d, "inner", where), where + ".inner"),
                           set_from_json(_need(d, "via", where), where + ".via"))
    raise InvalidArgument(f"{where}.kind: unknown blocking {kind!r}")
