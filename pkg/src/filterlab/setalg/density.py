"""Natural density: exact values for periodic sets, certified zero-density bounds
for sparse sets, and horizon estimates for everything else."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Optional

from .blocking import log_bound
from .colview import colview
from .exprs import (
    BlockSelector,
    ColumnSplit,
    Complement,
    Difference,
    FiniteSet,
    Image,
    Intersection,
    Powers,
    Pullback,
    SetExpr,
    Union,
    counting,
    normalize,
    nth,
)


@dataclass
class DensityReport:
    horizon: int
    value: Optional[Fraction] = None
    exact: bool = False
    estimate: Fraction = Fraction(0)
    upper: Fraction = Fraction(0)
    lower: Fraction = Fraction(0)
    samples: list = field(default_factory=list)

    def to_json(self):
        return {
            "horizon": self.horizon,
            "exact": self.exact,
            "value": None if self.value is None else str(self.value),
            "estimate": str(self.estimate),
            "upper": str(self.upper),
            "lower": str(self.lower),
            "samples": [[m, str(r)] for m, r in self.samples],
        }


def density(s: SetExpr, horizon: int) -> DensityReport:
    """Density of ``s``: exact when ``s`` normalises, otherwise the ratio at the
    horizon together with the extreme ratios over a short window ending there."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    e = normalize(s)
    if e is not None:
        d = e.density()
        return DensityReport(horizon, d, True, d, d, d, [])
    step = max(1, horizon // 1024)
    window = [horizon - j * step for j in range(8) if horizon - j * step >= 1]
    ratios = [Fraction(counting(s, m), m) for m in window]
    samples = []
    m = 1
    while m < horizon:
        samples.append((m, Fraction(counting(s, m), m)))
        m *= 2
    samples.append((horizon, ratios[0]))
    return DensityReport(horizon, None, False, ratios[0], max(ratios), min(ratios), samples)


def sparse_bound(s: SetExpr) -> Optional[dict]:
    """A certificate that ``s`` has density zero, as a counting-bound description
    accepted by :func:`bound_value`, or None."""
    if isinstance(s, FiniteSet):
        return {"kind": "finite", "size": len(s.elems)}
    e = normalize(s)
    if e is not None:
        return {"kind": "finite", "size": len(e.elements())} if e.is_finite() else None
    if isinstance(s, Powers) and s.exponent >= 2:
        return {"kind": "powers", "exponent": s.exponent, "coeff": s.coeff, "offset": s.offset}
    if isinstance(s, BlockSelector) and s.blocking.growth == "log":
        return {"kind": "log", "per_piece": 1}
    if isinstance(s, Intersection):
        for a in s.args:
            b = sparse_bound(a)
            if b is not None:
                return b
        return None
    if isinstance(s, Difference):
        return sparse_bound(s.a)
    if isinstance(s, Pullback):
        inner = sparse_bound(s.inner)
        if inner is None:
            return None
        if inner["kind"] == "finite":
            return inner
        # k-th element of a positive-density ground is O(k), so sparseness survives
        if dense_lower(s.ground) is None:
            return None
        return {"kind": "pullback", "inner": inner, "ground": s.ground}
    if isinstance(s, Union):
        parts = [sparse_bound(a) for a in s.args]
        return None if any(p is None for p in parts) else {"kind": "sum", "parts": parts}
    if isinstance(s, Image):
        return sparse_bound(s.inner) or sparse_bound(s.ground)
    if isinstance(s, ColumnSplit):
        return sparse_bound(s.inner)
    v = colview(s)
    if v is not None:
        cols = v.nonempty_columns()
        if cols.is_finite():
            return {"kind": "columns", "count": len(cols.elements())}
    return None


def bound_value(cert: dict, n: int) -> int:
    """Upper bound on the counting function at n implied by a sparse certificate."""
    kind = cert["kind"]
    if kind == "finite":
        return cert["size"]
    if kind == "powers":
        return Powers(cert["exponent"], cert["coeff"], cert["offset"]).count(n)
    if kind == "log":
        return cert["per_piece"] * log_bound(n)
    if kind == "columns":
        # a column meets [1, n] in at most isqrt(2n) + 1 rows
        return cert["count"] * (isqrt(2 * n) + 1)
    if kind == "sum":
        return sum(bound_value(p, n) for p in cert["parts"])
    if kind == "pullback":
        ground = cert["ground"]
        if isinstance(ground, dict):
            from .serde import set_from_json

            ground = set_from_json(ground)
        return bound_value(cert["inner"], nth(ground, n))
    raise ValueError(f"unknown bound kind {kind!r}")


def complement_of(s: SetExpr) -> SetExpr:
    """Complement pushed through the boolean structure where that helps the
    density and finiteness rules."""
    if isinstance(s, Complement):
        return s.arg
    if isinstance(s, Union):
        return Intersection([complement_of(a) for a in s.args])
    if isinstance(s, Intersection):
        return Union([complement_of(a) for a in s.args])
    if isinstance(s, Difference):
        return Union([complement_of(s.a), s.b])
    if isinstance(s, Pullback) and is_infinite(s.ground):
        return Pullback(complement_of(s.inner), s.ground)
    return Complement(s)


def dense_lower(s: SetExpr) -> Optional[Fraction]:
    """A positive lower bound on the lower density of ``s``, or None."""
    e = normalize(s)
    if e is not None:
        d = e.density()
        return d if d > 0 else None
    if isinstance(s, Complement):
        return Fraction(1) if sparse_bound(s.arg) is not None else None
    if isinstance(s, Union):
        vals = [v for v in (dense_lower(a) for a in s.args) if v is not None]
        return max(vals) if vals else None
    if isinstance(s, Intersection):
        vals = [dense_lower(a) for a in s.args]
        if any(v is None for v in vals):
            return None
        total = sum(vals) - (len(vals) - 1)
        return total if total > 0 else None
    if isinstance(s, Difference):
        a = dense_lower(s.a)
        if a is None:
            return None
        if sparse_bound(s.b) is not None:
            return a
        b = dense_lower(Complement(s.b))
        if b is None:
            return None
        total = a + b - 1
        return total if total > 0 else None
    if isinstance(s, Image):
        a, g = dense_lower(s.inner), dense_lower(s.ground)
        return a * g if a is not None and g is not None else None
    if isinstance(s, Pullback):
        # relative density inside the ground is at least the absolute density
        return dense_lower(Intersection([s.inner, s.ground]))
    return None


def is_infinite(s: SetExpr) -> Optional[bool]:
    """Exact finiteness where the structure decides it, else None."""
    e = normalize(s)
    if e is not None:
        return not e.is_finite()
    if isinstance(s, (Powers, BlockSelector)):
        return True
    if dense_lower(s) is not None:
        return True
    v = colview(s)
    if v is not None:
        return not v.is_finite_set()
    if isinstance(s, Image):
        a, g = is_infinite(s.inner), is_infinite(s.ground)
        if a is False or g is False:
            return False
        return True if a and g else None
    if isinstance(s, Pullback):
        return is_infinite(Intersection([s.inner, s.ground]))
    if isinstance(s, Union):
        vals = [is_infinite(a) for a in s.args]
        if any(v is True for v in vals):
            return True
        return False if all(v is False for v in vals) else None
    if isinstance(s, Intersection):
        flat = _flatten_inter(s)
        periodic = [e for e in (normalize(a) for a in flat) if e is not None]
        if periodic:
            acc = periodic[0]
            for e in periodic[1:]:
                acc = acc.intersection(e)
            if acc.is_finite():
                return False
        vals = [is_infinite(a) for a in s.args]
        if any(v is False for v in vals):
            return False
        # cofinite or co-sparse factors do not change infiniteness of a sparse one
        rest = [a for a in s.args if not _cofinite_like(a)]
        if len(rest) == 1 and len(rest) < len(s.args):
            return is_infinite(rest[0])
        return None
    if isinstance(s, Difference):
        a = is_infinite(s.a)
        if a is False:
            return False
        b = is_infinite(s.b)
        if b is False:
            return a
        return None
    if isinstance(s, Complement):
        b = sparse_bound(s.arg)
        return True if b is not None else None
    b = sparse_bound(s)
    if b is not None and b["kind"] == "finite":
        return False
    return None


def _flatten_inter(s):
    out = []
    for a in s.args:
        out.extend(_flatten_inter(a) if isinstance(a, Intersection) else [a])
    return out


def _cofinite_like(s: SetExpr) -> bool:
    e = normalize(s)
    return e is not None and e.is_cofinite()
