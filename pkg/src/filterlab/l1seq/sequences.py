"""Deterministic sequences n -> L1Vec or n -> rational.

Besides the rule itself a sequence may declare *hooks* that describe its
level sets symbolically, e.g. {n : ||x_n - x|| >= eps} as a SetExpr.  The
convergence module can then hand such sets to a filter's decision procedure
instead of relying on horizon evidence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from ..errors import InvalidArgument
from ..setalg import (
    ALL_N,
    EMPTY_SET,
    ArithProgression,
    ColumnSet,
    Complement,
    Difference,
    EventuallyPeriodic,
    FiniteSet,
    Intersection,
    Powers,
    SetExpr,
    Union,
    set_from_json,
    set_to_json,
)
from ..setalg.pairing import column
from .functionals import BlockSigns, EventuallyPeriodicSigns, Summing, TestFunctional
from .vector import L1Vec, ZERO, as_fraction, linear_combination

# thresholds past this are not expanded into explicit exception lists
EXCEPTION_LIMIT = 1 << 20


def eventual_set(cond: Callable[[int], bool], n0: int, tail: bool) -> Optional[SetExpr]:
    """{n : cond(n)} given that cond(n) == tail for every n >= n0."""
    n0 = max(1, n0)
    if n0 > EXCEPTION_LIMIT:
        return None
    bits = "".join("1" if cond(n) else "0" for n in range(1, n0))
    return EventuallyPeriodic(bits, "1" if tail else "0")


# -- scalar sequences ----------------------------------------------------------------


@dataclass(frozen=True)
class Affine:
    """n -> a * n**p + b with p in {-1, 0, 1}."""

    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)
    p: int = 0

    def __post_init__(self):
        if self.p not in (-1, 0, 1):
            raise InvalidArgument("affine exponent must be -1, 0 or 1")
        object.__setattr__(self, "a", as_fraction(self.a))
        object.__setattr__(self, "b", as_fraction(self.b))

    def __call__(self, n: int) -> Fraction:
        if self.p == 0:
            return self.a + self.b
        if self.p == 1:
            return self.a * n + self.b
        return self.a / n + self.b

    @property
    def constant(self) -> bool:
        return self.p == 0 or self.a == 0

    def sup(self) -> Optional[Fraction]:
        if self.p == 1 and self.a != 0:
            return None
        return abs(self.a) + abs(self.b) if self.p == -1 else abs(self(1))

    def far_set(self, x: Fraction, eps: Fraction) -> Optional[SetExpr]:
        """{n : |value(n) - x| >= eps}"""
        cond = lambda n: abs(self(n) - x) >= eps  # noqa: E731
        if self.constant:
            return ALL_N if cond(1) else EMPTY_SET
        d = self.b - x
        a = abs(self.a)
        if self.p == 1:
            n0 = math.floor((eps + abs(d)) / a) + 1
            return eventual_set(cond, n0, True)
        # p == -1: the a/n term dies out
        if abs(d) != eps:
            tail = abs(d) > eps
            n0 = math.floor(a / abs(abs(d) - eps)) + 1
        else:
            same_sign = (self.a > 0) == (d > 0)
            tail = same_sign
            n0 = 1 if same_sign else math.floor(a / (2 * abs(d))) + 1
        return eventual_set(cond, n0, tail)

    def to_json(self):
        return {"a": str(self.a), "b": str(self.b), "p": self.p}


@dataclass(frozen=True)
class ScalarPieces:
    """x_n = rule_i(n) for the first piece S_i containing n, else ``otherwise``(n)."""

    pieces: tuple = ()  # (SetExpr, Affine) pairs
    otherwise: Affine = Affine()

    def __call__(self, n: int) -> Fraction:
        for s, r in self.pieces:
            if n in s:
                return r(n)
        return self.otherwise(n)

    def regions(self):
        seen = []
        for s, r in self.pieces:
            yield (s if not seen else Difference(s, Union(list(seen)))), r
            seen.append(s)
        yield (Complement(Union(seen)) if seen else ALL_N), self.otherwise

    def far_set(self, x, eps) -> Optional[SetExpr]:
        parts = []
        for region, r in self.regions():
            f = r.far_set(x, eps)
            if f is None:
                return None
            if f == EMPTY_SET:
                continue
            parts.append(region if f == ALL_N else Intersection([region, f]))
        if not parts:
            return EMPTY_SET
        return parts[0] if len(parts) == 1 else Union(parts)

    def sup(self) -> Optional[Fraction]:
        vals = [r.sup() for _, r in self.pieces] + [self.otherwise.sup()]
        return None if any(v is None for v in vals) else max(vals)

    def lattice(self, n: int):
        """(integer numerators, common denominator) of x_1..x_n when every piece
        is constant; None otherwise."""
        rules = [r for _, r in self.pieces] + [self.otherwise]
        if not all(r.constant for r in rules):
            return None
        vals = [r(1) for r in rules]
        den = math.lcm(*(v.denominator for v in vals))
        if den > 1 << 20 or max(abs(v) for v in vals) * den > 1 << 40:
            return None
        out = np.full(n, int(vals[-1] * den), dtype=np.int64)
        assigned = np.zeros(n, dtype=bool)
        for (s, _), v in zip(self.pieces, vals):
            m = s.mask(n) & ~assigned
            out[m] = int(v * den)
            assigned |= m
        return out, den

    def to_json(self):
        return {"pieces": [{"set": set_to_json(s), "rule": r.to_json()} for s, r in self.pieces],
                "otherwise": self.otherwise.to_json()}


# -- generators ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SeqGen:
    rule: Callable
    kind: str = "vector"  # or "scalar"
    name: str = "user_defined"
    description: str = ""
    params: dict = field(default_factory=dict)
    bound: Optional[Fraction] = None  # declared sup of |x_n| or ||x_n||
    pieces: Optional[ScalarPieces] = None
    hooks: dict = field(default_factory=dict)
    max_index: Optional[int] = None  # terms past this are not materialised

    def __call__(self, n: int):
        if n < 1:
            raise InvalidArgument(f"sequence index must be >= 1, got {n}")
        return self.rule(n)

    def reach(self, horizon: int) -> int:
        """How far horizon scans can actually evaluate the sequence."""
        return horizon if self.max_index is None else min(horizon, self.max_index)

    @property
    def is_scalar(self) -> bool:
        return self.kind == "scalar"

    # symbolic level sets; None means "not available"
    def far_set(self, mode: str, limit, eps: Fraction, k: Optional[int] = None,
                f: Optional[TestFunctional] = None) -> Optional[SetExpr]:
        eps = as_fraction(eps)
        if mode == "scalar":
            return self.pieces.far_set(as_fraction(limit), eps) if self.pieces is not None else None
        hook = self.hooks.get(mode)
        if hook is None:
            return None
        if mode == "coord":
            return hook(k, limit.coord(k), eps)
        if mode == "weak":
            return hook(f, limit, eps)
        return hook(limit, eps)

    def support_bound(self, n: int) -> Optional[int]:
        """A nondecreasing bound on the largest coordinate x_n uses."""
        hook = self.hooks.get("support_bound")
        return None if hook is None else hook(n)

    def head_decay(self, m: int, delta: Fraction) -> Optional[int]:
        """An N such that head_mass(x_j, m) < delta for every j >= N."""
        hook = self.hooks.get("head_decay")
        return None if hook is None else hook(m, as_fraction(delta))

    def check_bound(self, upto: int = 1000) -> bool:
        """Spot-check the declared bound on x_1..x_upto."""
        if self.bound is None:
            return True
        for n in range(1, upto + 1):
            x = self(n)
            if self.is_scalar:
                if abs(x) > self.bound:
                    return False
            elif x.norm1_sq() > self.bound ** 2:
                return False
        return True

    def to_json(self):
        out = {"name": self.name, "kind": self.kind, "description": self.description}
        out.update({k: _param_json(v) for k, v in self.params.items()})
        if self.bound is not None:
            out["bound"] = str(self.bound)
        return out


def _param_json(v):
    from ..verdict import jsonable

    return jsonable(v)


def _weak_pattern(f: TestFunctional):
    """(prefix values, period values) of f's coordinate values."""
    if isinstance(f, Summing):
        return [], [Fraction(1)]
    if isinstance(f, EventuallyPeriodicSigns):
        return list(f.prefix), list(f.period)
    if isinstance(f, BlockSigns):
        top = max([hi for _, hi in f.blocks] + [k for k, _ in f.per_coord] + [0])
        return [f.value(k) for k in range(1, top + 1)], [Fraction(0)]
    return None


def canonical_basis() -> SeqGen:
    def norm(x: L1Vec, eps):
        n0 = x.max_index() + 1
        return eventual_set(lambda n: (L1Vec.unit(n) - x).norm1() >= eps, n0, x.norm1() + 1 >= eps)

    def coord(k, xk, eps):
        return eventual_set(lambda n: abs((1 if n == k else 0) - xk) >= eps, k + 1, abs(xk) >= eps)

    def weak(f, x, eps):
        pat = _weak_pattern(f)
        if pat is None:
            return None
        fx = f(x)
        pre, per = pat
        bit = lambda v: "1" if abs(v - fx) >= eps else "0"  # noqa: E731
        return EventuallyPeriodic("".join(map(bit, pre)), "".join(map(bit, per)))

    return SeqGen(L1Vec.unit, "vector", "canonical_basis", "x_n = e_n", bound=Fraction(1),
                  hooks={"norm": norm, "coord": coord, "weak": weak, "head_decay": lambda m, d: m + 1,
                         "support_bound": lambda n: n})


def remark_sequence(columns=None) -> SeqGen:
    """x_n = e_n + e_{f(n)} with f(n) the column of n."""

    def rule(n):
        return L1Vec.of([(n, 1), (column(n), 1)])

    def coord(k, xk, eps):
        col = ColumnSet(FiniteSet({k}))
        parts = []
        if abs(1 - xk) >= eps:
            parts.append(col)
        if abs(xk) >= eps:
            parts.append(Complement(col))
        base = Union(parts) if parts else EMPTY_SET
        at_k = abs(rule(k).coord(k) - xk) >= eps
        return Union([base, FiniteSet({k})]) if at_k else Difference(base, FiniteSet({k}))

    def norm(x, eps):
        if not x.is_zero():
            return None
        return ALL_N if Fraction(2) >= eps else EMPTY_SET

    return SeqGen(rule, "vector", "remark_sequence", "x_n = e_n + e_{column(n)}", bound=Fraction(2),
                  hooks={"coord": coord, "norm": norm, "support_bound": lambda n: n})


def perturbed_basis() -> SeqGen:
    """x_n = (1/n) e_1 + e_{n+1}"""

    def rule(n):
        return L1Vec.of([(1, Fraction(1, n)), (n + 1, 1)])

    def coord(k, xk, eps):
        if k == 1:
            return Affine(Fraction(1), Fraction(0), -1).far_set(xk, eps)
        return eventual_set(lambda n: abs((1 if n + 1 == k else 0) - xk) >= eps, k, abs(xk) >= eps)

    def norm(x, eps):
        if any(k != 1 for k in x.support):
            return None
        x1 = x.coord(1)
        if eps <= 1:
            return ALL_N
        return Affine(Fraction(1), Fraction(0), -1).far_set(x1, eps - 1)

    def head_decay(m, delta):
        return max(m, math.floor(1 / delta) + 1)

    return SeqGen(rule, "vector", "perturbed_basis", "x_n = (1/n) e_1 + e_{n+1}", bound=Fraction(2),
                  hooks={"coord": coord, "norm": norm, "head_decay": head_decay, "support_bound": lambda n: n + 1})


def decaying_unit(k: int = 1) -> SeqGen:
    """x_n = (1/n) e_k"""

    def rule(n):
        return L1Vec.of({k: Fraction(1, n)})

    def norm(x, eps):
        if any(j != k for j in x.support):
            return None
        return Affine(Fraction(1), Fraction(0), -1).far_set(x.coord(k), eps)

    def coord(j, xj, eps):
        if j == k:
            return Affine(Fraction(1), Fraction(0), -1).far_set(xj, eps)
        return ALL_N if abs(xj) >= eps else EMPTY_SET

    return SeqGen(rule, "vector", "decaying_unit", f"x_n = (1/n) e_{k}", params={"k": k}, bound=Fraction(1),
                  hooks={"norm": norm, "coord": coord, "head_decay": lambda m, d: math.floor(1 / d) + 1,
                         "support_bound": lambda n: k})


def constant_vector(v: L1Vec) -> SeqGen:
    def every(cond):
        return ALL_N if cond else EMPTY_SET

    hooks = {
        "norm": lambda x, eps: every((v - x).norm1_sq() >= eps * eps),
        "coord": lambda k, xk, eps: every(abs(v.coord(k) - xk) >= eps),
        "weak": lambda f, x, eps: every(abs(f(v) - f(x)) >= eps),
    }
    bound = None if v.sqrt_half else v.norm1()
    return SeqGen(lambda n: v, "vector", "constant", "x_n = v", params={"v": v}, bound=bound, hooks=hooks)


def user_defined(rule: Callable, kind: str = "vector", description: str = "", bound=None) -> SeqGen:
    return SeqGen(rule, kind, "user_defined", description, bound=None if bound is None else as_fraction(bound))


# scalar constructors


def scalar_pieces(pieces, otherwise=Affine(), name="piecewise", description="", params=None) -> SeqGen:
    sp = ScalarPieces(tuple(pieces), otherwise)
    return SeqGen(sp, "scalar", name, description, params or {"pieces": sp}, bound=sp.sup(), pieces=sp)


def scalar_constant(c) -> SeqGen:
    c = as_fraction(c)
    return scalar_pieces((), Affine(Fraction(0), c, 0), "constant", f"x_n = {c}", {"c": c})


def harmonic(a=1, b=0) -> SeqGen:
    a, b = as_fraction(a), as_fraction(b)
    return scalar_pieces((), Affine(a, b, -1), "harmonic", f"x_n = {a}/n + {b}", {"a": a, "b": b})


def alternating(c=1) -> SeqGen:
    """x_n = (-1)^n c"""
    c = as_fraction(c)
    return scalar_pieces(((ArithProgression(2, 2), Affine(Fraction(0), c, 0)),), Affine(Fraction(0), -c, 0),
                         "alternating", f"x_n = (-1)^n {c}", {"c": c})


def identity(a=1) -> SeqGen:
    a = as_fraction(a)
    return scalar_pieces((), Affine(a, Fraction(0), 1), "identity", f"x_n = {a} n", {"a": a})


def indicator(s: SetExpr, on=1, off=0) -> SeqGen:
    on, off = as_fraction(on), as_fraction(off)
    return scalar_pieces(((s, Affine(Fraction(0), on, 0)),), Affine(Fraction(0), off, 0), "indicator",
                         "x_n = on for n in S, off elsewhere", {"set": s, "on": on, "off": off})


def squares_indicator() -> SeqGen:
    return indicator(Powers(2))


# -- Cesàro means ----------------------------------------------------------------------


def cesaro_means(g: SeqGen, n: int):
    """(x_1 + ... + x_n) / n, exact."""
    if n < 1:
        raise InvalidArgument("n must be >= 1")
    if g.is_scalar:
        if g.pieces is not None:
            lat = g.pieces.lattice(n)
            if lat is not None:
                nums, den = lat
                return Fraction(int(nums.sum()), den * n)
        return sum((g(j) for j in range(1, n + 1)), Fraction(0)) / n
    w = Fraction(1, n)
    return linear_combination([w] * n, [g(j) for j in range(1, n + 1)])


# -- JSON --------------------------------------------------------------------------------


def seq_from_json(d, where: str = "$") -> SeqGen:
    if isinstance(d, str):
        d = {"name": d}
    if not isinstance(d, dict) or "name" not in d:
        raise InvalidArgument(f"{where}: sequence definition needs a 'name'")
    name = d["name"]
    try:
        if name == "canonical_basis":
            return canonical_basis()
        if name == "remark_sequence":
            return remark_sequence()
        if name == "perturbed_basis":
            return perturbed_basis()
        if name == "decaying_unit":
            return decaying_unit(int(d.get("k", 1)))
        if name == "constant" and "v" in d:
            return constant_vector(L1Vec.from_json(d["v"]))
        if name == "constant":
            return scalar_constant(Fraction(d.get("c", "0")))
        if name == "harmonic":
            return harmonic(Fraction(d.get("a", "1")), Fraction(d.get("b", "0")))
        if name == "alternating":
            return alternating(Fraction(d.get("c", "1")))
        if name == "identity":
            return identity(Fraction(d.get("a", "1")))
        if name == "squares_indicator":
            return squares_indicator()
        if name == "indicator":
            return indicator(set_from_json(d["set"], where + ".set"), Fraction(d.get("on", "1")),
                             Fraction(d.get("off", "0")))
        if name == "piecewise":
            pieces = [(set_from_json(p["set"], f"{where}.pieces[{i}].set"),
                       Affine(Fraction(p["rule"].get("a", "0")), Fraction(p["rule"].get("b", "0")),
                              int(p["rule"].get("p", 0))))
                      for i, p in enumerate(d.get("pieces", []))]
            o = d.get("otherwise", {})
            return scalar_pieces(pieces, Affine(Fraction(o.get("a", "0")), Fraction(o.get("b", "0")),
                                                int(o.get("p", 0))))
        if name == "walsh_counterexample":
            from ..constructions.counterexample import walsh_counterexample_from_json

            return walsh_counterexample_from_json(d, where)
    except (KeyError, ValueError, TypeError, ZeroDivisionError) as exc:
        raise InvalidArgument(f"{where}: {exc}") from exc
    raise InvalidArgument(f"{where}.name: unknown sequence {name!r}")


__all__ = [
    "Affine", "ScalarPieces", "SeqGen", "canonical_basis", "remark_sequence", "perturbed_basis",
    "constant_vector", "decaying_unit", "user_defined", "scalar_pieces", "scalar_constant", "harmonic", "alternating",
    "identity", "indicator", "squares_indicator", "cesaro_means", "seq_from_json", "eventual_set", "ZERO",
]
