"""Decreasing chains A_1 ⊇ A_2 ⊇ ... of filter members."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..errors import InvalidArgument, InvalidChain
from ..setalg import (
    ALL_N,
    ArithProgression,
    ColumnSet,
    Difference,
    Intersection,
    RowRule,
    SetExpr,
    colview,
    normalize,
    set_from_json,
    set_to_json,
)
from ..setalg.pairing import pair

INF = math.inf
LAYER_CAP = 1 << 40


@dataclass
class BaseChain:
    """A_n for n >= 1.

    tags: ``tails`` (ground minus [1, step*n]), ``fd_tails`` (the columns with
    index >= n, i.e. B_{n,∅}), ``fd_drop`` (every column minus its first
    step*n rows), ``constant`` (A_n = base), ``custom`` (any rule).
    """

    tag: str = "tails"
    step: int = 1
    base: SetExpr = ALL_N
    rule: Optional[Callable[[int], SetExpr]] = field(default=None, repr=False)

    def __post_init__(self):
        if self.tag not in ("tails", "fd_tails", "fd_drop", "constant", "custom"):
            raise InvalidArgument(f"unknown chain tag {self.tag!r}")
        if self.tag == "custom" and self.rule is None:
            raise InvalidArgument("custom chain needs a rule")
        if self.step < 1:
            raise InvalidArgument("chain step must be positive")

    def __call__(self, n: int) -> SetExpr:
        if self.tag == "tails":
            tail = ArithProgression(self.step * n + 1, 1)
            return tail if self.base == ALL_N else Intersection([self.base, tail])
        if self.tag == "fd_tails":
            return ColumnSet(ArithProgression(n, 1))
        if self.tag == "fd_drop":
            return ColumnSet(ALL_N, RowRule("cofinite", drop=self.step * n))
        if self.tag == "constant":
            return self.base
        return self.rule(n)

    def member(self, n: int, j: int) -> bool:
        """j in A_n, with fast paths for the named chains."""
        if self.tag == "tails":
            return j > self.step * n and j in self.base
        if self.tag == "fd_tails":
            return pair(j)[1] >= n
        if self.tag == "fd_drop":
            return pair(j)[0] > self.step * n
        if self.tag == "constant":
            return j in self.base
        return j in self.rule(n)

    def layer(self, j: int, cap: int = LAYER_CAP):
        """The n with j in A_n \\ A_{n+1}; 0 if j is outside A_1, INF if in every A_n."""
        if not self.member(1, j):
            return 0
        if self.tag == "constant":
            return INF
        lo, hi = 1, 2
        while self.member(hi, j):
            lo, hi = hi, hi * 2
            if hi > cap:
                return INF
        # member(lo) and not member(hi)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.member(mid, j):
                lo = mid
            else:
                hi = mid
        return lo

    def check_decreasing(self, upto: int = 32, scan: int = 10_000) -> None:
        """Raise InvalidChain unless A_{n+1} ⊆ A_n for n < upto (exactly where the
        sets normalise, otherwise by scanning [1, scan])."""
        if self.tag in ("tails", "fd_tails", "fd_drop", "constant"):
            return
        for n in range(1, upto):
            a, b = self(n), self(n + 1)
            extra = Difference(b, a)
            e = normalize(extra)
            if e is not None:
                if not e.is_empty():
                    raise InvalidChain(f"A_{n + 1} is not contained in A_{n}: {e.nth(1)} escapes")
                continue
            v = colview(extra)
            if v is not None:
                if not v.nonempty_columns().is_empty():
                    raise InvalidChain(f"A_{n + 1} is not contained in A_{n}")
                continue
            bad = np.nonzero(extra.mask(scan))[0]
            if bad.size:
                raise InvalidChain(f"A_{n + 1} is not contained in A_{n}: {int(bad[0]) + 1} escapes")

    def to_json(self):
        out = {"tag": self.tag}
        if self.tag in ("tails", "fd_drop"):
            out["step"] = self.step
        if self.tag in ("tails", "constant") and self.base != ALL_N:
            out["base"] = set_to_json(self.base)
        if self.tag == "custom":
            out["sample"] = [set_to_json(self(n)) for n in range(1, 4)]
        return out


def chain_from_json(d, where: str = "$") -> BaseChain:
    if isinstance(d, str):
        d = {"tag": d}
    if not isinstance(d, dict):
        raise InvalidArgument(f"{where}: chain must be a tag or an object")
    tag = d.get("tag", "tails")
    if tag == "custom":
        if "sets" not in d:
            raise InvalidArgument(f"{where}: custom chain needs 'sets' (A_1, A_2, ...)")
        sets = [set_from_json(s, f"{where}.sets[{i}]") for i, s in enumerate(d["sets"])]
        # past the listed sets the last one is repeated minus an initial segment
        last = sets[-1]

        def rule(n, sets=sets, last=last):
            if n <= len(sets):
                return sets[n - 1]
            return Intersection([last, ArithProgression(n - len(sets) + 1, 1)])

        return BaseChain("custom", rule=rule)
    base = set_from_json(d["base"], where + ".base") if "base" in d else ALL_N
    return BaseChain(tag, int(d.get("step", 1)), base)


def tails_chain(step: int = 1, base: SetExpr = ALL_N) -> BaseChain:
    return BaseChain("tails", step, base)


def fd_tails_chain() -> BaseChain:
    return BaseChain("fd_tails")


def fd_drop_chain(step: int = 1) -> BaseChain:
    return BaseChain("fd_drop", step)


def constant_chain(base: SetExpr) -> BaseChain:
    return BaseChain("constant", base=base)


__all__ = ["BaseChain", "chain_from_json", "tails_chain", "fd_tails_chain", "fd_drop_chain",
           "constant_chain", "INF"]
