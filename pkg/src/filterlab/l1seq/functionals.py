"""Test functionals: elements of l-infinity with sup-norm at most one, given by
finitely many rational values.  Values outside [-1, 1] are rejected, never clamped."""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction

from ..errors import InvalidArgument
from .vector import L1Vec, as_fraction


def _checked(values, what: str) -> tuple:
    out = tuple(as_fraction(v) for v in values)
    for i, v in enumerate(out):
        if abs(v) > 1:
            raise InvalidArgument(f"{what}[{i}] = {v} exceeds 1 in absolute value")
    return out


class TestFunctional:
    __test__ = False  # keep pytest from collecting this class

    def value(self, k: int) -> Fraction:  # pragma: no cover - abstract
        raise NotImplementedError

    def raw(self, v: L1Vec) -> Fraction:
        """<f, stored coordinates of v>, ignoring v's symbolic scale."""
        return sum((self.value(k) * c for k, c in v.items), Fraction(0))

    def __call__(self, v: L1Vec) -> Fraction:
        if v.sqrt_half:
            raise InvalidArgument("f(v) is irrational for a scaled vector; compare with at_least()")
        return self.raw(v)

    def at_least(self, v: L1Vec, eps) -> bool:
        """f(v) >= eps, exactly, also for 1/sqrt(2)-scaled vectors."""
        eps = as_fraction(eps)
        r = self.raw(v)
        if not v.sqrt_half:
            return r >= eps
        if eps <= 0:
            return r >= 0 or r * r <= 2 * eps * eps
        return r >= 0 and r * r >= 2 * eps * eps


@dataclass(frozen=True)
class Summing(TestFunctional):
    """f(x) = sum of all coordinates."""

    def value(self, k):
        return Fraction(1)

    def to_json(self):
        return {"kind": "summing"}


@dataclass(frozen=True)
class EventuallyPeriodicSigns(TestFunctional):
    prefix: tuple = ()
    period: tuple = (Fraction(1),)

    def __post_init__(self):
        object.__setattr__(self, "prefix", _checked(self.prefix, "prefix"))
        object.__setattr__(self, "period", _checked(self.period, "period"))
        if not self.period:
            raise InvalidArgument("period must be non-empty")

    def value(self, k):
        if k <= len(self.prefix):
            return self.prefix[k - 1]
        return self.period[(k - len(self.prefix) - 1) % len(self.period)]

    def to_json(self):
        return {"kind": "epSigns", "prefix": [str(v) for v in self.prefix], "period": [str(v) for v in self.period]}


@dataclass(frozen=True)
class BlockSigns(TestFunctional):
    """Value a_i on the coordinate block (lo_i, hi_i]; 0 off the blocks.

    ``per_coord`` optionally overrides single coordinates (used by sampled
    functionals that vary inside a block)."""

    blocks: tuple = ()
    values: tuple = ()
    per_coord: tuple = ()

    def __post_init__(self):
        blocks = tuple((int(lo), int(hi)) for lo, hi in self.blocks)
        for i, (lo, hi) in enumerate(blocks):
            if hi <= lo or lo < 0:
                raise InvalidArgument(f"block {i} = ({lo}, {hi}] is empty")
            if i and lo < blocks[i - 1][1]:
                raise InvalidArgument(f"block {i} overlaps its predecessor")
        if len(self.values) != len(blocks):
            raise InvalidArgument("one value per block is required")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "values", _checked(self.values, "values"))
        pc = tuple(sorted((int(k), v) for k, v in dict(self.per_coord).items()))
        _checked([v for _, v in pc], "per_coord")
        object.__setattr__(self, "per_coord", tuple((k, as_fraction(v)) for k, v in pc))
        object.__setattr__(self, "_pc", dict(self.per_coord))
        object.__setattr__(self, "_his", [hi for _, hi in blocks])

    def value(self, k):
        if k in self._pc:
            return self._pc[k]
        i = bisect.bisect_left(self._his, k)
        if i < len(self.blocks) and self.blocks[i][0] < k <= self.blocks[i][1]:
            return self.values[i]
        return Fraction(0)

    def to_json(self):
        return {"kind": "blockSigns", "blocks": [list(b) for b in self.blocks],
                "values": [str(v) for v in self.values],
                "perCoord": {str(k): str(v) for k, v in self.per_coord}}


def sign_functional(v: L1Vec) -> BlockSigns:
    """The per-coordinate sign pattern of v, so that f(v) = ||v||."""
    return BlockSigns(per_coord={k: (1 if c > 0 else -1) for k, c in v.items})


def apply(f: TestFunctional, v: L1Vec) -> Fraction:
    return f(v)


def functional_from_json(d) -> TestFunctional:
    kind = d.get("kind") if isinstance(d, dict) else d
    if kind == "summing":
        return Summing()
    if kind == "epSigns":
        return EventuallyPeriodicSigns(tuple(Fraction(v) for v in d.get("prefix", [])),
                                       tuple(Fraction(v) for v in d.get("period", ["1"])))
    if kind == "blockSigns":
        return BlockSigns(tuple(tuple(b) for b in d.get("blocks", [])),
                          tuple(Fraction(v) for v in d.get("values", [])),
                          {int(k): Fraction(v) for k, v in d.get("perCoord", {}).items()})
    raise InvalidArgument(f"unknown functional kind {kind!r}")
