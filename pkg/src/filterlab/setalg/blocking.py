"""Blockings: partitions of an infinite set into non-empty finite pieces D_1, D_2, ...

Pieces are indexed from 1.  The dyadic blocking is D_1 = {1} and
D_k = (2^(k-2), 2^(k-1)] for k >= 2, i.e. {1}, {2}, {3,4}, {5..8}, ...
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Optional, Sequence

from ..errors import InvalidBlocking
from .exprs import ALL_N, SetExpr, counting, nth


class Blocking:
    # "log": at most log2(n) + 2 pieces meet [1, n];  int s: every piece has <= s elements
    growth: object = None

    def piece(self, k: int) -> Sequence[int]:  # pragma: no cover - abstract
        raise NotImplementedError

    def piece_of(self, n: int) -> Optional[int]:  # pragma: no cover - abstract
        raise NotImplementedError

    def first_of(self, k: int) -> int:
        return self.piece(k)[0]

    def pieces_meeting(self, n: int) -> int:
        """Number of pieces with an element <= n."""
        k = 0
        while self.first_of(k + 1) <= n:
            k += 1
        return k

    def pieces_upto(self, n: int):
        k = 1
        while self.first_of(k) <= n:
            yield k, self.piece(k)
            k += 1


@dataclass(frozen=True)
class Dyadic(Blocking):
    growth = "log"
    ground = ALL_N

    def piece(self, k):
        if k < 1:
            raise IndexError(k)
        if k == 1:
            return range(1, 2)
        return range(2 ** (k - 2) + 1, 2 ** (k - 1) + 1)

    def first_of(self, k):
        return 1 if k == 1 else 2 ** (k - 2) + 1

    def piece_of(self, n):
        return (n - 1).bit_length() + 1 if n >= 1 else None

    def pieces_meeting(self, n):
        return self.piece_of(n) if n >= 1 else 0

    def to_json(self):
        return "dyadic"


@dataclass(frozen=True)
class ExplicitBoundaries(Blocking):
    """Pieces (b_{k-1}, b_k] with b_0 = 0; past the listed boundaries the last
    gap repeats."""

    bounds: tuple
    ground = ALL_N

    def __init__(self, bounds):
        bounds = tuple(int(b) for b in bounds)
        if not bounds or bounds[0] < 1 or any(b2 <= b1 for b1, b2 in zip(bounds, bounds[1:])):
            raise InvalidBlocking(f"boundaries must be strictly increasing positive naturals: {bounds}")
        object.__setattr__(self, "bounds", bounds)

    @property
    def gap(self) -> int:
        b = self.bounds
        return b[-1] - b[-2] if len(b) > 1 else b[0]

    @property
    def growth(self):
        gaps = [self.bounds[0]] + [b2 - b1 for b1, b2 in zip(self.bounds, self.bounds[1:])]
        return max(gaps)

    def boundary(self, k: int) -> int:
        if k <= 0:
            return 0
        r = len(self.bounds)
        if k <= r:
            return self.bounds[k - 1]
        return self.bounds[-1] + (k - r) * self.gap

    def piece(self, k):
        if k < 1:
            raise IndexError(k)
        return range(self.boundary(k - 1) + 1, self.boundary(k) + 1)

    def first_of(self, k):
        return self.boundary(k - 1) + 1

    def piece_of(self, n):
        if n < 1:
            return None
        if n <= self.bounds[-1]:
            return bisect.bisect_left(self.bounds, n) + 1
        return len(self.bounds) + -(-(n - self.bounds[-1]) // self.gap)

    def pieces_meeting(self, n):
        return self.piece_of(n) if n >= 1 else 0

    def to_json(self):
        return {"kind": "explicit", "bounds": list(self.bounds)}


@dataclass(frozen=True)
class Derived(Blocking):
    """A blocking of ``ground`` built from a blocking ``base`` of N.

    via="rank": D_k is the image of base piece k under the enumeration of ground.
    via="interval": D_k = ground ∩ (base piece k); every piece must be non-empty.
    """

    ground: SetExpr
    base: Blocking
    via: str = "rank"

    def __post_init__(self):
        if self.via not in ("rank", "interval"):
            raise InvalidBlocking(f"unknown derivation {self.via!r}")

    @property
    def growth(self):
        return self.base.growth

    def piece(self, k):
        if self.via == "rank":
            try:
                return [nth(self.ground, j) for j in self.base.piece(k)]
            except IndexError as exc:
                raise InvalidBlocking("ground set is finite") from exc
        out = [n for n in self.base.piece(k) if n in self.ground]
        if not out:
            raise InvalidBlocking(f"piece {k} of the interval blocking is empty")
        return out

    def first_of(self, k):
        if self.via == "rank":
            return nth(self.ground, self.base.first_of(k))
        return self.piece(k)[0]

    def piece_of(self, n):
        if n not in self.ground:
            return None
        if self.via == "rank":
            return self.base.piece_of(counting(self.ground, n))
        return self.base.piece_of(n)

    def pieces_meeting(self, n):
        if self.via == "rank":
            return self.base.pieces_meeting(counting(self.ground, n))
        return Blocking.pieces_meeting(self, n)

    def to_json(self):
        from .serde import set_to_json, blocking_to_json

        return {"kind": "derived", "ground": set_to_json(self.ground),
                "base": blocking_to_json(self.base), "via": self.via}


@dataclass(frozen=True)
class Transported(Blocking):
    """The blocking ``inner`` (whose pieces lie in ``ground``) carried to ranks:
    piece k is {rank of n in ground : n in inner piece k}."""

    inner: Blocking
    via: SetExpr

    @property
    def growth(self):
        return self.inner.growth

    def piece(self, k):
        out = [counting(self.via, n) for n in self.inner.piece(k) if n in self.via]
        if not out:
            raise InvalidBlocking(f"piece {k} lies outside the transport set")
        return out

    def first_of(self, k):
        return self.piece(k)[0]

    def piece_of(self, m):
        try:
            return self.inner.piece_of(nth(self.via, m))
        except IndexError:
            return None

    def pieces_meeting(self, m):
        return self.inner.pieces_meeting(nth(self.via, m)) if m >= 1 else 0

    def to_json(self):
        from .serde import set_to_json

        return {"kind": "transported", "inner": self.inner.to_json(), "via": set_to_json(self.via)}


def transport(b: Blocking, via: SetExpr) -> Blocking:
    """Carry a blocking of a subset of ``via`` to ranks inside ``via``."""
    if isinstance(b, Derived) and b.via == "rank" and b.ground == via:
        return b.base
    return Transported(b, via)


def make_blocking(kind="dyadic", bounds=None, ground=None, base=None, via="rank") -> Blocking:
    if kind == "dyadic":
        return Dyadic()
    if kind == "explicit":
        return ExplicitBoundaries(bounds or ())
    if kind == "derived":
        if ground is None:
            raise InvalidBlocking("derived blocking needs a ground set")
        return Derived(ground, base or Dyadic(), via)
    raise InvalidBlocking(f"unknown blocking kind {kind!r}")


def log_bound(n: int) -> int:
    """floor(log2 n) + 2: the dyadic count of pieces meeting [1, n] never exceeds it."""
    return n.bit_length() + 1
