"""Finitely supported vectors in l1 with exact rational coordinates.

A vector may carry the symbolic factor 1/sqrt(2) (``sqrt_half``).  Norms of
such vectors are only available squared, which keeps every comparison
rational.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from ..errors import InvalidArgument


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise InvalidArgument("floats are not accepted as exact coordinates; pass a Fraction or a 'p/q' string")
    return Fraction(x)


@dataclass(frozen=True)
class L1Vec:
    items: tuple = ()  # sorted (index, nonzero Fraction) pairs
    sqrt_half: bool = False

    @classmethod
    def of(cls, coords: Mapping[int, object] | Iterable = (), sqrt_half: bool = False) -> "L1Vec":
        pairs = coords.items() if isinstance(coords, Mapping) else coords
        acc: dict[int, Fraction] = {}
        for k, c in pairs:
            k = int(k)
            if k < 1:
                raise InvalidArgument(f"coordinate index must be >= 1, got {k}")
            acc[k] = acc.get(k, Fraction(0)) + as_fraction(c)
        return cls(tuple(sorted((k, c) for k, c in acc.items() if c != 0)), sqrt_half)

    @classmethod
    def unit(cls, k: int, c=1) -> "L1Vec":
        return cls.of({k: c})

    @property
    def coords(self) -> dict[int, Fraction]:
        return dict(self.items)

    @property
    def support(self) -> list[int]:
        return [k for k, _ in self.items]

    def coord(self, k: int) -> Fraction:
        """Stored coordinate (before the 1/sqrt(2) factor)."""
        for j, c in self.items:
            if j == k:
                return c
        return Fraction(0)

    def _plain(self, what: str):
        if self.sqrt_half:
            raise InvalidArgument(f"{what} of a 1/sqrt(2)-scaled vector is irrational; use the squared form")

    def mass(self) -> Fraction:
        """Sum of |stored coordinates| (norm before scaling)."""
        return sum((abs(c) for _, c in self.items), Fraction(0))

    def norm1(self) -> Fraction:
        self._plain("norm1")
        return self.mass()

    def norm1_sq(self) -> Fraction:
        m = self.mass() ** 2
        return m / 2 if self.sqrt_half else m

    def head_mass(self, m: int) -> Fraction:
        """sum over k <= m of |x_k|"""
        self._plain("head_mass")
        return sum((abs(c) for k, c in self.items if k <= m), Fraction(0))

    def tail_mass(self, m: int) -> Fraction:
        """sum over k >= m of |x_k|"""
        self._plain("tail_mass")
        return sum((abs(c) for k, c in self.items if k >= m), Fraction(0))

    def restrict(self, lo: int, hi: int) -> "L1Vec":
        """Coordinates in the interval (lo, hi]."""
        return L1Vec(tuple((k, c) for k, c in self.items if lo < k <= hi), self.sqrt_half)

    def _same_scale(self, other: "L1Vec"):
        if self.sqrt_half != other.sqrt_half and self.items and other.items:
            raise InvalidArgument("cannot add vectors with different symbolic scales")
        return self.sqrt_half if self.items else other.sqrt_half

    def __add__(self, other: "L1Vec") -> "L1Vec":
        flag = self._same_scale(other)
        return L1Vec.of(list(self.items) + list(other.items), flag)

    def __sub__(self, other: "L1Vec") -> "L1Vec":
        return self + other.scale(-1)

    def __neg__(self) -> "L1Vec":
        return self.scale(-1)

    def scale(self, a) -> "L1Vec":
        a = as_fraction(a)
        if a == 0:
            return L1Vec((), self.sqrt_half)
        return L1Vec(tuple((k, a * c) for k, c in self.items), self.sqrt_half)

    __mul__ = scale
    __rmul__ = scale

    def is_zero(self) -> bool:
        return not self.items

    def max_index(self) -> int:
        return self.items[-1][0] if self.items else 0

    def to_json(self):
        return {"coords": {str(k): str(c) for k, c in self.items}, "scaleSqrtHalf": self.sqrt_half}

    @classmethod
    def from_json(cls, d) -> "L1Vec":
        if not isinstance(d, dict) or "coords" not in d:
            raise InvalidArgument("vector JSON needs a 'coords' object")
        return cls.of({int(k): Fraction(v) for k, v in d["coords"].items()}, bool(d.get("scaleSqrtHalf", False)))


ZERO = L1Vec()


def norm1(v: L1Vec) -> Fraction:
    return v.norm1()


def coord(v: L1Vec, k: int) -> Fraction:
    return v.coord(k)


def head_mass(v: L1Vec, m: int) -> Fraction:
    return v.head_mass(m)


def tail_mass(v: L1Vec, m: int) -> Fraction:
    return v.tail_mass(m)


def linear_combination(coeffs, vecs) -> L1Vec:
    """sum a_i v_i, exact."""
    pairs = []
    flags = set()
    for a, v in zip(coeffs, vecs):
        a = as_fraction(a)
        if a == 0 or v.is_zero():
            continue
        flags.add(v.sqrt_half)
        pairs.extend((k, a * c) for k, c in v.items)
    if len(flags) > 1:
        raise InvalidArgument("cannot combine vectors with different symbolic scales")
    return L1Vec.of(pairs, flags.pop() if flags else False)
