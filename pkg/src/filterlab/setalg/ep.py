"""Eventually periodic subsets of N = {1, 2, ...}.

A set is stored as a finite prefix of membership bits (for n = 1..p) followed
by a non-empty period word that repeats forever.  This is the normal form the
rest of the set algebra reduces to whenever it can.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator

import numpy as np


def _check_bits(word: str, name: str) -> None:
    if any(ch not in "01" for ch in word):
        raise ValueError(f"{name} must be a bit string, got {word!r}")


@dataclass(frozen=True)
class EP:
    prefix: str
    period: str

    def __post_init__(self):
        _check_bits(self.prefix, "prefix")
        _check_bits(self.period, "period")
        if not self.period:
            raise ValueError("period word must be non-empty")

    # -- membership / counting -------------------------------------------------

    def bit(self, n: int) -> bool:
        if n < 1:
            return False
        p = len(self.prefix)
        if n <= p:
            return self.prefix[n - 1] == "1"
        return self.period[(n - 1 - p) % len(self.period)] == "1"

    __contains__ = bit

    def count(self, n: int) -> int:
        """|S ∩ [1, n]|."""
        if n <= 0:
            return 0
        p = len(self.prefix)
        if n <= p:
            return self.prefix[:n].count("1")
        L = len(self.period)
        full, rest = divmod(n - p, L)
        return self.prefix.count("1") + full * self.period.count("1") + self.period[:rest].count("1")

    def nth(self, k: int) -> int:
        """The k-th smallest element (k >= 1)."""
        if k < 1:
            raise ValueError("k must be >= 1")
        ones_prefix = self.prefix.count("1")
        if k <= ones_prefix:
            seen = 0
            for i, ch in enumerate(self.prefix, start=1):
                if ch == "1":
                    seen += 1
                    if seen == k:
                        return i
        q = self.period.count("1")
        if q == 0:
            raise IndexError("finite set has fewer than k elements")
        k -= ones_prefix
        full, rem = divmod(k - 1, q)
        offsets = [i for i, ch in enumerate(self.period) if ch == "1"]
        return len(self.prefix) + full * len(self.period) + offsets[rem] + 1

    def iter_elements(self) -> Iterator[int]:
        for i, ch in enumerate(self.prefix, start=1):
            if ch == "1":
                yield i
        offsets = [i for i, ch in enumerate(self.period) if ch == "1"]
        if not offsets:
            return
        base = len(self.prefix)
        L = len(self.period)
        while True:
            for o in offsets:
                yield base + o + 1
            base += L

    def mask(self, n: int) -> np.ndarray:
        """Boolean membership array for 1..n (index 0 is n = 1)."""
        out = np.zeros(n, dtype=bool)
        if n <= 0:
            return out
        p = len(self.prefix)
        head = np.frombuffer(self.prefix.encode(), dtype=np.uint8)[: min(p, n)] == ord("1")
        out[: head.size] = head
        if n > p:
            per = np.frombuffer(self.period.encode(), dtype=np.uint8) == ord("1")
            reps = (n - p) // per.size + 1
            out[p:] = np.tile(per, reps)[: n - p]
        return out

    # -- structure ---------------------------------------------------------------

    def is_finite(self) -> bool:
        return "1" not in self.period

    def is_cofinite(self) -> bool:
        return "0" not in self.period

    def is_empty(self) -> bool:
        return self.is_finite() and "1" not in self.prefix

    def density(self) -> Fraction:
        return Fraction(self.period.count("1"), len(self.period))

    def elements(self) -> list[int]:
        if not self.is_finite():
            raise ValueError("set is infinite")
        return [i for i, ch in enumerate(self.prefix, start=1) if ch == "1"]

    def complement(self) -> "EP":
        flip = str.maketrans("01", "10")
        return EP(self.prefix.translate(flip), self.period.translate(flip))

    def expanded(self, p: int, L: int) -> tuple[str, str]:
        """Bits re-expressed with prefix length p >= len(prefix) and period L (a multiple)."""
        pre = "".join("1" if self.bit(n) else "0" for n in range(1, p + 1))
        per = "".join("1" if self.bit(n) else "0" for n in range(p + 1, p + L + 1))
        return pre, per

    def combine(self, other: "EP", op: Callable[[bool, bool], bool]) -> "EP":
        p = max(len(self.prefix), len(other.prefix))
        L = math.lcm(len(self.period), len(other.period))
        a_pre, a_per = self.expanded(p, L)
        b_pre, b_per = other.expanded(p, L)
        pre = "".join("1" if op(x == "1", y == "1") else "0" for x, y in zip(a_pre, b_pre))
        per = "".join("1" if op(x == "1", y == "1") else "0" for x, y in zip(a_per, b_per))
        return EP(pre, per).minimized()

    def union(self, other: "EP") -> "EP":
        return self.combine(other, lambda x, y: x or y)

    def intersection(self, other: "EP") -> "EP":
        return self.combine(other, lambda x, y: x and y)

    def difference(self, other: "EP") -> "EP":
        return self.combine(other, lambda x, y: x and not y)

    def minimized(self) -> "EP":
        per = self.period
        L = len(per)
        for d in range(1, L + 1):
            if L % d == 0 and per[:d] * (L // d) == per:
                per = per[:d]
                break
        pre = self.prefix
        # rotate the period backwards into the prefix while the bits agree
        while pre and pre[-1] == per[-1]:
            pre = pre[:-1]
            per = per[-1] + per[:-1]
        return EP(pre, per)

    # -- transport through an enumeration -----------------------------------------

    def pullback(self, ground: "EP") -> "EP":
        """{k : ground.nth(k) ∈ self}; ground must be infinite."""
        if ground.is_finite():
            elems = ground.elements()
            return EP("".join("1" if self.bit(g) else "0" for g in elems), "0").minimized()
        q = ground.period.count("1")
        k0 = ground.count(max(len(ground.prefix), len(self.prefix)))
        total = k0 + q * len(self.period)
        bits = []
        it = ground.iter_elements()
        for _ in range(total):
            bits.append("1" if self.bit(next(it)) else "0")
        return EP("".join(bits[:k0]), "".join(bits[k0:])).minimized()

    def pushforward(self, ground: "EP") -> "EP":
        """{ground.nth(k) : k ∈ self} = {n ∈ ground : rank(n) ∈ self}."""
        if ground.is_finite():
            elems = ground.elements()
            keep = [g for r, g in enumerate(elems, start=1) if self.bit(r)]
            top = max(keep, default=0)
            return EP("".join("1" if n in set(keep) else "0" for n in range(1, top + 1)), "0").minimized()
        ps = len(self.prefix)
        n0 = len(ground.prefix)
        if ps > 0:
            n0 = max(n0, ground.nth(ps))
        total = n0 + len(ground.period) * len(self.period)
        bits = []
        rank = 0
        for n in range(1, total + 1):
            if ground.bit(n):
                rank += 1
                bits.append("1" if self.bit(rank) else "0")
            else:
                bits.append("0")
        return EP("".join(bits[:n0]), "".join(bits[n0:])).minimized()


EMPTY = EP("", "0")
ALL = EP("", "1")


def ep_finite(elems) -> EP:
    elems = sorted(set(int(e) for e in elems if int(e) >= 1))
    if not elems:
        return EMPTY
    s = set(elems)
    return EP("".join("1" if n in s else "0" for n in range(1, elems[-1] + 1)), "0").minimized()


def ep_progression(first: int, step: int) -> EP:
    """{first + k*step : k >= 0} ∩ N."""
    if step < 1:
        raise ValueError("step must be a positive natural")
    if first >= 1:
        return EP("0" * (first - 1), "1" + "0" * (step - 1)).minimized()
    return EP("", "".join("1" if (n - first) % step == 0 else "0" for n in range(1, step + 1))).minimized()
