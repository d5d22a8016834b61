"""Rademacher (bit-indexed Walsh) rows as an almost Euclidean block.

Row n of the d x 2^d matrix has entry 1 - 2*bit_{n-1}(j) in column j.  For
a in R^d the l1 norm of sum a_n r_n is S(a) = sum_j |<a, sigma_j>| over all
2^d sign patterns, and the L1 Khintchine inequality with its sharp constant
gives 2^(2d-1) |a|^2 <= S(a)^2 <= 2^(2d) |a|^2.  Scaling the rows by
s = 2^(d-1) * sqrt(2) turns this into |a|^2 <= ||sum a_n x_n||^2 <= 2 |a|^2.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ..errors import InvalidArgument
from ..l1seq import L1Vec
from .records import Ineq

MAX_DIM = 16


def ell1_of_combination(a_int: np.ndarray) -> np.ndarray:
    """S(a) for each row of an integer matrix (samples x d), exactly."""
    a_int = np.atleast_2d(np.asarray(a_int, dtype=np.int64))
    vals = np.zeros((a_int.shape[0], 1), dtype=np.int64)
    for i in range(a_int.shape[1]):
        col = a_int[:, i : i + 1]
        vals = np.concatenate([vals + col, vals - col], axis=1)
    return np.abs(vals).sum(axis=1)


def _integerize(a):
    den = math.lcm(*(Fraction(x).denominator for x in a)) if len(a) else 1
    return [int(Fraction(x) * den) for x in a]


@dataclass
class WalshSystem:
    d: int
    records: list = field(default_factory=list)
    samples: int = 0
    symbolic: bool = False

    @property
    def length(self) -> int:
        return 1 << self.d

    @property
    def scale_sq(self) -> int:
        return 1 << (2 * self.d - 1)

    def sign(self, n: int, j: int) -> int:
        """Entry of row n (1-based) in column j (0-based)."""
        return 1 - 2 * ((j >> (n - 1)) & 1)

    def row(self, n: int) -> np.ndarray:
        return _row(self.d, n)

    def vector(self, n: int, offset: int = 0) -> L1Vec:
        """Row n scaled by 1/s and placed on coordinates offset+1 .. offset+2^d."""
        if not 1 <= n <= self.d:
            raise InvalidArgument(f"row {n} out of range 1..{self.d}")
        c = Fraction(1, 1 << (self.d - 1))
        r = self.row(n)
        return L1Vec(tuple((offset + j + 1, c if r[j] > 0 else -c) for j in range(self.length)), True)

    def bounds(self, a) -> tuple[int, int, int]:
        """(lower, S^2, upper) for an integer coefficient vector."""
        s = int(ell1_of_combination(np.array([a]))[0])
        q = sum(x * x for x in a)
        return (1 << (2 * self.d - 1)) * q, s * s, (1 << (2 * self.d)) * q

    def to_json(self):
        return {"d": self.d, "length": self.length, "scaleSquared": self.scale_sq, "samples": self.samples,
                "symbolic": self.symbolic, "records": [r.to_json() for r in self.records]}


@lru_cache(maxsize=64)
def _row(d: int, n: int) -> np.ndarray:
    j = np.arange(1 << d, dtype=np.int64)
    r = 1 - 2 * ((j >> (n - 1)) & 1)
    r.setflags(write=False)
    return r


def _symbolic_records(d: int) -> list:
    """d <= 2: S(a) has a closed form, and the bounds reduce to identities."""
    if d == 1:
        return [Ineq("d=1: S(a) = 2|a1|, S^2 = 4 a1^2; 2 a1^2 <= 4 a1^2 <= 4 a1^2", 0, 0, "==")]
    # S = 2(|u| + |v|), u = a1 + a2, v = a1 - a2; (|u| + |v|)^2 = 2(a1^2 + a2^2) + 2|a1^2 - a2^2|
    return [Ineq("d=2: S(a) = 2(|a1+a2| + |a1-a2|); (|u|+|v|)^2 - 2(u^2+v^2)/2 = 2|a1^2-a2^2| >= 0", 0, 0, "=="),
            Ineq("d=2: (|u|+|v|)^2 <= 2(u^2+v^2) = 4(a1^2+a2^2)", 0, 0, "==")]


def walsh_system(d: int, samples: int = 1000, seed: int = 0) -> WalshSystem:
    """The system with its bounds checked exactly on the extremal vectors and on
    ``samples`` seeded rational coefficient vectors."""
    if not isinstance(d, int) or not 1 <= d <= MAX_DIM:
        raise InvalidArgument(f"dimension must be in 1..{MAX_DIM} (the block has 2^d coordinates), got {d}")
    ws = WalshSystem(d, samples=samples, symbolic=d <= 2)
    rec = ws.records
    # every row has squared scaled norm 2
    rec.append(Ineq("row norm squared after scaling", Fraction((1 << d) ** 2, ws.scale_sq), 2, "=="))
    extremal = [("all-ones", [1] * d)] + [(f"unit {i + 1}", [int(i == j) for j in range(d)]) for i in range(d)]
    for name, a in extremal:
        lo, s2, hi = ws.bounds(a)
        rec.append(Ineq(f"lower bound at {name}", lo, s2, "<="))
        rec.append(Ineq(f"upper bound at {name}", s2, hi, "<="))
    if d <= 2:
        rec.extend(_symbolic_records(d))
    rng = random.Random(f"walsh-{seed}-{d}")
    batch = max(1, (1 << 22) >> d)
    worst_lo = worst_hi = None
    fails = 0
    done = 0
    while done < samples:
        k = min(batch, samples - done)
        rows = []
        for _ in range(k):
            a = [Fraction(rng.randint(-50, 50), rng.randint(1, 12)) for _ in range(d)]
            if not any(a):
                a[0] = Fraction(1)
            rows.append(_integerize(a))
        S = ell1_of_combination(np.array(rows, dtype=np.int64))
        for a, s in zip(rows, S.tolist()):
            q = sum(x * x for x in a)
            lo, hi = (1 << (2 * d - 1)) * q, (1 << (2 * d)) * q
            s2 = s * s
            if not lo <= s2 <= hi:
                fails += 1
            r_lo, r_hi = Fraction(s2, lo), Fraction(s2, hi)
            worst_lo = r_lo if worst_lo is None else min(worst_lo, r_lo)
            worst_hi = r_hi if worst_hi is None else max(worst_hi, r_hi)
        done += k
    if samples:
        rec.append(Ineq("sampled violations", fails, 0, "=="))
        rec.append(Ineq("min sampled S^2 / lower bound", 1, worst_lo, "<="))
        rec.append(Ineq("max sampled S^2 / upper bound", worst_hi, 1, "<="))
    return ws
