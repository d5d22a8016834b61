"""Cantor-diagonal pairing N -> N x N used for column partitions and products.

Diagonal t holds the t naturals T(t-1)+1 .. T(t) with T(t) = t(t+1)/2; the
p-th of them sits in column p, row t-p+1.  Column 1 is {1, 2, 4, 7, 11, ...}.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt

import numpy as np


def _diag(n: int) -> int:
    return (isqrt(8 * n - 7) + 1) // 2


def pair(n: int) -> tuple[int, int]:
    """n -> (row, col), both 1-based."""
    if n < 1:
        raise ValueError("pairing is defined on n >= 1")
    t = _diag(n)
    col = n - (t - 1) * t // 2
    return t - col + 1, col


def unpair(row: int, col: int) -> int:
    t = row + col - 1
    return (t - 1) * t // 2 + col


def column(n: int) -> int:
    return pair(n)[1]


def row(n: int) -> int:
    return pair(n)[0]


def pair_arrays(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Row and column arrays for 1..n."""
    idx = np.arange(1, n + 1, dtype=np.int64)
    t = ((np.sqrt(8.0 * idx - 7.0) + 1.0) // 2).astype(np.int64)
    # float rounding guard
    t = np.where(t * (t + 1) // 2 < idx, t + 1, t)
    t = np.where((t - 1) * t // 2 >= idx, t - 1, t)
    col = idx - (t - 1) * t // 2
    return t - col + 1, col


@dataclass(frozen=True)
class ColumnPartition:
    """The partition of N into the infinite columns D_m = {n : column(n) = m}."""

    pairing: str = "cantor-diagonal"

    def __post_init__(self):
        if self.pairing != "cantor-diagonal":
            raise ValueError(f"unknown pairing {self.pairing!r}")

    def column(self, n: int) -> int:
        return column(n)

    def row(self, n: int) -> int:
        return row(n)

    def element(self, col: int, row: int) -> int:
        return unpair(row, col)

    def column_elements(self, col: int, rows: int) -> list[int]:
        return [unpair(r, col) for r in range(1, rows + 1)]

    def check_bijective(self, upto: int) -> bool:
        seen = set()
        for n in range(1, upto + 1):
            r, c = pair(n)
            if r < 1 or c < 1 or unpair(r, c) != n or (r, c) in seen:
                return False
            seen.add((r, c))
        return True

    def to_json(self):
        return {"pairing": self.pairing}


COLUMNS = ColumnPartition()


def make_columns(pairing: str = "cantor-diagonal") -> ColumnPartition:
    return ColumnPartition(pairing)
