"""A sign functional that makes a block-dominated system oscillate inside
every column: f(z_n) = a_n ||z_n|| with a_n = +-1 taking both values
infinitely often in each column."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Union

from ..errors import InvalidArgument
from ..setalg.pairing import pair
from ..l1seq import BlockSigns, L1Vec
from .perturbation import _check_blocks
from .records import Ineq


def alternating_rows(n: int) -> int:
    """a_n = (-1)^(row of n): both signs infinitely often in every column."""
    return 1 if pair(n)[0] % 2 == 0 else -1


@dataclass
class OscillationReport:
    columns: list = field(default_factory=list)
    records: list = field(default_factory=list)
    refutes: bool = False

    def oscillation(self, col: int) -> Fraction:
        for row in self.columns:
            if row["column"] == col:
                return row["oscillation"]
        raise KeyError(col)

    def to_json(self):
        return {"refutesWeakConvergence": self.refutes,
                "columns": [{k: (str(v) if isinstance(v, Fraction) else v) for k, v in r.items()}
                            for r in self.columns],
                "records": [r.to_json() for r in self.records]}


def oscillation_functional(z: Mapping[int, L1Vec], blocks: Mapping[int, tuple],
                           signs: Union[Callable[[int], int], Mapping[int, int]] = alternating_rows):
    """(functional, report).  ``z`` and ``blocks`` are keyed by index n; each
    z_n must live on its coordinate block (lo, hi], and blocks must be disjoint."""
    if set(z) != set(blocks):
        raise InvalidArgument("one coordinate block per vector is required")
    sign = signs if callable(signs) else signs.__getitem__
    keys = sorted(z)
    _check_blocks([blocks[n] for n in keys])
    per = {}
    for n in keys:
        lo, hi = blocks[n]
        v = z[n]
        if v.sqrt_half:
            raise InvalidArgument("scaled vectors are not supported here")
        if any(not lo < k <= hi for k in v.support):
            raise InvalidArgument(f"z_{n} leaves its block ({lo}, {hi}]")
        a = sign(n)
        if a not in (1, -1):
            raise InvalidArgument(f"sign a_{n} must be +1 or -1")
        for k, c in v.items:
            per[k] = Fraction(a if c > 0 else -a)
    f = BlockSigns(per_coord=per)
    report = OscillationReport()
    by_col: dict = {}
    for n in keys:
        by_col.setdefault(pair(n)[1], []).append(n)
    refutes, seen = True, False
    for col in sorted(by_col):
        vals, norms, signs_seen = [], [], set()
        for n in by_col[col]:
            fz = f(z[n])
            nz = z[n].norm1()
            report.records.append(Ineq(f"f(z_{n}) = a_{n} ||z_{n}||", fz, sign(n) * nz, "=="))
            vals.append(fz)
            norms.append(nz)
            signs_seen.add(sign(n))
        osc = max(vals) - min(vals)
        bound = 2 * min(norms)
        both = signs_seen == {1, -1}
        report.columns.append({"column": col, "count": len(vals), "max": max(vals), "min": min(vals),
                               "oscillation": osc, "bound": bound, "both_signs": both})
        if both:
            report.records.append(Ineq(f"column {col}: oscillation >= 2 inf ||z_n||", osc, bound, ">="))
        if len(vals) < 2:
            continue  # a lone entry says nothing about oscillation
        seen = True
        refutes = refutes and both and osc >= bound > 0
    report.refutes = refutes and seen
    return f, report


__all__ = ["oscillation_functional", "OscillationReport", "alternating_rows"]
