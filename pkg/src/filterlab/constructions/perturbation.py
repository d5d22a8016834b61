"""Small perturbations of a block basis.

If ||y_n|| >= eps0 > eps and ||y_n - z_n|| < eps/2, where z_n is y_n cut down
to its own coordinate block, then for all scalars

    c1 * sum |a_n| ||y_n||  <=  ||sum a_n y_n||  <=  sum |a_n| ||y_n||

with c1 = 1 - eps/eps0.  The lower bound follows from
||sum a_n z_n|| = sum |a_n| ||z_n|| and ||z_n|| >= ||y_n|| - ||y_n - z_n||.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from ..errors import InvalidArgument, PreconditionError
from ..l1seq import L1Vec
from ..l1seq.vector import as_fraction
from .records import Ineq


@dataclass
class PerturbationReport:
    c1: Fraction
    eps: Fraction
    eps0: Fraction
    samples: int
    seed: int
    worst_ratio: Optional[Fraction]
    violations: int
    max_perturbation: Fraction
    records: list = field(default_factory=list)
    note: str = ("c1 = 1 - eps/eps0 is the constant the triangle-inequality chain yields; "
                 "the reciprocal form eps0/eps would make c1 negative")

    @property
    def ok(self) -> bool:
        return self.violations == 0 and all(r.holds() for r in self.records)

    def to_json(self):
        return {"c1": str(self.c1), "eps": str(self.eps), "eps0": str(self.eps0), "samples": self.samples,
                "seed": self.seed, "worstRatio": None if self.worst_ratio is None else str(self.worst_ratio),
                "violations": self.violations, "maxPerturbation": str(self.max_perturbation),
                "records": [r.to_json() for r in self.records], "note": self.note}


def _check_blocks(blocks):
    out = [(int(lo), int(hi)) for lo, hi in blocks]
    order = sorted(range(len(out)), key=lambda i: out[i][0])
    for a, b in zip(order, order[1:]):
        if out[b][0] < out[a][1]:
            raise InvalidArgument(f"coordinate blocks {a} and {b} overlap")
    for i, (lo, hi) in enumerate(out):
        if hi < lo or lo < 0:
            raise InvalidArgument(f"block {i} = ({lo}, {hi}] is malformed")
    return out


def coefficient_samples(n: int, samples: int, seed: int):
    """Seeded rational coefficient vectors: a few extremal ones, then random
    dense and sparse vectors."""
    rng = random.Random(seed)
    fixed = []
    if n:
        fixed.append([Fraction(1)] * n)
        fixed.append([Fraction((-1) ** i) for i in range(n)])
        fixed.extend([Fraction(int(i == j)) for i in range(n)] for j in range(min(n, 8)))
    out = fixed[:samples]
    while len(out) < samples:
        if rng.random() < 0.5:
            a = [Fraction(rng.randint(-20, 20), rng.randint(1, 12)) for _ in range(n)]
        else:
            a = [Fraction(0)] * n
            for i in rng.sample(range(n), k=min(n, rng.randint(1, 3))):
                a[i] = Fraction(rng.choice([-1, 1]) * rng.randint(1, 30), rng.randint(1, 7))
        out.append(a)
    return out


def _norm_of_combination(a, ys) -> Fraction:
    acc: dict[int, Fraction] = {}
    for c, y in zip(a, ys):
        if c:
            for k, v in y.items:
                acc[k] = acc.get(k, Fraction(0)) + c * v
    return sum((abs(v) for v in acc.values()), Fraction(0))


def perturbation_check(y: Sequence[L1Vec], blocks, eps, eps0=None, samples: int = 1000,
                       seed: int = 0) -> PerturbationReport:
    if not y:
        raise InvalidArgument("need at least one vector")
    if len(blocks) != len(y):
        raise InvalidArgument("one coordinate block per vector is required")
    if any(v.sqrt_half for v in y):
        raise InvalidArgument("perturbation_check works on unscaled vectors")
    eps = as_fraction(eps)
    blocks = _check_blocks(blocks)
    norms = [v.norm1() for v in y]
    inf_norm = min(norms)
    eps0 = inf_norm if eps0 is None else as_fraction(eps0)
    if eps0 > inf_norm:
        i = norms.index(inf_norm)
        raise PreconditionError(f"||y_{i}|| = {inf_norm} is below eps0 = {eps0}", index=i)
    if not 0 < eps < eps0:
        raise PreconditionError(f"need 0 < eps < eps0, got eps = {eps}, eps0 = {eps0}")
    records = [Ineq("eps < eps0", eps, eps0, "<")]
    perts = []
    for i, (v, (lo, hi)) in enumerate(zip(y, blocks)):
        p = v.norm1() - v.restrict(lo, hi).norm1()
        perts.append(p)
        if not p < eps / 2:
            raise PreconditionError(f"||y_{i} - z_{i}|| = {p} is not below eps/2 = {eps / 2}", index=i)
        records.append(Ineq(f"||y_{i} - z_{i}|| < eps/2", p, eps / 2, "<"))
    c1 = 1 - eps / eps0
    worst, bad = None, 0
    for a in coefficient_samples(len(y), samples, seed):
        scale = sum((abs(c) * nv for c, nv in zip(a, norms)), Fraction(0))
        if scale == 0:
            continue
        val = _norm_of_combination(a, y)
        if not (c1 * scale <= val <= scale):
            bad += 1
        r = val / scale
        if worst is None or r < worst:
            worst = r
    if worst is not None:
        records.append(Ineq("c1 <= worst sampled ratio", c1, worst, "<="))
    return PerturbationReport(c1, eps, eps0, samples, seed, worst, bad, max(perts), records)
