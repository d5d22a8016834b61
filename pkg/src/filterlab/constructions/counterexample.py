"""A coordinate-wise null, weakly null but not norm null sequence for a filter
that does not respect some blocking D of a stationary set I.

For n in D_k the vector x_n is the position-of-n-th Walsh row of dimension
|D_k|, scaled so that its squared norm is 2, on a fresh block of 2^|D_k|
coordinates; x_n = 0 off I.  Any functional f of sup-norm <= 1 has
|f(x_n)| >= eps for at most 2/eps^2 indices n of each block: with
y = sum of sign(f(x_n)) x_n over those d indices, eps*d <= f(y) <= ||y|| and
||y||^2 <= 2d.  So the bad set of f has boundedly many points per piece, its
complement is in the filter, and x_n -> 0 weakly along the filter.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from ..errors import InvalidArgument, PreconditionError
from ..filters import Filter, block_respecting_check, blocking_for, filter_from_json
from ..setalg import (
    ALL_N,
    EMPTY_SET,
    Blocking,
    Complement,
    Dyadic,
    FiniteSet,
    SetExpr,
    Union,
    blocking_from_json,
    set_from_json,
)
from ..l1seq import L1Vec, SeqGen, ZERO
from ..l1seq.vector import as_fraction
from .records import Ineq
from .walsh import MAX_DIM, WalshSystem

# pieces with more elements than this are never expanded to sizes
_SIZE_LIMIT = 1 << 20


def d_max(eps) -> int:
    eps = as_fraction(eps)
    return math.ceil(2 / (eps * eps))


def _piece_size(D: Blocking, k: int) -> int:
    base = getattr(D, "base", None)
    if base is not None and getattr(D, "via", None) == "rank":
        return len(base.piece(k))
    return len(D.piece(k))


@dataclass
class BlockLayout:
    """Coordinate blocks (m_{k-1}, m_k] with m_k - m_{k-1} = 2^|D_k|."""

    I: SetExpr
    D: Blocking
    cap: int = MAX_DIM
    _sizes: list = field(default_factory=list, repr=False)
    _offsets: list = field(default_factory=lambda: [0], repr=False)

    def size(self, k: int) -> int:
        while len(self._sizes) < k:
            self._sizes.append(_piece_size(self.D, len(self._sizes) + 1))
        return self._sizes[k - 1]

    def offset(self, k: int) -> int:
        """m_{k-1}"""
        while len(self._offsets) < k:
            j = len(self._offsets)
            d = self.size(j)
            if d > _SIZE_LIMIT:
                raise InvalidArgument(f"block {j} has 2^{d} coordinates; offsets past it are not representable")
            self._offsets.append(self._offsets[-1] + (1 << d))
        return self._offsets[k - 1]

    def covered(self, k: int) -> bool:
        return self.size(k) <= self.cap

    def locate(self, n: int) -> Optional[tuple[int, int]]:
        """(block k, row position 1..|D_k|) of an index n in I, else None."""
        if n not in self.I:
            return None
        k = self.D.piece_of(n)
        piece = self.D.piece(k)
        if isinstance(piece, range):
            return k, n - piece.start + 1
        return k, list(piece).index(n) + 1

    def block_of_coord(self, c: int) -> int:
        k = 1
        while True:
            d = self.size(k)
            lo = self.offset(k)
            if d >= c.bit_length() or lo + (1 << d) >= c:
                return k
            k += 1

    def indices(self, k: int) -> list:
        return list(self.D.piece(k))

    def vector(self, n: int) -> L1Vec:
        loc = self.locate(n)
        if loc is None:
            return ZERO
        k, pos = loc
        d = self.size(k)
        if d > self.cap:
            raise InvalidArgument(
                f"x_{n} lies in block {k} of dimension {d} > {self.cap}: the demo materialises blocks of "
                f"dimension <= {self.cap} only (norms, coordinates and weak bounds stay symbolic)")
        return WalshSystem(d).vector(pos, self.offset(k))


@dataclass
class WeakConvergenceCertificate:
    eps: Fraction
    d_max: int
    derivation: list
    blocks: list = field(default_factory=list)  # per covered block validation rows
    functionals: int = 0
    seed: int = 0
    horizon: int = 0
    coverage: dict = field(default_factory=dict)
    violations: int = 0

    @property
    def ok(self) -> bool:
        return self.violations == 0 and all(r.holds() for r in self.derivation)

    @property
    def max_count(self) -> int:
        return max((b["max_count"] for b in self.blocks), default=0)

    def records(self) -> list:
        out = list(self.derivation)
        out += [Ineq(f"block {b['block']}: violations <= d_max", b["max_count"], self.d_max, "<=")
                for b in self.blocks]
        return out

    def to_json(self):
        return {"eps": str(self.eps), "dMax": self.d_max, "functionals": self.functionals, "seed": self.seed,
                "horizon": self.horizon, "violations": self.violations, "maxCount": self.max_count,
                "records": [r.to_json() for r in self.records()], "blocks": self.blocks,
                "coverage": self.coverage}


def _derivation(eps: Fraction) -> list:
    dm = d_max(eps)
    return [
        Ineq("d_max = ceil(2/eps^2) bounds every d with eps^2 d^2 <= 2d", Fraction(2) / (eps * eps), dm, "<="),
        Ineq("eps^2 * (d_max + 1) > 2, so d_max + 1 violations are impossible", eps * eps * (dm + 1), 2, ">"),
        Ineq("scaled Walsh rows: ||x_n||^2 = 2 >= 1", 2, 1, ">="),
    ]


# -- seeded test functionals on a coordinate block ---------------------------------------


FUNCTIONAL_KINDS = ("signs", "rationals", "aligned", "row", "constant")
_Q = 16  # common denominator of rational functional values


def _functional_block(kind: str, rng: random.Random, d: int) -> tuple[np.ndarray, int]:
    """Integer numerators w (|w_j| <= Q) and denominator Q of f on one block."""
    L = 1 << d
    if kind == "signs":
        return np.array([rng.choice((-1, 1)) for _ in range(L)], dtype=np.int64), 1
    if kind == "rationals":
        return np.array([rng.randint(-_Q, _Q) for _ in range(L)], dtype=np.int64), _Q
    if kind == "constant":
        return np.ones(L, dtype=np.int64), 1
    j = np.arange(L, dtype=np.int64)
    rows = 1 - 2 * ((j[None, :] >> np.arange(d, dtype=np.int64)[:, None]) & 1)
    if kind == "row":
        return rows[rng.randrange(d)].copy(), 1
    # aligned: sign of a random +-1 combination of a random subset of rows
    s = rng.randint(1, d)
    picked = rng.sample(range(d), s)
    comb = sum(rng.choice((-1, 1)) * rows[i] for i in picked)
    return np.sign(comb).astype(np.int64), 1


def _rows(d: int) -> np.ndarray:
    j = np.arange(1 << d, dtype=np.int64)
    return 1 - 2 * ((j[None, :] >> np.arange(d, dtype=np.int64)[:, None]) & 1)


def validate_weak_bound(layout: BlockLayout, eps, functionals: int = 200, seed: int = 0,
                        horizon: int = 1 << 16) -> WeakConvergenceCertificate:
    """Count |{n in D_k : |f(x_n)| >= eps}| for seeded functionals f of sup-norm <= 1
    on every covered block meeting [1, horizon], exactly."""
    eps = as_fraction(eps)
    dm = d_max(eps)
    cert = WeakConvergenceCertificate(eps, dm, _derivation(eps), functionals=functionals, seed=seed, horizon=horizon)
    covered, uncovered = [], []
    kmax = layout.D.pieces_meeting(horizon)
    for k in range(1, kmax + 1):
        (covered if layout.covered(k) else uncovered).append(k)
    p2, q2 = eps.numerator ** 2, eps.denominator ** 2
    for k in covered:
        d = layout.size(k)
        R = _rows(d)
        worst, worst_kind = 0, None
        for i in range(functionals):
            kind = FUNCTIONAL_KINDS[i % len(FUNCTIONAL_KINDS)]
            rng = random.Random(f"{seed}:{i}:{k}")
            w, Q = _functional_block(kind, rng, d)
            T = (R @ w).tolist()
            # |f(x_n)| = |T_n| / (Q * 2^(d-1) * sqrt 2) >= eps, squared and cleared
            rhs = 2 * p2 * Q * Q * (1 << (2 * (d - 1)))
            cnt = sum(1 for t in T if t * t * q2 >= rhs)
            if cnt > worst:
                worst, worst_kind = cnt, kind
        lo = layout.offset(k)
        cert.blocks.append({"block": k, "dimension": d, "coords": [lo, lo + (1 << d)], "max_count": worst,
                            "worst_kind": worst_kind})
        if worst > dm:
            cert.violations += 1
    last = covered[-1] if covered else 0
    cert.coverage = {
        "covered_blocks": covered,
        "uncovered_blocks": uncovered,
        "covered_indices_upto": layout.D.piece(last)[-1] if covered else 0,
        "coordinates_covered": layout.offset(last + 1) if covered else 0,
        "note": (f"blocks of dimension > {layout.cap} are not materialised; for them the bound rests on "
                 "the derivation alone" if uncovered else "every block meeting the horizon is covered"),
    }
    return cert


# -- the sequence ------------------------------------------------------------------------


def _hooks(layout: BlockLayout):
    I = layout.I

    def norm(x, eps):
        if not x.is_zero():
            return None
        return I if eps * eps <= 2 else EMPTY_SET

    def coord(c, xc, eps):
        k = layout.block_of_coord(c)
        d = layout.size(k)
        if d > _SIZE_LIMIT:
            return None
        idx = FiniteSet(frozenset(layout.indices(k)))
        mag = Fraction(1, 1 << (d - 1))
        if xc == 0:
            # |x_n(c)|^2 = mag^2 / 2 for every n of the block
            return idx if mag * mag >= 2 * eps * eps else EMPTY_SET
        from ..convergence import _far  # exact comparison with the 1/sqrt2 factor

        off = Complement(idx) if abs(xc) >= eps else EMPTY_SET
        j = c - layout.offset(k) - 1
        hit = [n for pos, n in enumerate(layout.indices(k), 1)
               if _far(mag * WalshSystem(d).sign(pos, j), True, xc, eps)]
        parts = [s for s in (off, FiniteSet(frozenset(hit))) if s != EMPTY_SET]
        return EMPTY_SET if not parts else parts[0] if len(parts) == 1 else Union(parts)

    def weak_block_bound(eps):
        return {"blocking": layout.D, "ground": I, "per_block": d_max(eps),
                "derivation": [r.to_json() for r in _derivation(as_fraction(eps))]}

    return {"norm": norm, "coord": coord, "weak_block_bound": weak_block_bound}


def _materialised_upto(layout: BlockLayout, scan: int = 64) -> Optional[int]:
    """Largest index before the first block that is too large to materialise."""
    for k in range(1, scan + 1):
        if not layout.covered(k):
            return layout.D.first_of(k) - 1
    return None


def build_block_counterexample(F: Filter, I: SetExpr = ALL_N, D: Optional[Blocking] = None, eps=Fraction(1, 2),
                               horizon: int = 1 << 16, cap: int = MAX_DIM, functionals: int = 200,
                               seed: int = 0):
    """(sequence, weak-convergence certificate); the certificate is validated
    on ``functionals`` seeded functionals unless that is 0."""
    eps = as_fraction(eps)
    if eps <= 0:
        raise InvalidArgument("eps must be positive")
    if not 1 <= cap <= MAX_DIM:
        raise InvalidArgument(f"dimension cap must be in 1..{MAX_DIM}")
    D = blocking_for(I, D or Dyadic())
    br = block_respecting_check(F, I, D, horizon)
    if not br.refuted:
        raise PreconditionError(
            f"block_respecting_check is {br.status}: the filter is not shown to ignore bounded selectors of this "
            "blocking, so no counterexample can be certified")
    layout = BlockLayout(I, D, cap)
    seq = SeqGen(layout.vector, "vector", "walsh_counterexample",
                 "Walsh rows of dimension |D_k| on fresh coordinate blocks; zero off I",
                 params={"filter": F, "ground": I, "blocking": D, "eps": eps, "cap": cap},
                 bound=Fraction(3, 2), hooks=_hooks(layout), max_index=_materialised_upto(layout))
    object.__setattr__(seq, "layout", layout)
    if functionals:
        cert = validate_weak_bound(layout, eps, functionals, seed, horizon)
    else:
        cert = WeakConvergenceCertificate(eps, d_max(eps), _derivation(eps), horizon=horizon)
    cert.coverage.setdefault("block_respecting", br.status)
    return seq, cert


def walsh_counterexample_from_json(d, where: str = "$") -> SeqGen:
    F = filter_from_json(d.get("filter", "statistical"), where + ".filter")
    I = set_from_json(d["ground"], where + ".ground") if "ground" in d else ALL_N
    D = blocking_from_json(d["blocking"]) if "blocking" in d else None
    seq, _ = build_block_counterexample(F, I, D, Fraction(d.get("eps", "1/2")), cap=int(d.get("cap", MAX_DIM)),
                                        functionals=0)
    return seq


__all__ = ["BlockLayout", "WeakConvergenceCertificate", "build_block_counterexample", "validate_weak_bound",
           "walsh_counterexample_from_json", "d_max", "FUNCTIONAL_KINDS"]
