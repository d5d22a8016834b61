"""Filter limits of sequences, the stationary-set refuter, almost-Schur checks
and the statistical versus strong Cesàro comparison.

A sequence converges to x along F when, for every eps > 0, the good set
G = {n : x_n is eps-close to x} belongs to F.  When the sequence can describe
its bad set {n : not close} symbolically the question is handed to the
filter's decision procedure; otherwise only horizon evidence is reported and
the verdict stays Consistent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidArgument
from .filters import Filter
from .filters.handles import DEFAULT_HORIZON, EVIDENCE_CAP
from .setalg import SetExpr, complement_of
from .l1seq import L1Vec, SeqGen, TestFunctional, ZERO
from .l1seq.vector import as_fraction
from .verdict import Verdict, all_of, consistent, proved, refuted

MODES = ("scalar", "coord", "weak", "norm")
DEFAULT_COORDS = 16
# exact Fraction sums over non-constant scalar rules stop here
DIRECT_CAP = 1 << 12


@dataclass
class ConvergenceQuery:
    filter: Filter
    seq: SeqGen
    limit: object = Fraction(0)  # L1Vec for vector sequences
    mode: str = "scalar"
    eps: Fraction = Fraction(1, 2)
    horizon: int = DEFAULT_HORIZON
    family: Sequence[TestFunctional] = ()
    coords: Optional[Sequence[int]] = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidArgument(f"mode must be one of {', '.join(MODES)}")
        self.eps = as_fraction(self.eps)
        if self.eps <= 0:
            raise InvalidArgument("eps must be positive")
        if self.horizon < 1:
            raise InvalidArgument("horizon must be positive")
        if self.mode == "weak" and not self.family:
            raise InvalidArgument("weak mode needs a non-empty functional family")
        if (self.mode == "scalar") != self.seq.is_scalar:
            raise InvalidArgument(f"{self.mode} mode does not fit a {self.seq.kind} sequence")
        if self.seq.is_scalar:
            self.limit = as_fraction(self.limit)
        elif not isinstance(self.limit, L1Vec):
            if self.limit != 0:
                raise InvalidArgument("vector limits must be given as L1Vec")
            self.limit = ZERO
        if self.mode == "coord":
            ks = self.coords or range(1, DEFAULT_COORDS + 1)
            self.coords = sorted(set(int(k) for k in ks) | set(self.limit.support))


# -- exact comparisons --------------------------------------------------------------


def _scaled_ge(c: Fraction, t: Fraction) -> bool:
    """c / sqrt(2) >= t"""
    if t <= 0:
        return c >= 0 or c * c <= 2 * t * t
    return c >= 0 and c * c >= 2 * t * t


def _far(r: Fraction, scaled: bool, center: Fraction, eps: Fraction) -> bool:
    """|value - center| >= eps where value = r, or r / sqrt(2) when scaled."""
    if not scaled:
        return abs(r - center) >= eps
    return _scaled_ge(r, center + eps) or _scaled_ge(-r, -(center - eps))


def _parts(q: ConvergenceQuery):
    """(label, symbolic bad set or None, pointwise test) for each condition
    the query imposes."""
    seq, x, eps = q.seq, q.limit, q.eps
    if q.mode == "scalar":
        yield "scalar", seq.far_set("scalar", x, eps), lambda n: abs(seq(n) - x) >= eps
    elif q.mode == "norm":
        yield "norm", seq.far_set("norm", x, eps), lambda n: (seq(n) - x).norm1_sq() >= eps * eps
    elif q.mode == "coord":
        for k in q.coords:
            xk = x.coord(k)

            def test(n, k=k, xk=xk):
                v = seq(n)
                return _far(v.coord(k), v.sqrt_half, xk, eps)

            yield f"coord {k}", seq.far_set("coord", x, eps, k=k), test
    else:
        for i, f in enumerate(q.family):
            fx = f(x)

            def test(n, f=f, fx=fx):
                v = seq(n)
                return _far(f.raw(v), v.sqrt_half, fx, eps)

            yield f"functional {i}", seq.far_set("weak", x, eps, f=f), test


def _scan(test, horizon: int) -> dict:
    h = min(horizon, EVIDENCE_CAP)
    bad = [n for n in range(1, h + 1) if test(n)]
    upper = sum(1 for n in bad if n > h // 2)
    return {"checked_upto": h, "bad_count": len(bad), "bad_prefix": bad[:20],
            "last_bad": bad[-1] if bad else None, "bad_in_upper_half": upper}


def _scalar_bad_mask(seq: SeqGen, x: Fraction, eps: Fraction, h: int):
    """Vectorised bad-set mask for piecewise-constant scalar sequences."""
    if seq.pieces is None:
        return None
    ids = _piece_ids(seq, h)
    if ids is None:
        return None
    vals = [r(1) for _, r in seq.pieces.pieces] + [seq.pieces.otherwise(1)]
    far = np.array([abs(v - x) >= eps for v in vals])
    return far[ids]


def _part_verdict(F: Filter, label, bad, test, q: ConvergenceQuery) -> tuple[Verdict, Optional[SetExpr]]:
    if bad is not None:
        good = complement_of(bad)
        v = F.contains(good, q.horizon)
        return Verdict(v.status, {"part": label, "bad_set": bad, "membership_of_good_set": v}, q.horizon), bad
    ev = None
    if q.mode == "scalar":
        m = _scalar_bad_mask(q.seq, q.limit, q.eps, min(q.horizon, EVIDENCE_CAP))
        if m is not None:
            idx = np.nonzero(m)[0] + 1
            h = len(m)
            ev = {"checked_upto": h, "bad_count": int(idx.size), "bad_prefix": idx[:20].tolist(),
                  "last_bad": int(idx[-1]) if idx.size else None,
                  "bad_in_upper_half": int((idx > h // 2).sum())}
    if ev is None:
        ev = _scan(test, q.seq.reach(q.horizon))
    return consistent(q.horizon, part=label, reason="bad set not expressible symbolically", **ev), None


def _weak_block_verdict(q: ConvergenceQuery) -> Optional[Verdict]:
    """Use a sequence's certified per-block bound: every functional of sup-norm
    at most one is eps-far from 0 on at most c terms of each piece.  When the
    filter ignores sets with boundedly many points per piece, every such bad
    set has its complement in the filter."""
    hook = q.seq.hooks.get("weak_block_bound")
    if hook is None or not q.limit.is_zero():
        return None
    cert = hook(q.eps)
    if cert is None:
        return None
    from .filters import block_respecting_check

    br = block_respecting_check(q.filter, cert["ground"], cert["blocking"], q.horizon)
    if not br.refuted:
        return None
    return proved(q.horizon, rule="per-block bound against a filter that ignores bounded selectors",
                  argument="the bad set of every sup-norm-one functional meets each piece in at most "
                           "per_block points and lies in the ground set; such sets have their complement "
                           "in the filter",
                  block_respecting=br, **cert)


def f_limit(q: ConvergenceQuery) -> Verdict:
    return _f_limit(q)[0]


def _f_limit(q: ConvergenceQuery):
    parts, bads = {}, {}
    extra = {"mode": q.mode, "eps": q.eps, "limit": q.limit,
             "bounded_sequence": q.seq.bound is not None}
    if q.mode == "coord":
        extra["coordinates_tested"] = [q.coords[0], q.coords[-1]] if len(q.coords) > 1 else list(q.coords)
    if q.mode == "weak":
        w = _weak_block_verdict(q)
        if w is not None:
            return Verdict(w.status, {**w.certificate, **extra}, q.horizon), bads
    for label, bad, test in _parts(q):
        parts[label], bads[label] = _part_verdict(q.filter, label, bad, test, q)
    v = all_of(parts, q.horizon)
    if not v.proved and q.mode in ("coord", "weak"):
        # |x_k| and |f(x)| are dominated by the norm
        n = f_limit(ConvergenceQuery(q.filter, q.seq, q.limit, "norm", q.eps, q.horizon))
        if n.proved:
            return proved(q.horizon, rule="dominated by norm convergence", norm=n, **extra), bads
    return Verdict(v.status, {**v.certificate, **extra}, q.horizon), bads


# -- cluster-point refuter ------------------------------------------------------------


@dataclass
class ClusterRefutation:
    I: Optional[SetExpr]  # {j : x_j outside the eps-neighbourhood}
    eps: Fraction
    stationarity: Verdict
    part: str = ""
    evidence: dict = field(default_factory=dict)

    def member(self, j: int) -> bool:
        if self.I is None:
            raise InvalidArgument("the refuting set is only known through horizon evidence")
        return j in self.I

    def to_json(self):
        return {"I": self.I, "eps": self.eps, "part": self.part,
                "stationarity": self.stationarity.to_json(), "evidence": self.evidence}


def cluster_refuter(F: Filter, seq: SeqGen, limit, eps, horizon: int = DEFAULT_HORIZON, mode: Optional[str] = None,
                    family=(), coords=None) -> Optional[ClusterRefutation]:
    """None when convergence is proved; otherwise the set of indices outside the
    neighbourhood, which must be stationary for a genuine failure."""
    mode = mode or ("scalar" if seq.is_scalar else "norm")
    q = ConvergenceQuery(F, seq, limit, mode, eps, horizon, family, coords)
    v, bads = _f_limit(q)
    if v.proved:
        return None
    parts = v.certificate.get("parts", {})
    order = sorted(parts, key=lambda k: (not parts[k].refuted, parts[k].proved))
    label = order[0] if order else ""
    I = bads.get(label)
    if I is None:
        ev = dict(parts[label].certificate) if label else {}
        return ClusterRefutation(None, q.eps, consistent(horizon, reason="bad set known only up to the horizon"),
                                 label, ev)
    return ClusterRefutation(I, q.eps, F.is_stationary(I, horizon), label)


# -- almost Schur -------------------------------------------------------------------------


def almost_schur_check(F: Filter, seq: SeqGen, tolerance, window: int = 64,
                       horizon: int = DEFAULT_HORIZON) -> Verdict:
    """Are the norms of x_n separated from 0 along F at level ``tolerance``?

    Proved: {n : ||x_n|| < tolerance} is stationary, so 0 is an F-cluster point
    of the norms.  Refuted: {n : ||x_n|| >= tolerance} is in F."""
    if seq.is_scalar:
        raise InvalidArgument("almost_schur_check needs a vector-valued sequence")
    tol = as_fraction(tolerance)
    if tol <= 0:
        raise InvalidArgument("tolerance must be positive")
    high = seq.far_set("norm", ZERO, tol)
    if high is not None:
        v = F.contains(high, horizon)
        if v.proved:
            return refuted(horizon, I=high, rule="norms at least tolerance on a filter set", tolerance=tol,
                           membership=v)
        if v.refuted:
            low = complement_of(high)
            return proved(horizon, low_set=low, rule="small norms on a stationary set", tolerance=tol,
                          stationarity=F.is_stationary(low, horizon))
        return consistent(horizon, I=high, membership=v)
    h = min(seq.reach(horizon), EVIDENCE_CAP)
    windows = []
    top = h
    while top >= window and len(windows) < 12:
        lo = max(1, top - window)
        m = min(seq(n).norm1_sq() for n in range(lo, top + 1))
        windows.append({"window": [lo, top], "min_norm_sq": m, "small": m < tol * tol})
        top //= 2
    return consistent(horizon, reason="norm level sets not expressible symbolically", tolerance=tol,
                      windows=windows, recurring_small=all(w["small"] for w in windows) if windows else None)


# -- strong Cesàro versus statistical ------------------------------------------------


def _piece_ids(seq: SeqGen, n: int):
    sp = seq.pieces
    if sp is None or not all(r.constant for _, r in sp.pieces) or not sp.otherwise.constant:
        return None
    ids = np.full(n, len(sp.pieces), dtype=np.int32)
    free = np.ones(n, dtype=bool)
    for i, (s, _) in enumerate(sp.pieces):
        m = s.mask(n) & free
        ids[m] = i
        free &= ~m
    return ids


def _checkpoints(horizon: int, checkpoints=None) -> list[int]:
    if checkpoints:
        pts = sorted(set(int(c) for c in checkpoints if 1 <= int(c) <= horizon))
    else:
        pts = [10 ** e for e in range(1, int(math.log10(horizon)) + 1) if 10 ** e <= horizon]
    if horizon not in pts:
        pts.append(horizon)
    return pts


@dataclass
class CesaroReport:
    candidate: Fraction
    horizon: int
    method: str
    checked_upto: int
    table: list = field(default_factory=list)  # (n, average) rows

    def average(self, n: int) -> Fraction:
        for m, a in self.table:
            if m == n:
                return a
        raise KeyError(n)

    @property
    def last(self) -> Fraction:
        return self.table[-1][1]

    def to_json(self):
        return {"candidate": str(self.candidate), "horizon": self.horizon, "method": self.method,
                "checkedUpto": self.checked_upto,
                "table": [{"n": n, "average": str(a)} for n, a in self.table]}


def _regions_at(seq: SeqGen, h: int):
    """Per distinct value of a piecewise-constant sequence: its value and the
    cumulative count of indices taking it."""
    ids = _piece_ids(seq, h)
    if ids is None:
        return None
    sp = seq.pieces
    vals = [r(1) for _, r in sp.pieces] + [sp.otherwise(1)]
    return [(v, np.cumsum(ids == i, dtype=np.int64)) for i, v in enumerate(vals)]


def strong_cesaro(seq: SeqGen, x, horizon: int, checkpoints=None) -> CesaroReport:
    """Exact (1/n) * sum_{j<=n} |x - x_j| at the checkpoints."""
    if not seq.is_scalar:
        raise InvalidArgument("strong_cesaro needs a scalar sequence")
    x = as_fraction(x)
    if horizon < 1:
        raise InvalidArgument("horizon must be positive")
    regions = _regions_at(seq, horizon)
    if regions is not None:
        rows = []
        for n in _checkpoints(horizon, checkpoints):
            total = sum((abs(x - v) * int(cnt[n - 1]) for v, cnt in regions), Fraction(0))
            rows.append((n, total / n))
        return CesaroReport(x, horizon, "counting", horizon, rows)
    h = min(horizon, DIRECT_CAP)
    pts = [p for p in _checkpoints(h, checkpoints) if p <= h]
    rows, acc, want = [], Fraction(0), set(pts)
    for j in range(1, h + 1):
        acc += abs(x - seq(j))
        if j in want:
            rows.append((j, acc / j))
    return CesaroReport(x, horizon, "direct", h, rows)


def far_density(seq: SeqGen, x, tau, n: int) -> Fraction:
    """#{j <= n : |x_j - x| >= tau} / n, exact."""
    x, tau = as_fraction(x), as_fraction(tau)
    regions = _regions_at(seq, n)
    if regions is not None:
        return Fraction(sum(int(cnt[-1]) for v, cnt in regions if abs(v - x) >= tau), n)
    return Fraction(sum(1 for j in range(1, n + 1) if abs(seq(j) - x) >= tau), n)


def stat_vs_cesaro(seq: SeqGen, candidate, horizon: int, tolerance) -> Verdict:
    """Compare the statistical and the strong Cesàro diagnostic at the horizon.

    Proved: both say "convergent to candidate" or both say "not convergent".
    Refuted: they disagree."""
    if not seq.is_scalar:
        raise InvalidArgument("stat_vs_cesaro needs a scalar sequence")
    if seq.bound is None:
        raise InvalidArgument("stat_vs_cesaro needs a sequence with a declared bound")
    tol = as_fraction(tolerance)
    rep = strong_cesaro(seq, candidate, horizon, [horizon])
    n = rep.checked_upto
    avg = rep.last
    dens = far_density(seq, candidate, tol, n)
    # strict, like the open eps-neighbourhoods used everywhere else
    says = {"cesaro": "convergent" if avg < tol else "not convergent",
            "statistical": "convergent" if dens < tol else "not convergent"}
    cert = dict(candidate=rep.candidate, checked_upto=n, cesaro_average=avg, far_density=dens,
                tolerance=tol, bound=seq.bound, diagnostics=says)
    if says["cesaro"] == says["statistical"]:
        return proved(n, agreement=True, **cert)
    return refuted(n, agreement=False, **cert)


__all__ = [
    "ConvergenceQuery", "ClusterRefutation", "CesaroReport", "f_limit", "cluster_refuter",
    "almost_schur_check", "strong_cesaro", "far_density", "stat_vs_cesaro", "MODES",
]
