"""Independent certificate checker.

Works on serialized certificates only: it never re-runs a construction.  Four
kinds of witness data are recognised anywhere in the JSON tree:

* inequality records ``{lhs, rhs, relation}``, re-evaluated in exact arithmetic;
* block-selector pick tables next to a ``blocking``: pick k must lie in piece k;
* strongly diagonal witnesses (``chain``, ``J_prefix``, ``layers``): each layer is
  recomputed and must strictly increase;
* sparse-selector bounds (``pieces_meeting_horizon`` and friends): counts are
  recomputed and the density bounds re-derived.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import FilterlabError, InvalidArgument
from .verdict import consistent, frac_from_str, frac_to_str, proved, refuted

RELATIONS = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    "==": lambda a, b: a == b,
    ">=": lambda a, b: a >= b,
    ">": lambda a, b: a > b,
}


@dataclass
class Failure:
    path: str
    kind: str
    detail: str
    record: object = None

    def to_json(self):
        return {"path": self.path, "kind": self.kind, "detail": self.detail, "record": self.record}


@dataclass
class CheckReport:
    counts: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def bump(self, kind):
        self.counts[kind] = self.counts.get(kind, 0) + 1

    def fail(self, path, kind, detail, record=None):
        self.failures.append(Failure(path, kind, detail, record))

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def verdict(self):
        data = {"checked": dict(sorted(self.counts.items()))}
        if self.failures:
            f = self.failures[0]
            return refuted(0, first_failure=f.to_json(), failures=len(self.failures), **data)
        if not self.total:
            return consistent(0, note="nothing checkable in the document", **data)
        return proved(0, **data)


def _frac(x) -> Fraction:
    return frac_from_str(x)


def _show(x: Fraction) -> str:
    return frac_to_str(x)


def _check_record(d, path, rep):
    rep.bump("inequality")
    rel = d.get("relation")
    if rel not in RELATIONS:
        rep.fail(path, "inequality", f"unknown relation {rel!r}", d)
        return
    try:
        lhs, rhs = _frac(d["lhs"]), _frac(d["rhs"])
    except (ValueError, ZeroDivisionError, TypeError):
        rep.fail(path, "inequality", "lhs/rhs are not rationals", d)
        return
    if not RELATIONS[rel](lhs, rhs):
        rep.fail(path, "inequality", f"{d.get('label', '')}: {_show(lhs)} {rel} {_show(rhs)} is false", d)


def _check_picks(d, path, rep):
    from .setalg.serde import blocking_from_json

    table = d["picks"]
    picks = table.get("first_picks") or []
    if not picks:
        return
    rep.bump("picks")
    try:
        D = blocking_from_json(d["blocking"], path + ".blocking")
    except FilterlabError as exc:
        rep.fail(path, "picks", f"unreadable blocking: {exc}")
        return
    prev = 0
    for k, p in enumerate(picks, start=1):
        if p is None:
            continue
        if D.piece_of(int(p)) != k:
            rep.fail(f"{path}.picks.first_picks[{k - 1}]", "picks", f"pick {p} is not in piece {k}")
            return
        if p <= prev:
            rep.fail(f"{path}.picks.first_picks[{k - 1}]", "picks", "picks are not increasing")
            return
        prev = p


def _check_layers(d, path, rep):
    from .filters.chains import INF, chain_from_json

    rep.bump("layers")
    try:
        chain = chain_from_json(d["chain"], path + ".chain")
    except (FilterlabError, KeyError, TypeError) as exc:
        rep.fail(path, "layers", f"unreadable chain: {exc}")
        return
    J, layers = d["J_prefix"], d["layers"]
    if len(J) != len(layers):
        rep.fail(path, "layers", "J_prefix and layers differ in length")
        return
    last = 0
    for i, (j, L) in enumerate(zip(J, layers)):
        got = chain.layer(int(j))
        want = INF if L == "inf" else int(L)
        if got != want:
            rep.fail(f"{path}.layers[{i}]", "layers", f"{j} lies in layer {got}, recorded {L}")
            return
        if want == 0:
            rep.fail(f"{path}.layers[{i}]", "layers", f"{j} is outside A_1")
            return
        if want != INF:
            if want <= last:
                rep.fail(f"{path}.layers[{i}]", "layers", f"layer {want} repeats or decreases")
                return
            last = want


def _check_sparse(d, horizon, path, rep):
    """Min-selector counts on a log-growth blocking, recomputed from the blocking."""
    from .setalg.serde import blocking_from_json

    rep.bump("sparse-bound")
    if not horizon:
        rep.fail(path, "sparse-bound", "no horizon recorded")
        return
    try:
        D = blocking_from_json(d["blocking"], path + ".blocking")
    except FilterlabError as exc:
        rep.fail(path, "sparse-bound", f"unreadable blocking: {exc}")
        return
    # at most one point per piece: the pieces meeting [1, n] bound every selector's count
    k = 0
    while D.first_of(k + 1) <= horizon:
        k += 1
    want = {
        "pieces_meeting_horizon": k,
        "density_bound": Fraction(k, horizon),
        "min_selector_count": k,
        "min_selector_density_bound": Fraction(k, horizon),
    }
    for key, v in want.items():
        if key in d and _frac(d[key]) != v:
            rep.fail(f"{path}.{key}", "sparse-bound", f"recorded {d[key]}, recomputed {_show(v)}")
            return
    if "log_bound_horizon" in d and k > int(d["log_bound_horizon"]):
        rep.fail(path, "sparse-bound", f"{k} pieces exceed the recorded log bound {d['log_bound_horizon']}")


def _walk(x, path, horizon, rep):
    if isinstance(x, dict):
        if "horizon" in x and isinstance(x.get("horizon"), int) and "status" in x:
            horizon = x["horizon"]
        if {"lhs", "rhs", "relation"} <= x.keys():
            _check_record(x, path, rep)
        if "blocking" in x and isinstance(x.get("picks"), dict):
            _check_picks(x, path, rep)
        if {"chain", "J_prefix", "layers"} <= x.keys():
            _check_layers(x, path, rep)
        if "blocking" in x and "pieces_meeting_horizon" in x:
            _check_sparse(x, horizon, path, rep)
        for k, v in x.items():
            _walk(v, f"{path}.{k}", horizon, rep)
    elif isinstance(x, list):
        for i, v in enumerate(x):
            _walk(v, f"{path}[{i}]", horizon, rep)


def check_document(doc) -> CheckReport:
    rep = CheckReport()
    _walk(doc, "$", 0, rep)
    return rep


def check_text(text: str) -> CheckReport:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidArgument(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return check_document(doc)


def verify_certificate(doc):
    """Verdict: Proved if every recognised witness re-checks, Refuted with the
    first failing item otherwise, Consistent if nothing was checkable."""
    return check_document(doc).verdict()
