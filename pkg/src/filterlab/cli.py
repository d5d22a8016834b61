"""Command-line front end.

Every subcommand prints (or writes with --out) one JSON report and exits with
0 = Proved, 10 = Refuted, 20 = Consistent, 2 = usage or input error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from fractions import Fraction

from . import __version__
from .errors import FilterlabError, InvalidArgument, PreconditionError
from .verdict import Verdict, jsonable, proved, refuted

USAGE_ERROR = 2

SET_NAMES = {
    "N": {"gen": "ap", "first": 1, "step": 1},
    "all": {"gen": "ap", "first": 1, "step": 1},
    "odds": {"gen": "ap", "first": 1, "step": 2},
    "evens": {"gen": "ap", "first": 2, "step": 2},
    "squares": {"gen": "powers", "exponent": 2},
}
FILTER_ALIASES = {"fd": "columnFD", "FD": "columnFD", "Fd": "columnFd", "columnfd": "columnFD"}


class UsageError(Exception):
    pass


class _Inputs:
    """Collects the canonical form of every input so the report digest is stable."""

    def __init__(self):
        self.items = {}

    def add(self, key, value):
        self.items[key] = value

    def digest(self) -> str:
        blob = json.dumps(self.items, sort_keys=True, separators=(",", ":"), default=str)
        return hashlib.sha256(blob.encode()).hexdigest()


def _load(value: str, what: str):
    """A definition given as a file path, inline JSON, or a bare name."""
    if os.path.isfile(value):
        with open(value, encoding="utf-8") as fh:
            text = fh.read()
        src = value
    elif value.lstrip()[:1] in "{[\"":
        text, src = value, f"--{what}"
    else:
        return value
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{src}:{exc.lineno}:{exc.colno}: malformed JSON ({exc.msg})") from exc


def _frac(s: str, what: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"--{what}: expected a rational p/q, got {s!r}") from exc


def _max_horizon():
    cap = os.environ.get("FILTERLAB_MAX_HORIZON")
    if not cap:
        return None
    try:
        return int(cap)
    except ValueError as exc:
        raise UsageError(f"FILTERLAB_MAX_HORIZON must be an integer, got {cap!r}") from exc


def _horizon(args, default: int) -> int:
    h = args.horizon if args.horizon is not None else default
    if h < 1:
        raise UsageError("--horizon must be positive")
    cap = _max_horizon()
    return min(h, cap) if cap else h


# -- argument decoding ---------------------------------------------------------------


def get_filter(args, inputs, flag="filter"):
    from .filters import filter_from_json

    raw = getattr(args, flag)
    if raw is None:
        raise UsageError(f"--{flag} is required")
    d = _load(raw, flag)
    if isinstance(d, str):
        d = FILTER_ALIASES.get(d, d)
    inputs.add(flag, d)
    return filter_from_json(d, f"--{flag}")


def get_set(args, inputs, flag="set", default="N"):
    from .setalg import set_from_json

    raw = getattr(args, flag, None) or default
    d = _load(raw, flag)
    if isinstance(d, str):
        if d not in SET_NAMES:
            raise UsageError(f"--{flag}: unknown set name {d!r}; use one of {', '.join(SET_NAMES)} or JSON")
        d = SET_NAMES[d]
    inputs.add(flag, d)
    return set_from_json(d, f"--{flag}")


def get_blocking(args, inputs, I):
    from .setalg import ALL_N, Derived, blocking_from_json

    d = _load(args.blocking or "dyadic", "blocking")
    inputs.add("blocking", d)
    D = blocking_from_json(d, "--blocking")
    # a named blocking is read inside I; explicit JSON is taken literally
    if isinstance(d, str) and I != ALL_N:
        D = Derived(I, D)
    return D


def get_seq(args, inputs, flag="seq"):
    from .l1seq import seq_from_json

    raw = getattr(args, flag)
    if raw is None:
        raise UsageError(f"--{flag} is required")
    d = _load(raw, flag)
    inputs.add(flag, d)
    return seq_from_json(d, f"--{flag}")


def get_chain(args, inputs):
    from .filters import chain_from_json

    d = _load(args.chain, "chain")
    if isinstance(d, str):
        d = {"tag": d, "step": args.step}
    inputs.add("chain", d)
    return chain_from_json(d, "--chain")


def get_limit(args, inputs, seq):
    from .l1seq import L1Vec

    d = _load(args.limit, "limit")
    inputs.add("limit", d)
    if seq.is_scalar:
        return _frac(str(d), "limit")
    if d in ("0", 0):
        return 0
    try:
        return L1Vec.from_json(d)
    except (FilterlabError, ValueError, TypeError, KeyError) as exc:
        raise UsageError(f"--limit: not a vector: {exc}") from exc


# -- subcommands -----------------------------------------------------------------------


def cmd_check_convergence(args, inputs):
    from .convergence import ConvergenceQuery, f_limit
    from .l1seq import EventuallyPeriodicSigns, Summing

    F, seq = get_filter(args, inputs), get_seq(args, inputs)
    limit = get_limit(args, inputs, seq)
    eps = _frac(args.epsilon, "epsilon")
    h = _horizon(args, 1 << 16)
    mode = args.mode or ("scalar" if seq.is_scalar else "norm")
    fam = (Summing(), EventuallyPeriodicSigns((), (1, -1))) if mode == "weak" else ()
    inputs.add("check", [mode, str(eps)])
    v = f_limit(ConvergenceQuery(F, seq, limit, mode, eps, h, family=fam, coords=args.coords))
    return {"convergence": v}, {}, h


def cmd_check_block_respecting(args, inputs):
    from .filters import block_respecting_check

    F, I = get_filter(args, inputs), get_set(args, inputs)
    D = get_blocking(args, inputs, I)
    h = _horizon(args, 1 << 20)
    return {"block-respecting": block_respecting_check(F, I, D, h)}, {}, h


def cmd_check_diagonal(args, inputs):
    from .filters import diagonal_check

    F, I, chain = get_filter(args, inputs), get_set(args, inputs), get_chain(args, inputs)
    h = _horizon(args, 10_000)
    return {"diagonal": diagonal_check(F, chain, I, h)}, {}, h


def cmd_check_strongly_diagonal(args, inputs):
    from .filters import strongly_diagonal_witness

    F, I, chain = get_filter(args, inputs), get_set(args, inputs), get_chain(args, inputs)
    h = _horizon(args, 10_000)
    return {"strongly-diagonal": strongly_diagonal_witness(F, chain, I, h)}, {}, h


def cmd_split_stationary(args, inputs):
    from .filters import split_stationary

    F, I = get_filter(args, inputs), get_set(args, inputs)
    h = _horizon(args, 1 << 16)
    s = split_stationary(F, I, h)
    return {"I1 stationary": s.verdicts[0], "I2 stationary": s.verdicts[1]}, {"split": s}, h


def cmd_extract(args, inputs):
    from .constructions import DeltaSchedule, extract_basic_subsequence, extract_fd_claim

    seq = get_seq(args, inputs)
    eps = _frac(args.epsilon, "epsilon")
    sched = DeltaSchedule.geometric(eps)
    inputs.add("run", [str(eps), args.samples, args.seed, args.claim])
    if args.claim:
        h = _horizon(args, 100_000)
        v = extract_fd_claim(seq, sched, h, samples=args.samples, seed=args.seed)
        return {"claim": v}, {}, h
    F, I = get_filter(args, inputs), get_set(args, inputs)
    h = _horizon(args, 1 << 20)
    v = extract_basic_subsequence(F, seq, I, sched, h, samples=args.samples, seed=args.seed)
    return {"extraction": v}, {}, h


def cmd_build_counterexample(args, inputs):
    from .constructions import build_block_counterexample

    F, I = get_filter(args, inputs), get_set(args, inputs)
    D = get_blocking(args, inputs, I)
    eps = _frac(args.epsilon, "epsilon")
    h = _horizon(args, 1 << 16)
    inputs.add("run", [str(eps), args.samples, args.seed])
    _, cert = build_block_counterexample(F, I, D, eps, horizon=h, functionals=args.samples, seed=args.seed)
    v = (proved if cert.ok else refuted)(h, rule="per-block violation counts within d_max", d_max=cert.d_max,
                                         max_count=cert.max_count)
    return {"weak-certificate": v}, {"weak-certificate": cert}, h


def cmd_cesaro(args, inputs):
    from .convergence import stat_vs_cesaro, strong_cesaro

    seq = get_seq(args, inputs)
    x = _frac(args.candidate, "candidate")
    tol = _frac(args.tolerance, "tolerance")
    h = _horizon(args, 1_000_000)
    inputs.add("run", [str(x), str(tol)])
    return {"agreement": stat_vs_cesaro(seq, x, h, tol)}, {"cesaro": strong_cesaro(seq, x, h)}, h


def cmd_verify_certificate(args, inputs):
    from .certcheck import check_text

    if not args.inp:
        raise UsageError("--in is required")
    try:
        with open(args.inp, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"--in: {exc}") from exc
    inputs.add("in", hashlib.sha256(text.encode()).hexdigest())
    try:
        rep = check_text(text)
    except InvalidArgument as exc:
        raise UsageError(f"{args.inp}: {exc}") from exc
    return {"certificate": rep.verdict()}, {"failures": [f.to_json() for f in rep.failures]}, 0


def cmd_demo(args, inputs):
    from .demos import DEMOS, run_demo

    if args.name not in DEMOS:
        raise UsageError(f"unknown demo {args.name!r}; choose from {', '.join(DEMOS)}")
    kw = {"seed": args.seed, "samples": args.samples}
    h = None
    if args.horizon is not None or _max_horizon():
        default = DEMOS[args.name].__defaults__[0]
        h = _horizon(args, default)
        kw["horizon"] = h
    inputs.add("demo", [args.name, args.seed, args.samples])
    r = run_demo(args.name, **kw)
    h = h or DEMOS[args.name].__defaults__[0]
    verdicts = {cid: v for cid, (_, v) in r.checks.items()}
    summary = r.verdict(h)
    print(f"{r.name}: {r.anchor}", file=sys.stderr)
    return {"demo": summary, **verdicts}, {}, h


COMMANDS = {
    "check-convergence": cmd_check_convergence,
    "check-block-respecting": cmd_check_block_respecting,
    "check-diagonal": cmd_check_diagonal,
    "check-strongly-diagonal": cmd_check_strongly_diagonal,
    "split-stationary": cmd_split_stationary,
    "extract-gliding-hump": cmd_extract,
    "build-counterexample": cmd_build_counterexample,
    "cesaro": cmd_cesaro,
    "verify-certificate": cmd_verify_certificate,
    "demo": cmd_demo,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="filterlab", description="Filters on N, F-convergence in l1, and their certificates.")
    p.add_argument("--version", action="version", version=f"filterlab {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, filt=True, seq=False, sset=True):
        if filt:
            sp.add_argument("--filter", help="name (frechet, statistical, columnFD, columnFd), JSON, or file")
        if sset:
            sp.add_argument("--set", help="ground set: name (N, odds, evens, squares), JSON, or file")
        if seq:
            sp.add_argument("--seq", help="sequence name, JSON, or file")
        sp.add_argument("--horizon", type=int)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--samples", type=int, default=1000)
        sp.add_argument("--out", help="write the report here instead of stdout")

    sp = sub.add_parser("check-convergence", help="F-convergence of a sequence")
    common(sp, seq=True, sset=False)
    sp.add_argument("--limit", default="0")
    sp.add_argument("--mode", choices=("scalar", "coord", "weak", "norm"))
    sp.add_argument("--epsilon", default="1/2")
    sp.add_argument("--coords", type=int, nargs="*")

    sp = sub.add_parser("check-block-respecting", help="one stationary point per block?")
    common(sp)
    sp.add_argument("--blocking", default="dyadic")

    for name, what in (("check-diagonal", "J in F with J \\ A_n finite for every link A_n of a chain"),
                       ("check-strongly-diagonal", "J meeting each layer A_n \\ A_(n+1) at most once")):
        sp = sub.add_parser(name, help=what)
        common(sp)
        sp.add_argument("--chain", default="tails", help="tails, fd_tails, fd_drop, or JSON")
        sp.add_argument("--step", type=int, default=1)

    sp = sub.add_parser("split-stationary", help="split a stationary set into two")
    common(sp)

    sp = sub.add_parser("extract-gliding-hump", help="gliding-hump extraction of a basic subsequence")
    common(sp, seq=True)
    sp.add_argument("--epsilon", default="1/2")
    sp.add_argument("--claim", action="store_true", help="run the column-filter standard-set extraction")

    sp = sub.add_parser("build-counterexample", help="Walsh block counterexample with its weak certificate")
    common(sp)
    sp.add_argument("--blocking", default="dyadic")
    sp.add_argument("--epsilon", default="1/2")
    sp.set_defaults(samples=200)

    sp = sub.add_parser("cesaro", help="statistical versus strong Cesaro convergence")
    common(sp, filt=False, seq=True, sset=False)
    sp.add_argument("--candidate", default="0")
    sp.add_argument("--tolerance", default="1/100")

    sp = sub.add_parser("verify-certificate", help="re-check a saved report or certificate")
    sp.add_argument("--in", dest="inp")
    sp.add_argument("--out")

    sp = sub.add_parser("demo", help="named demonstrations")
    sp.add_argument("name")
    sp.add_argument("--horizon", type=int)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--samples", type=int, default=200)
    sp.add_argument("--out")
    return p


def overall(verdicts: dict) -> Verdict:
    """The report's top-level verdict; a demo's summary wins when present."""
    if "demo" in verdicts:
        return verdicts["demo"]
    if len(verdicts) == 1:
        return next(iter(verdicts.values()))
    from .verdict import all_of

    return all_of(dict(sorted(verdicts.items())))


def run(argv=None):
    """(exit code, report dict)."""
    t0 = time.perf_counter()
    inputs = _Inputs()
    report = {"tool": "filterlab", "version": __version__}
    args = None
    try:
        args = build_parser().parse_args(argv)
        if not args.command:
            raise UsageError("a subcommand is required")
        report["command"] = args.command
        inputs.add("command", args.command)
        verdicts, certs, horizon = COMMANDS[args.command](args, inputs)
        v = overall(verdicts)
        report.update(
            verdict=v.status,
            verdicts={k: verdicts[k] for k in sorted(verdicts)},
            certificates=certs,
            horizon=horizon,
            seed=getattr(args, "seed", None),
        )
        code = v.exit_code
    except UsageError as exc:
        report.update(verdict=None, error={"kind": "usage", "message": str(exc)})
        code = USAGE_ERROR
    except PreconditionError as exc:
        report.update(verdict=None, error={"kind": "precondition", "message": str(exc), "index": exc.index})
        code = USAGE_ERROR
    except FilterlabError as exc:
        report.update(verdict=None, error={"kind": type(exc).__name__, "message": str(exc)})
        code = USAGE_ERROR
    report["inputs_digest"] = inputs.digest()
    report["elapsed_ms"] = round((time.perf_counter() - t0) * 1000)
    report["exit_code"] = code
    return code, jsonable(report), getattr(args, "out", None)


def render(report) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def main(argv=None) -> int:
    code, report, out = run(argv)
    text = render(report)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if "error" in report:
        print(f"filterlab: {report['error']['message']}", file=sys.stderr)
    return code

