"""Three-valued check results.  Every decision procedure returns a Verdict;
Proved and Refuted carry a certificate, Consistent carries horizon evidence."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

PROVED = "Proved"
REFUTED = "Refuted"
CONSISTENT = "Consistent"

EXIT_CODES = {PROVED: 0, REFUTED: 10, CONSISTENT: 20}


COMPACT_DIGITS = 64


def _odd_part(n: int):
    e = (n & -n).bit_length() - 1 if n else 0
    return n >> e, e


def frac_to_str(x: Fraction) -> str:
    """"p/q", or "p/q*2^e" when the powers of two would make the plain form huge."""
    x = Fraction(x)
    if max(x.numerator.bit_length(), x.denominator.bit_length()) * 0.302 < COMPACT_DIGITS:
        return str(x)
    p, a = _odd_part(x.numerator)
    q, b = _odd_part(x.denominator)
    return f"{Fraction(p, q)}*2^{a - b}"


def frac_from_str(s) -> Fraction:
    """Inverse of frac_to_str; plain integers and "p/q" are accepted too."""
    s = str(s).strip()
    if "*2^" in s:
        base, e = s.split("*2^", 1)
        e = int(e)
        return Fraction(base) * (Fraction(1 << e) if e >= 0 else Fraction(1, 1 << -e))
    return Fraction(s)


def jsonable(x):
    """Plain JSON data for certificates: Fractions become "p/q" strings, set
    expressions and blockings use their JSON encodings."""
    from .setalg.ep import EP
    from .setalg.exprs import SetExpr
    from .setalg.blocking import Blocking

    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, float):
        return x
    if isinstance(x, Fraction):
        return frac_to_str(x)
    if isinstance(x, Verdict):
        return x.to_json()
    if isinstance(x, SetExpr):
        from .setalg.serde import set_to_json

        return set_to_json(x)
    if isinstance(x, Blocking):
        return x.to_json()
    if isinstance(x, EP):
        return {"prefix": x.prefix, "period": x.period}
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted(jsonable(v) for v in x)
    if hasattr(x, "to_json"):
        return x.to_json()
    if hasattr(x, "item"):  # numpy scalar
        return x.item()
    raise TypeError(f"not JSON-encodable: {type(x).__name__}")


@dataclass(frozen=True)
class Verdict:
    status: str
    certificate: dict = field(default_factory=dict)
    horizon: int = 0

    def __post_init__(self):
        if self.status not in EXIT_CODES:
            raise ValueError(f"bad verdict status {self.status!r}")

    @property
    def proved(self) -> bool:
        return self.status == PROVED

    @property
    def refuted(self) -> bool:
        return self.status == REFUTED

    @property
    def consistent(self) -> bool:
        return self.status == CONSISTENT

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def negated(self, **extra) -> "Verdict":
        """Swap Proved and Refuted; the certificate is kept as the reason."""
        flip = {PROVED: REFUTED, REFUTED: PROVED, CONSISTENT: CONSISTENT}[self.status]
        return Verdict(flip, {**extra, "because": self}, self.horizon)

    def to_json(self):
        return {"status": self.status, "certificate": jsonable(self.certificate), "horizon": self.horizon}

    def __bool__(self):
        raise TypeError("a Verdict is three-valued; test .proved / .refuted explicitly")


def proved(horizon=0, **cert) -> Verdict:
    return Verdict(PROVED, cert, horizon)


def refuted(horizon=0, **cert) -> Verdict:
    return Verdict(REFUTED, cert, horizon)


def consistent(horizon=0, **evidence) -> Verdict:
    return Verdict(CONSISTENT, evidence, horizon)


def all_of(parts: dict, horizon: int = 0) -> Verdict:
    """Conjunction: Proved if every part is, Refuted if some part is."""
    bad = [k for k, v in parts.items() if v.refuted]
    if bad:
        return refuted(horizon, rule="conjunction", failing=bad[0], parts=parts)
    if all(v.proved for v in parts.values()):
        return proved(horizon, rule="conjunction", parts=parts)
    return consistent(horizon, rule="conjunction", parts=parts)


def any_of(parts: dict, horizon: int = 0) -> Verdict:
    """Disjunction: Proved if some part is, Refuted if every part is."""
    good = [k for k, v in parts.items() if v.proved]
    if good:
        return proved(horizon, rule="disjunction", holding=good[0], parts=parts)
    if all(v.refuted for v in parts.values()):
        return refuted(horizon, rule="disjunction", parts=parts)
    return consistent(horizon, rule="disjunction", parts=parts)
