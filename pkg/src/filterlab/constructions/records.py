"""Recorded inequalities.  Every certificate stores its arithmetic as
{label, lhs, rhs, relation} so that it can be re-checked without re-running
the construction."""

from __future__ import annotations

import operator
from dataclasses import dataclass
from fractions import Fraction

from ..errors import InvalidArgument
from ..verdict import frac_from_str, frac_to_str

RELATIONS = {"<": operator.lt, "<=": operator.le, "==": operator.eq, ">=": operator.ge, ">": operator.gt}


@dataclass(frozen=True)
class Ineq:
    label: str
    lhs: Fraction
    rhs: Fraction
    relation: str = "<="

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise InvalidArgument(f"unknown relation {self.relation!r}")

    def holds(self) -> bool:
        return RELATIONS[self.relation](Fraction(self.lhs), Fraction(self.rhs))

    def to_json(self):
        return {"label": self.label, "lhs": frac_to_str(self.lhs), "rhs": frac_to_str(self.rhs), "relation": self.relation}

    @classmethod
    def from_json(cls, d) -> "Ineq":
        try:
            return cls(str(d.get("label", "")), frac_from_str(d["lhs"]), frac_from_str(d["rhs"]), d["relation"])
        except (KeyError, ValueError, ZeroDivisionError, TypeError) as exc:
            raise InvalidArgument(f"malformed inequality record {d!r}") from exc


def failing(records) -> list:
    return [r for r in records if not r.holds()]
