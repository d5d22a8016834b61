from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..errors import InvalidArgument
from ..l1seq.vector import as_fraction


@dataclass(frozen=True)
class DeltaSchedule:
    """delta_k = first * ratio**(k-1), with sum_k delta_k <= eps/8 (closed form)."""

    eps: Fraction
    first: Fraction
    ratio: Fraction = Fraction(1, 2)

    def __post_init__(self):
        for name in ("eps", "first", "ratio"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if self.eps <= 0 or self.first <= 0:
            raise InvalidArgument("eps and the first delta must be positive")
        if not 0 < self.ratio < 1:
            raise InvalidArgument("ratio must lie in (0, 1)")
        if self.total() > self.eps / 8:
            raise InvalidArgument(f"sum of deltas {self.total()} exceeds eps/8 = {self.eps / 8}")

    @classmethod
    def geometric(cls, eps) -> "DeltaSchedule":
        """first = eps/16, ratio 1/2: the sum is exactly eps/8."""
        eps = as_fraction(eps)
        return cls(eps, eps / 16, Fraction(1, 2))

    def __call__(self, k: int) -> Fraction:
        if k < 1:
            raise InvalidArgument(f"delta index must be >= 1, got {k}")
        return self.first * self.ratio ** (k - 1)

    def total(self) -> Fraction:
        return self.first / (1 - self.ratio)

    def partial(self, n: int) -> Fraction:
        return self.first * (1 - self.ratio ** n) / (1 - self.ratio)

    def to_json(self):
        return {"eps": str(self.eps), "first": str(self.first), "ratio": str(self.ratio), "total": str(self.total())}

    @classmethod
    def from_json(cls, d) -> "DeltaSchedule":
        if "first" not in d:
            return cls.geometric(Fraction(d["eps"]))
        return cls(Fraction(d["eps"]), Fraction(d["first"]), Fraction(d.get("ratio", "1/2")))
