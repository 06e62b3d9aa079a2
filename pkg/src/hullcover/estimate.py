from __future__ import annotations

import math
from dataclasses import dataclass

#: width of the reported confidence interval, in standard errors
Z_CI = 3.0


@dataclass(frozen=True)
class Estimate:
    """A Monte-Carlo (or closed-form) value with its standard error.

    ``count == 0`` marks a closed-form value; those always carry
    ``stderr == 0``.
    """

    value: float
    stderr: float
    count: int
    seed: int

    @classmethod
    def exact(cls, value: float, seed: int = 0) -> "Estimate":
        return cls(float(value), 0.0, 0, seed)

    @property
    def closed_form(self) -> bool:
        return self.count == 0

    @property
    def ci(self) -> tuple[float, float]:
        return (self.value - Z_CI * self.stderr, self.value + Z_CI * self.stderr)

    def scaled(self, c: float) -> "Estimate":
        return Estimate(c * self.value, abs(c) * self.stderr, self.count, self.seed)

    def to_dict(self) -> dict:
        return {"value": self.value, "stderr": self.stderr, "count": self.count, "seed": self.seed}

    @classmethod
    def from_dict(cls, d: dict) -> "Estimate":
        return cls(float(d["value"]), float(d["stderr"]), int(d["count"]), int(d["seed"]))


def combined_stderr(*estimates: Estimate) -> float:
    return math.sqrt(sum(e.stderr**2 for e in estimates))
