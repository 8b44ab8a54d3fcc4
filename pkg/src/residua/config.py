"""Run configuration and family files."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

from .homogeneous import HomPair


@dataclass(frozen=True)
class VerifyConfig:
    t: float = 1e-2
    samples: int = 100_000
    depth: int = 20
    seed: int = 7
    radius: float = 0.2


@dataclass(frozen=True)
class RunConfig:
    eps: Fraction = Fraction(1, 100)
    max_n: int = 6
    degree_ceiling: int | None = None
    exceptional_window: int = 3
    verify: VerifyConfig = field(default_factory=VerifyConfig)

    def __post_init__(self):
        object.__setattr__(self, "eps", Fraction(self.eps))
        if not (0 < self.eps < 1):
            raise ValueError("eps must lie in (0, 1)")
        if self.max_n < 1:
            raise ValueError("max_n must be at least 1")
        if self.exceptional_window < 1:
            raise ValueError("exceptional_window must be at least 1")

    def to_json(self) -> dict:
        d = asdict(self)
        d["eps"] = f"{self.eps.numerator}/{self.eps.denominator}"
        return d


@dataclass(frozen=True)
class FamilySpec:
    degree: int
    numerator: tuple[str, ...]
    denominator: tuple[str, ...]
    label: str = ""

    @classmethod
    def from_json(cls, data: dict) -> "FamilySpec":
        return cls(
            int(data["degree"]),
            tuple(str(c) for c in data["numerator"]),
            tuple(str(c) for c in data["denominator"]),
            str(data.get("label", "")),
        )

    @classmethod
    def load(cls, path: str | Path) -> "FamilySpec":
        return cls.from_json(json.loads(Path(path).read_text()))

    def to_pair(self) -> HomPair:
        return HomPair.from_json({"degree": self.degree, "numerator": list(self.numerator), "denominator": list(self.denominator)})

    def to_json(self) -> dict:
        return {"degree": self.degree, "numerator": list(self.numerator), "denominator": list(self.denominator), "label": self.label}
