"""Multiplexing schemes: H-OMA and the H-NOMA strategies, per direction."""
from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidParameterError

STRATEGIES = {
    "ul": ("oma", "tin", "punct", "sic"),
    "dl": ("oma", "punct", "superpos"),
}
SCHEME_NAMES = tuple(f"{d}-{s}" for d, strategies in STRATEGIES.items() for s in strategies)


@dataclass(frozen=True)
class SchemeConfig:
    direction: str
    strategy: str

    def __post_init__(self):
        if self.direction not in STRATEGIES or self.strategy not in STRATEGIES[self.direction]:
            raise InvalidParameterError(
                f"unknown scheme {self.name!r}; valid schemes: {', '.join(SCHEME_NAMES)}")

    @classmethod
    def parse(cls, name: str) -> "SchemeConfig":
        text = str(name).strip().lower()
        direction, _, strategy = text.partition("-")
        if not strategy or direction not in STRATEGIES or strategy not in STRATEGIES[direction]:
            raise InvalidParameterError(
                f"unknown scheme {name!r}; valid schemes: {', '.join(SCHEME_NAMES)}")
        return cls(direction, strategy)

    @property
    def name(self) -> str:
        return f"{self.direction}-{self.strategy}"

    @property
    def orthogonal(self) -> bool:
        return self.strategy == "oma"

    def __str__(self):
        return self.name


def as_scheme(scheme) -> SchemeConfig:
    return scheme if isinstance(scheme, SchemeConfig) else SchemeConfig.parse(scheme)
