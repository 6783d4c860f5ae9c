"""Run configuration: JSON-backed, defaulting to the experimental protocol
(19 levels 0.05..0.95, 500 scenarios, gamma 0.5, unit weights, hours 7-17)."""

import json
from dataclasses import dataclass, field

from .marginals import DEFAULT_LEVELS


@dataclass
class RunConfig:
    data_csv: str = "data.csv"
    capacity: float = 1.0
    hour_start: int = 7
    hour_end: int = 17
    train_end: str = ""
    feature_columns: list = None
    levels: tuple = DEFAULT_LEVELS
    alphas: tuple = DEFAULT_LEVELS
    n_scenarios: int = 500
    gamma: float = 0.5
    copula: str = "both"
    seed: int = 1
    out_dir: str = "out"
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.capacity <= 0:
            raise ValueError("capacity must be positive")
        if self.hour_end < self.hour_start:
            raise ValueError("empty hour window")
        if self.copula not in ("gaussian", "rvine", "both"):
            raise ValueError(f"unknown copula choice {self.copula!r}")
        if self.n_scenarios < 1:
            raise ValueError("n_scenarios must be >= 1")
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        self.levels = tuple(float(x) for x in self.levels)
        self.alphas = tuple(float(x) for x in self.alphas)
        for grid in (self.levels, self.alphas):
            if any(not 0 < x < 1 for x in grid) or list(grid) != sorted(set(grid)):
                raise ValueError("level grids must be strictly increasing within (0, 1)")

    @property
    def dim(self) -> int:
        return self.hour_end - self.hour_start + 1

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            doc = json.load(fh)
        known = {f for f in cls.__dataclass_fields__ if f != "extras"}
        kwargs = {k: v for k, v in doc.items() if k in known}
        extras = {k: v for k, v in doc.items() if k not in known}
        return cls(**kwargs, extras=extras)

    def to_json(self, path):
        doc = {k: getattr(self, k) for k in self.__dataclass_fields__ if k != "extras"}
        doc["levels"] = list(self.levels)
        doc["alphas"] = list(self.alphas)
        doc.update(self.extras)
        with open(path, "w") as fh:
            json.dump(doc, fh, sort_keys=True, indent=2)
            fh.write("\n")
