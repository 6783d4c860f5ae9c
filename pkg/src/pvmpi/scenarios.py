"""Multivariate scenario sets: copula samples mapped through marginal inverses."""

from dataclasses import dataclass

import numpy as np

from . import gaussian as _gaussian
from . import marginals as _marginals
from . import rvine as _rvine
from .gaussian import GaussianCopulaModel
from .rvine import RVineModel


@dataclass
class ScenarioSet:
    day: object
    values: np.ndarray  # (S, D) power-space values in [0, 1]
    generator: str
    seed: object = None

    @property
    def n_scenarios(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]


def _sample_uniforms(model, n_scenarios, seed):
    if isinstance(model, GaussianCopulaModel):
        return _gaussian.sample_gaussian(model, n_scenarios, seed), "gaussian"
    if isinstance(model, RVineModel):
        return _rvine.sample_rvine(model, n_scenarios, seed), "rvine"
    raise TypeError(f"unsupported copula model {type(model).__name__}")


def generate(model, curves_for_day, n_scenarios, seed) -> ScenarioSet:
    """Sample the copula and invert each dimension's predictive CDF."""
    dim = model.dim
    if len(curves_for_day) != dim:
        raise ValueError(
            f"need one curve per dimension: model D={dim}, got {len(curves_for_day)}"
        )
    uniforms, tag = _sample_uniforms(model, n_scenarios, seed)
    values = np.empty_like(uniforms)
    for d in range(dim):
        values[:, d] = _marginals.inverse_cdf(curves_for_day[d], uniforms[:, d])
    day = curves_for_day[0].day
    return ScenarioSet(day=day, values=values, generator=tag, seed=seed)


def day_seed(master_seed, day_index, stream) -> np.random.SeedSequence:
    """Named sub-seed: one master seed reproduces every per-day draw.

    ``stream`` separates the consumers (0 = gaussian sampling, 1 = rvine
    sampling); the derivation is SeedSequence([master, stream, day_index]).
    """
    return np.random.SeedSequence([int(master_seed), int(stream), int(day_index)])


def export(scenario_sets, path) -> None:
    """CSV ``day,scenario,h1..hD``; values survive a round trip to 1e-9."""
    sets = list(scenario_sets)
    dim = sets[0].dim if sets else 0
    cols = "".join(f",h{d + 1}" for d in range(dim))
    with open(path, "w") as fh:
        fh.write(f"day,scenario{cols}\n")
        for ss in sets:
            for s in range(ss.n_scenarios):
                row = ",".join(repr(float(x)) for x in ss.values[s])
                fh.write(f"{ss.day},{s + 1},{row}\n")


def read_csv(path) -> dict:
    """Scenario sets keyed by day string (generator tag not persisted)."""
    per_day = {}
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if header[:2] != ["day", "scenario"]:
            raise ValueError(f"unexpected scenario CSV header: {header}")
        for line in fh:
            parts = line.strip().split(",")
            per_day.setdefault(parts[0], []).append([float(x) for x in parts[2:]])
    return {
        day: ScenarioSet(day=day, values=np.asarray(rows), generator="file")
        for day, rows in per_day.items()
    }
