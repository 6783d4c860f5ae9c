"""Model evaluation: energy/variogram scores, MPI calibration, summary report."""

import json
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .mpi import volume as _volume


def energy_score(observation, scenario_matrix) -> float:
    """Ensemble energy score (negatively oriented)."""
    obs = np.ascontiguousarray(np.asarray(observation, dtype=np.float64))
    scen = np.ascontiguousarray(np.atleast_2d(np.asarray(scenario_matrix, dtype=np.float64)))
    if scen.shape[1] != obs.shape[0]:
        raise ValueError("dimension mismatch between observation and scenarios")
    return float(kernels.energy_score(obs, scen))


def variogram_score(observation, scenario_matrix, gamma=0.5, weights=None) -> float:
    """Variogram score of order gamma with optional D x D weights (default 1)."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    obs = np.asarray(observation, dtype=np.float64)
    scen = np.ascontiguousarray(np.atleast_2d(np.asarray(scenario_matrix, dtype=np.float64)))
    dim = obs.shape[0]
    if scen.shape[1] != dim:
        raise ValueError("dimension mismatch between observation and scenarios")
    if weights is None:
        w = np.ones((dim, dim))
    else:
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != (dim, dim) or (w < 0).any():
            raise ValueError("weights must be a nonnegative D x D matrix")
    obs_pairs = np.abs(obs[:, None] - obs[None, :]) ** gamma
    scen_pairs = kernels.vario_pair_means(scen, gamma)
    return float(np.sum(w * (obs_pairs - scen_pairs) ** 2))


def mpi_calibration(mpi_sets, observed_trajectories) -> dict:
    """Per-alpha empirical coverage of the observed day trajectories.

    A day counts as covered at level alpha when the whole trajectory lies
    inside or on the box bounds for every dimension.
    """
    if len(mpi_sets) != len(observed_trajectories):
        raise ValueError("one observed trajectory per MPI set required")
    alphas = [box.alpha for box in mpi_sets[0].boxes]
    hits = {a: 0 for a in alphas}
    for ms, obs in zip(mpi_sets, observed_trajectories):
        obs = np.asarray(obs, dtype=np.float64)
        if [box.alpha for box in ms.boxes] != alphas:
            raise ValueError(f"MPI level grids differ across days (day {ms.day})")
        for box in ms.boxes:
            if obs.shape != box.lower.shape:
                raise ValueError("trajectory dimension mismatch")
            if np.all((obs >= box.lower) & (obs <= box.upper)):
                hits[box.alpha] += 1
    n = len(mpi_sets)
    return {a: hits[a] / n for a in alphas}


@dataclass
class ScoreReport:
    model: str
    loglik: float
    aic: float
    bic: float
    mean_energy_score: float
    mean_variogram_score: float
    coverage: dict
    avg_deviation_pct: float
    avg_volume_95: float
    extras: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "model": self.model,
            "loglik": self.loglik,
            "aic": self.aic,
            "bic": self.bic,
            "mean_energy_score": self.mean_energy_score,
            "mean_variogram_score": self.mean_variogram_score,
            "coverage": {f"{a:g}": c for a, c in sorted(self.coverage.items())},
            "avg_deviation_pct": self.avg_deviation_pct,
            "avg_volume_95": self.avg_volume_95,
            **self.extras,
        }


def average_deviation_pct(coverage: dict) -> float:
    """Mean |empirical - nominal| over the level grid, in percentage points."""
    if not coverage:
        raise ValueError("empty coverage mapping")
    return float(np.mean([abs(emp - a) * 100.0 for a, emp in coverage.items()]))


def average_volume_at(mpi_sets, alpha=0.95) -> float:
    vols = []
    for ms in mpi_sets:
        match = [b for b in ms.boxes if abs(b.alpha - alpha) < 1e-9]
        if not match:
            raise ValueError(f"no box at alpha={alpha} for day {ms.day}")
        vols.append(_volume(match[0].lower, match[0].upper))
    if not vols:
        raise ValueError("no MPI sets given")
    return float(np.mean(vols))


def summarize(model_name, fit_stats, per_day_es, per_day_vs, coverage, mpi_sets) -> ScoreReport:
    """Aggregate per-day scores and calibration into one report row."""
    if not per_day_es or not per_day_vs:
        raise ValueError("empty per-day score lists")
    return ScoreReport(
        model=model_name,
        loglik=float(fit_stats["loglik"]),
        aic=float(fit_stats["aic"]),
        bic=float(fit_stats["bic"]),
        mean_energy_score=float(np.mean(per_day_es)),
        mean_variogram_score=float(np.mean(per_day_vs)),
        coverage=dict(coverage),
        avg_deviation_pct=average_deviation_pct(coverage),
        avg_volume_95=average_volume_at(mpi_sets, 0.95),
    )


def report_to_json(reports, path) -> None:
    doc = {r.model: r.to_dict() for r in reports}
    with open(path, "w") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")


def reliability_to_csv(coverage: dict, path) -> None:
    with open(path, "w") as fh:
        fh.write("alpha,empirical\n")
        for a in sorted(coverage):
            fh.write(f"{a:g},{coverage[a]!r}\n")
