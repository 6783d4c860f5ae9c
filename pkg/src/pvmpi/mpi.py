"""Multivariate prediction intervals by the adjusted-interval method.

For nominal level alpha the box starts at the central univariate
interval (marginal quantiles (1-alpha)/2 and (1+alpha)/2).  If the
fraction of scenarios fully inside is already >= alpha the box is kept;
otherwise every dimension widens to its nearest scenario value strictly
outside the current bounds, and the first box reaching the target
coverage wins.  Coverage can only grow along the way, so the loop
terminates at the scenario envelope in the worst case.

Boxes for a full level grid are additionally nested (lower levels kept
inside higher ones); the per-level algorithm almost always yields that
on its own, and the enforcement is a no-op then.
"""

import json
from dataclasses import dataclass

import numpy as np

from . import kernels
from . import marginals as _marginals


@dataclass
class MPIBox:
    alpha: float
    lower: np.ndarray
    upper: np.ndarray
    coverage: float


@dataclass
class MPISet:
    day: object
    boxes: list  # MPIBox, ascending alpha


def coverage_count(scenarios, lower, upper) -> float:
    """Fraction of scenario rows inside the closed box."""
    scen = np.ascontiguousarray(np.atleast_2d(np.asarray(scenarios, dtype=np.float64)))
    lo = np.ascontiguousarray(np.asarray(lower, dtype=np.float64))
    hi = np.ascontiguousarray(np.asarray(upper, dtype=np.float64))
    if scen.shape[1] != lo.shape[0] or lo.shape != hi.shape:
        raise ValueError("dimension mismatch")
    return float(kernels.coverage_fraction(scen, lo, hi))


def volume(lower, upper) -> float:
    lo = np.asarray(lower, dtype=np.float64)
    hi = np.asarray(upper, dtype=np.float64)
    if np.any(hi < lo):
        raise ValueError("upper bound below lower bound")
    return float(np.prod(hi - lo))


def widen_to_coverage(scenarios, lower, upper, alpha):
    """Adjusted-interval widening loop from an explicit starting box."""
    scen = np.ascontiguousarray(np.atleast_2d(np.asarray(scenarios, dtype=np.float64)))
    if scen.size == 0:
        raise ValueError("empty scenario set")
    lo = np.asarray(lower, dtype=np.float64).copy()
    hi = np.asarray(upper, dtype=np.float64).copy()
    cols = [np.sort(scen[:, d]) for d in range(scen.shape[1])]

    cov = kernels.coverage_fraction(scen, lo, hi)
    while cov < alpha:
        moved = False
        for d, col in enumerate(cols):
            k = np.searchsorted(col, hi[d], side="right")
            if k < col.shape[0]:
                hi[d] = col[k]
                moved = True
            k = np.searchsorted(col, lo[d], side="left")
            if k > 0:
                lo[d] = col[k - 1]
                moved = True
        if not moved:
            # box already contains the envelope
            cov = 1.0
            break
        new_cov = kernels.coverage_fraction(scen, lo, hi)
        assert new_cov >= cov, "coverage must be nondecreasing while widening"
        cov = new_cov
    return lo, hi, float(cov)


def build_mpi(scenario_set, upi_curves, alpha):
    """One box: start at the central UPI of level alpha, widen to coverage."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    values = scenario_set.values
    dim = values.shape[1]
    if len(upi_curves) != dim:
        raise ValueError("one UPI curve per dimension required")
    lo = np.array([
        _marginals.inverse_cdf(upi_curves[d], (1.0 - alpha) / 2.0) for d in range(dim)
    ])
    hi = np.array([
        _marginals.inverse_cdf(upi_curves[d], (1.0 + alpha) / 2.0) for d in range(dim)
    ])
    lo = np.clip(lo, 0.0, 1.0)
    hi = np.clip(hi, 0.0, 1.0)
    return widen_to_coverage(values, lo, hi, alpha)


def build_mpi_set(scenario_set, upi_curves, alphas) -> MPISet:
    """Boxes for a level grid, nested and ordered by alpha."""
    boxes = []
    for alpha in sorted(alphas):
        lo, hi, cov = build_mpi(scenario_set, upi_curves, alpha)
        if boxes:
            lo = np.minimum(lo, boxes[-1].lower)
            hi = np.maximum(hi, boxes[-1].upper)
            cov = coverage_count(scenario_set.values, lo, hi)
        boxes.append(MPIBox(alpha=float(alpha), lower=lo, upper=hi, coverage=cov))
    return MPISet(day=scenario_set.day, boxes=boxes)


# -- serialization -------------------------------------------------------------

def export(mpi_sets, path) -> None:
    """CSV ``day,alpha,dim,lower,upper``."""
    with open(path, "w") as fh:
        fh.write("day,alpha,dim,lower,upper\n")
        for ms in mpi_sets:
            for box in ms.boxes:
                for d in range(box.lower.shape[0]):
                    fh.write(
                        f"{ms.day},{box.alpha},{d + 1},"
                        f"{float(box.lower[d])!r},{float(box.upper[d])!r}\n"
                    )


def read_csv(path) -> dict:
    per_day = {}
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if header != ["day", "alpha", "dim", "lower", "upper"]:
            raise ValueError(f"unexpected MPI CSV header: {header}")
        for line in fh:
            day, alpha, d, lo, hi = line.strip().split(",")
            per_day.setdefault(day, {}).setdefault(float(alpha), {})[int(d) - 1] = (
                float(lo), float(hi),
            )
    out = {}
    for day, by_alpha in per_day.items():
        boxes = []
        for alpha in sorted(by_alpha):
            dims = by_alpha[alpha]
            lo = np.array([dims[d][0] for d in range(len(dims))])
            hi = np.array([dims[d][1] for d in range(len(dims))])
            boxes.append(MPIBox(alpha=alpha, lower=lo, upper=hi, coverage=float("nan")))
        out[day] = MPISet(day=day, boxes=boxes)
    return out


def summary_json(mpi_sets, path) -> None:
    doc = {
        str(ms.day): {
            f"{box.alpha:g}": {
                "coverage": box.coverage,
                "volume": volume(box.lower, box.upper),
            }
            for box in ms.boxes
        }
        for ms in mpi_sets
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")
