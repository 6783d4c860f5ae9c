"""CSV ingestion, capacity normalization, day windowing, synthetic data.

Input CSV schema: header ``timestamp,power,f1..fK`` with ISO-8601 hourly
timestamps.  Malformed rows are fatal and reported with their 1-based row
number.  Days missing any hour of the configured window are dropped (and
counted in the log) rather than imputed: prediction intervals are defined
over complete trajectories only.
"""

import csv
import datetime as dt
import logging
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import gaussian as _gaussian
from . import rvine as _rvine
from .gaussian import GaussianCopulaModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Record:
    timestamp: dt.datetime
    power: float
    features: tuple


@dataclass(frozen=True)
class DayMatrix:
    """One complete day: normalized powers (D,) and features (D, K)."""

    date: dt.date
    powers: np.ndarray
    features: np.ndarray


def _parse_timestamp(text, row):
    try:
        ts = dt.datetime.fromisoformat(text.strip().replace("Z", "+00:00"))
    except ValueError as exc:
        raise ValueError(f"row {row}: unparseable timestamp {text!r}") from exc
    if ts.tzinfo is not None:
        ts = ts.astimezone(dt.timezone.utc).replace(tzinfo=None)
    return ts


def load_csv(path, feature_columns=None) -> list:
    """Read records, sorted by timestamp; any malformed content is fatal."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        for required in ("timestamp", "power"):
            if required not in header:
                raise ValueError(f"{path}: missing column {required!r}")
        if feature_columns is None:
            feature_columns = [h for h in header if h not in ("timestamp", "power")]
        missing = [c for c in feature_columns if c not in header]
        if missing:
            raise ValueError(f"{path}: missing feature columns {missing}")
        idx_ts = header.index("timestamp")
        idx_p = header.index("power")
        idx_f = [header.index(c) for c in feature_columns]

        records = []
        for row_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise ValueError(f"row {row_no}: expected {len(header)} fields, got {len(row)}")
            ts = _parse_timestamp(row[idx_ts], row_no)
            try:
                power = float(row[idx_p])
                feats = tuple(float(row[k]) for k in idx_f)
            except ValueError as exc:
                raise ValueError(f"row {row_no}: non-numeric field ({exc})") from None
            records.append((ts, power, feats, row_no))

    records.sort(key=lambda r: (r[0], r[3]))
    for prev, cur in zip(records, records[1:]):
        if prev[0] == cur[0]:
            raise ValueError(
                f"duplicate timestamp {prev[0].isoformat()} at rows {prev[3]} and {cur[3]}"
            )
    return [Record(ts, p, f) for ts, p, f, _ in records]


def normalize_and_window(records, capacity, hour_start, hour_end) -> list:
    """Normalize by capacity and keep only days with the full hour window."""
    if capacity <= 0:
        raise ValueError("capacity must be positive")
    if hour_end < hour_start:
        raise ValueError("empty hour window")
    hours = list(range(hour_start, hour_end + 1))

    by_day = {}
    for rec in records:
        by_day.setdefault(rec.timestamp.date(), {})[rec.timestamp.hour] = rec

    days = []
    n_dropped = 0
    n_clamped = 0
    for date in sorted(by_day):
        have = by_day[date]
        if any(h not in have for h in hours):
            n_dropped += 1
            continue
        powers = np.array([have[h].power for h in hours], dtype=np.float64) / capacity
        if (powers < 0).any() or (powers > 1).any():
            n_clamped += int(((powers < 0) | (powers > 1)).sum())
            powers = np.clip(powers, 0.0, 1.0)
        feats = np.array([have[h].features for h in hours], dtype=np.float64)
        days.append(DayMatrix(date=date, powers=powers, features=feats))
    if n_dropped:
        logger.info("dropped %d days with incomplete hour window", n_dropped)
    if n_clamped:
        logger.warning("clamped %d power values outside [0, capacity]", n_clamped)
    return days


def split(days, train_end_date):
    """Chronological train/eval split; train includes ``train_end_date``."""
    if isinstance(train_end_date, str):
        train_end_date = dt.date.fromisoformat(train_end_date)
    train = [d for d in days if d.date <= train_end_date]
    evaluation = [d for d in days if d.date > train_end_date]
    if not train:
        raise ValueError(f"empty training set: no days on or before {train_end_date}")
    if not evaluation:
        raise ValueError(f"empty evaluation set: no days after {train_end_date}")
    return train, evaluation


# -- synthetic data with known dependence ------------------------------------

@dataclass
class SynthSpec:
    """Ground-truth description for synthetic datasets.

    ``copula`` is either ``{"type": "gaussian", "corr": [[...]]}`` or
    ``{"type": "rvine", "edges": [...]}`` (edge dicts as in the vine model
    JSON).  ``marginals`` holds per-lead Beta shape pairs; powers are the
    Beta quantiles scaled by a fixed diurnal profile, so every marginal is
    bounded in [0, 1] and monotone in the copula uniform.
    """

    copula: dict
    marginals: list = None
    profile: list = None
    n_features: int = 4
    feature_effect: float = 0.0

    @classmethod
    def from_dict(cls, d):
        return cls(
            copula=d["copula"],
            marginals=d.get("marginals"),
            profile=d.get("profile"),
            n_features=int(d.get("n_features", 4)),
            feature_effect=float(d.get("feature_effect", 0.0)),
        )

    def to_dict(self):
        return {
            "copula": self.copula,
            "marginals": self.marginals,
            "profile": self.profile,
            "n_features": self.n_features,
            "feature_effect": self.feature_effect,
        }


def _default_profile(dim):
    # midday bump, bounded in (0, 1]
    d = np.arange(dim)
    return 0.35 + 0.65 * np.sin(np.pi * (d + 0.5) / dim)


def _truth_sampler(spec: SynthSpec, dim):
    kind = spec.copula.get("type")
    if kind == "gaussian":
        corr = np.asarray(spec.copula["corr"], dtype=np.float64)
        if corr.shape != (dim, dim):
            raise ValueError(f"truth correlation must be {dim}x{dim}")
        if np.linalg.eigvalsh(corr).min() <= 0:
            raise ValueError("truth correlation matrix is not positive definite")
        model = GaussianCopulaModel(dim=dim, corr=corr)
        return lambda n, seed: _gaussian.sample_gaussian(model, n, seed)
    if kind == "rvine":
        model = _rvine.model_from_edges(dim, spec.copula["edges"])
        return lambda n, seed: _rvine.sample_rvine(model, n, seed)
    raise ValueError(f"unknown truth copula type {kind!r}")


def synth_generate(seed, n_days, dim, truth_spec) -> list:
    """Generate DayMatrix rows with known copula and marginals."""
    spec = truth_spec if isinstance(truth_spec, SynthSpec) else SynthSpec.from_dict(truth_spec)
    sampler = _truth_sampler(spec, dim)
    uniforms = sampler(n_days, np.random.SeedSequence([int(seed), 0]))

    marg = spec.marginals or [{"a": 2.0, "b": 2.0}] * dim
    if len(marg) != dim:
        raise ValueError("one marginal shape per dimension required")
    profile = np.asarray(spec.profile, dtype=np.float64) if spec.profile else _default_profile(dim)
    if profile.shape != (dim,) or (profile <= 0).any() or (profile > 1).any():
        raise ValueError("profile must be length D with entries in (0, 1]")

    powers = np.empty_like(uniforms)
    for d in range(dim):
        powers[:, d] = profile[d] * stats.beta.ppf(uniforms[:, d], marg[d]["a"], marg[d]["b"])

    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 1]))
    features = rng.standard_normal((n_days, dim, spec.n_features))
    if spec.feature_effect:
        powers = np.clip(powers + spec.feature_effect * features[:, :, 0], 0.0, 1.0)

    start = dt.date(2019, 1, 1)
    return [
        DayMatrix(date=start + dt.timedelta(days=t), powers=powers[t], features=features[t])
        for t in range(n_days)
    ]


# -- day-matrix serialization --------------------------------------------------

def write_records_csv(days, path, capacity=1.0, hour_start=7):
    """Emit the raw record CSV (timestamp,power,f1..fK) for a day list."""
    n_feat = days[0].features.shape[1]
    with open(path, "w") as fh:
        fh.write("timestamp,power," + ",".join(f"f{k + 1}" for k in range(n_feat)) + "\n")
        for day in days:
            for d in range(day.powers.shape[0]):
                ts = dt.datetime.combine(day.date, dt.time(hour=hour_start + d))
                feats = ",".join(repr(float(x)) for x in day.features[d])
                fh.write(f"{ts.isoformat()},{float(day.powers[d]) * capacity!r},{feats}\n")


def write_days_csv(days, path):
    """Lossless long-format dump of normalized day matrices."""
    n_feat = days[0].features.shape[1]
    with open(path, "w") as fh:
        fh.write("date,lead,power," + ",".join(f"f{k + 1}" for k in range(n_feat)) + "\n")
        for day in days:
            for d in range(day.powers.shape[0]):
                feats = ",".join(repr(float(x)) for x in day.features[d])
                fh.write(f"{day.date.isoformat()},{d + 1},{float(day.powers[d])!r},{feats}\n")


def read_days_csv(path) -> list:
    by_day = {}
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if header[:3] != ["date", "lead", "power"]:
            raise ValueError(f"unexpected day CSV header: {header}")
        for line in fh:
            parts = line.strip().split(",")
            date = dt.date.fromisoformat(parts[0])
            lead = int(parts[1]) - 1
            by_day.setdefault(date, {})[lead] = (
                float(parts[2]), [float(x) for x in parts[3:]],
            )
    days = []
    for date in sorted(by_day):
        leads = by_day[date]
        dim = len(leads)
        powers = np.array([leads[d][0] for d in range(dim)])
        feats = np.array([leads[d][1] for d in range(dim)])
        days.append(DayMatrix(date=date, powers=powers, features=feats))
    return days
