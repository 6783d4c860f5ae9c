"""Per-lead-time quantile-regression marginals.

Linear quantile regression is solved exactly as a linear program
(pinball loss split into positive/negative residuals, HiGHS solver).
A predicted quantile set becomes a bounded marginal CDF: piecewise
linear through the (quantile, level) nodes with linear tails anchored at
(0, 0) and (1, 1), which keeps the transform invertible on the physical
range of normalized PV power.
"""

import json
import logging
from dataclasses import dataclass

import numpy as np
from scipy import optimize, sparse

logger = logging.getLogger(__name__)

#: the 19-level grid used throughout unless configured otherwise
DEFAULT_LEVELS = tuple(round(0.05 * k, 2) for k in range(1, 20))

PIT_EPS = 1e-6
_TIE_GAP = 1e-9


@dataclass(frozen=True)
class QuantileModel:
    """All fitted levels for one lead time: coefs[m] = (intercept, weights...)."""

    lead: int
    levels: tuple
    coefs: np.ndarray

    def __post_init__(self):
        lv = np.asarray(self.levels, dtype=np.float64)
        if lv.min() <= 0.0 or lv.max() >= 1.0 or np.any(np.diff(lv) <= 0):
            raise ValueError("levels must be strictly increasing within (0, 1)")
        if self.coefs.shape[0] != lv.shape[0]:
            raise ValueError("one coefficient vector per level required")

    def predict(self, features) -> np.ndarray:
        x = np.concatenate([[1.0], np.asarray(features, dtype=np.float64)])
        if x.shape[0] != self.coefs.shape[1]:
            raise ValueError(
                f"feature length {x.shape[0] - 1} does not match model "
                f"({self.coefs.shape[1] - 1})"
            )
        return self.coefs @ x


@dataclass(frozen=True)
class QuantileCurve:
    """Predictive quantiles for one (day, lead time)."""

    day: object
    lead: int
    levels: tuple
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if np.any(np.diff(v) < 0) or v.min() < 0.0 or v.max() > 1.0:
            raise ValueError("curve values must be nondecreasing within [0, 1]")


def pinball_loss(residuals, level: float) -> float:
    """Mean pinball loss; the quantity fit_quantile minimizes."""
    r = np.asarray(residuals, dtype=np.float64)
    return float(np.mean(r * (level - (r < 0))))


def _check_design(design, feature_names):
    # rank-revealing QR; name the columns that add no independent direction
    r = np.linalg.qr(design, mode="r")
    diag = np.abs(np.diag(r))
    bad = diag < 1e-10 * max(diag.max(), 1.0)
    if bad.any():
        names = ["intercept"] + list(feature_names)
        collinear = [names[i] for i in np.flatnonzero(bad)]
        raise ValueError(f"degenerate design matrix; collinear columns: {collinear}")


def fit_quantile(train_days, lead: int, level: float, feature_names=None) -> np.ndarray:
    """Fit one (lead, level) linear quantile regression; returns coefficients."""
    if not 0.0 < level < 1.0:
        raise ValueError("level must be in (0, 1)")
    y = np.array([day.powers[lead] for day in train_days], dtype=np.float64)
    feats = np.array([day.features[lead] for day in train_days], dtype=np.float64)
    n = y.shape[0]
    design = np.column_stack([np.ones(n), feats])
    p = design.shape[1]
    if n < 10 * p:
        raise ValueError(f"need at least {10 * p} training rows for {p} coefficients, got {n}")
    if feature_names is None:
        feature_names = [f"f{k + 1}" for k in range(p - 1)]
    _check_design(design, feature_names)

    # min tau/n 1'r+ + (1-tau)/n 1'r-  s.t.  X beta + r+ - r- = y
    cost = np.concatenate([np.zeros(p), np.full(n, level / n), np.full(n, (1 - level) / n)])
    a_eq = sparse.hstack([sparse.csc_matrix(design), sparse.eye(n), -sparse.eye(n)], format="csc")
    bounds = [(None, None)] * p + [(0, None)] * (2 * n)
    res = optimize.linprog(cost, A_eq=a_eq, b_eq=y, bounds=bounds, method="highs")
    if not res.success:
        raise RuntimeError(f"quantile LP failed for lead={lead} level={level}: {res.message}")
    return res.x[:p]


def fit_quantile_models(train_days, levels=DEFAULT_LEVELS, feature_names=None) -> list:
    """One QuantileModel per lead time over the level grid."""
    n_leads = train_days[0].powers.shape[0]
    models = []
    for lead in range(n_leads):
        coefs = np.vstack([
            fit_quantile(train_days, lead, lv, feature_names) for lv in levels
        ])
        models.append(QuantileModel(lead=lead, levels=tuple(levels), coefs=coefs))
    logger.info("fitted %d quantile models (%d levels each)", n_leads, len(levels))
    return models


def predict_curve(model: QuantileModel, features, day) -> QuantileCurve:
    """Predict, clamp to [0, 1], and repair quantile crossing by sorting."""
    raw = model.predict(features)
    vals = np.sort(np.clip(raw, 0.0, 1.0))
    return QuantileCurve(day=day, lead=model.lead, levels=model.levels, values=vals)


def curves_for_day(models, day_matrix) -> list:
    return [
        predict_curve(models[lead], day_matrix.features[lead], day_matrix.date)
        for lead in range(len(models))
    ]


def _nodes(curve: QuantileCurve):
    """Strictly increasing CDF nodes with (0,0)/(1,1) anchors.

    Tied quantile values are perturbed by a tiny forward/backward sweep so
    the piecewise-linear CDF stays invertible.
    """
    q = np.asarray(curve.values, dtype=np.float64).copy()
    m = q.shape[0]
    prev = 0.0
    for i in range(m):
        q[i] = max(q[i], prev + _TIE_GAP)
        prev = q[i]
    nxt = 1.0
    for i in range(m - 1, -1, -1):
        q[i] = min(q[i], nxt - _TIE_GAP)
        nxt = q[i]
    xs = np.concatenate([[0.0], q, [1.0]])
    ys = np.concatenate([[0.0], np.asarray(curve.levels, dtype=np.float64), [1.0]])
    return xs, ys


def cdf(curve: QuantileCurve, p):
    """Piecewise-linear predictive CDF with linear tails to 0 and 1."""
    xs, ys = _nodes(curve)
    out = np.interp(np.clip(p, 0.0, 1.0), xs, ys)
    return float(out) if np.isscalar(p) else out


def inverse_cdf(curve: QuantileCurve, u):
    """Exact inverse of ``cdf`` on its continuous range."""
    xs, ys = _nodes(curve)
    out = np.interp(np.clip(u, 0.0, 1.0), ys, xs)
    return float(out) if np.isscalar(u) else out


def pit(eval_days, curves) -> np.ndarray:
    """PIT uniforms u[t, d] = cdf(curve[t][d], p[t, d]), clipped away from 0/1."""
    if len(eval_days) != len(curves):
        raise ValueError("one curve list per day required")
    n_leads = eval_days[0].powers.shape[0]
    out = np.empty((len(eval_days), n_leads))
    for t, (day, day_curves) in enumerate(zip(eval_days, curves)):
        if len(day_curves) != n_leads:
            raise ValueError("one curve per lead time required")
        for d in range(n_leads):
            out[t, d] = cdf(day_curves[d], day.powers[d])
    return np.clip(out, PIT_EPS, 1.0 - PIT_EPS)


# -- serialization ---------------------------------------------------------

def models_to_json(models, feature_names, path):
    doc = {
        "feature_names": list(feature_names),
        "levels": list(models[0].levels),
        "models": [
            {"lead": m.lead, "coefs": [[float(c) for c in row] for row in m.coefs]}
            for m in models
        ],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")


def models_from_json(path):
    with open(path) as fh:
        doc = json.load(fh)
    levels = tuple(float(x) for x in doc["levels"])
    models = [
        QuantileModel(lead=int(m["lead"]), levels=levels,
                      coefs=np.asarray(m["coefs"], dtype=np.float64))
        for m in doc["models"]
    ]
    return models, doc["feature_names"]


def curves_to_csv(curves_by_day, path):
    """Long CSV ``day,lead,level,value`` (fan-chart input)."""
    with open(path, "w") as fh:
        fh.write("day,lead,level,value\n")
        for day_curves in curves_by_day:
            for c in day_curves:
                for lv, val in zip(c.levels, c.values):
                    fh.write(f"{c.day},{c.lead + 1},{lv},{float(val)!r}\n")


def curves_from_csv(path):
    rows = {}
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if header != ["day", "lead", "level", "value"]:
            raise ValueError(f"unexpected curve CSV header: {header}")
        for line in fh:
            day, lead, level, value = line.strip().split(",")
            rows.setdefault(day, {}).setdefault(int(lead) - 1, []).append(
                (float(level), float(value))
            )
    out = {}
    for day, leads in rows.items():
        per_day = []
        for lead in sorted(leads):
            pairs = sorted(leads[lead])
            levels = tuple(lv for lv, _ in pairs)
            values = np.array([v for _, v in pairs])
            per_day.append(QuantileCurve(day=day, lead=lead, levels=levels, values=values))
        out[day] = per_day
    return out
