"""Bivariate copula building blocks.

Seven one-parameter families (independence, Gaussian, Clayton, Gumbel,
Frank, plus the 180-degree survival rotations of Clayton and Gumbel),
with densities, h-functions ``h(u|v) = dC(u,v)/dv``, inverse h-functions,
Kendall's tau, maximum-likelihood fitting and AIC-based family selection.

Negative dependence is left to the Gaussian and Frank families; the
tail families are only candidates when the sample tau is nonnegative.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from . import kernels

FAMILIES = (
    "independence",
    "gaussian",
    "clayton",
    "gumbel",
    "frank",
    "survival_clayton",
    "survival_gumbel",
)

#: families whose positive-only parameter restricts them to tau >= 0
TAIL_FAMILIES = ("clayton", "gumbel", "survival_clayton", "survival_gumbel")

#: searchable parameter domain per base family
THETA_BOUNDS = {
    "gaussian": (-0.99995, 0.99995),
    "clayton": (1e-8, 25.0),
    "gumbel": (1.0, 20.0),
    "frank": (-35.0, 35.0),
}

_SURVIVAL_BASE = {"survival_clayton": "clayton", "survival_gumbel": "gumbel"}


def _base_family(family):
    return _SURVIVAL_BASE.get(family, family)


@dataclass(frozen=True)
class BivariateCopula:
    """A fitted (or constructed) pair copula: family tag plus parameter."""

    family: str
    theta: float = 0.0
    loglik: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown copula family {self.family!r}")
        if self.family == "independence":
            object.__setattr__(self, "theta", 0.0)
            return
        lo, hi = THETA_BOUNDS[_base_family(self.family)]
        if not (lo <= self.theta <= hi) or (
            _base_family(self.family) == "frank" and self.theta == 0.0
        ):
            raise ValueError(
                f"theta={self.theta} outside domain [{lo}, {hi}] for {self.family}"
            )

    @property
    def n_params(self) -> int:
        return 0 if self.family == "independence" else 1

    def to_dict(self):
        return {"family": self.family, "theta": self.theta}

    @classmethod
    def from_dict(cls, d):
        return cls(family=d["family"], theta=float(d.get("theta", 0.0)))


INDEPENDENCE = BivariateCopula("independence")

_LOGPDF = {
    "gaussian": kernels.gauss_logpdf,
    "clayton": kernels.clayton_logpdf,
    "gumbel": kernels.gumbel_logpdf,
    "frank": kernels.frank_logpdf,
}
_HFUNC = {
    "gaussian": kernels.gauss_hfunc,
    "clayton": kernels.clayton_hfunc,
    "gumbel": kernels.gumbel_hfunc,
    "frank": kernels.frank_hfunc,
}
_HINV = {
    "gaussian": kernels.gauss_hinv,
    "clayton": kernels.clayton_hinv,
    "gumbel": kernels.gumbel_hinv,
    "frank": kernels.frank_hinv,
}


def _prep(*arrays):
    out = [np.ascontiguousarray(np.atleast_1d(np.asarray(a, dtype=np.float64))) for a in arrays]
    n = max(a.shape[0] for a in out)
    return [np.broadcast_to(a, (n,)).copy() if a.shape[0] != n else a for a in out]


def _wrap(result, *inputs):
    if all(np.isscalar(x) or np.asarray(x).ndim == 0 for x in inputs):
        return float(result[0])
    return result


def log_density(cop: BivariateCopula, u, v):
    """Log copula density log c(u, v)."""
    if cop.family == "independence":
        uu, _ = _prep(u, v)
        return _wrap(np.zeros_like(uu), u, v)
    uu, vv = _prep(u, v)
    if cop.family in _SURVIVAL_BASE:
        out = _LOGPDF[_base_family(cop.family)](1.0 - uu, 1.0 - vv, cop.theta)
    else:
        out = _LOGPDF[cop.family](uu, vv, cop.theta)
    return _wrap(out, u, v)


def density(cop: BivariateCopula, u, v):
    """Copula density c(u, v)."""
    out = log_density(cop, u, v)
    return np.exp(out) if isinstance(out, np.ndarray) else float(np.exp(out))


def hfunc(cop: BivariateCopula, u, v):
    """Conditional CDF h(u|v) = dC(u,v)/dv."""
    if cop.family == "independence":
        uu, _ = _prep(u, v)
        return _wrap(uu, u, v)
    uu, vv = _prep(u, v)
    if cop.family in _SURVIVAL_BASE:
        base = _HFUNC[_base_family(cop.family)](1.0 - uu, 1.0 - vv, cop.theta)
        out = np.clip(1.0 - base, kernels.CLIP, 1.0 - kernels.CLIP)
    else:
        out = _HFUNC[cop.family](uu, vv, cop.theta)
    return _wrap(out, u, v)


def hfunc_inv(cop: BivariateCopula, w, v):
    """Inverse of ``hfunc`` in its first argument: h(u|v) = w."""
    if cop.family == "independence":
        ww, _ = _prep(w, v)
        return _wrap(ww, w, v)
    ww, vv = _prep(w, v)
    if cop.family in _SURVIVAL_BASE:
        base = _HINV[_base_family(cop.family)](1.0 - ww, 1.0 - vv, cop.theta)
        out = np.clip(1.0 - base, kernels.CLIP, 1.0 - kernels.CLIP)
    else:
        out = _HINV[cop.family](ww, vv, cop.theta)
    return _wrap(out, w, v)


def kendall_tau(sample_u, sample_v) -> float:
    """Sample Kendall's tau (pairwise concordance, tie-corrected)."""
    x = np.ascontiguousarray(np.asarray(sample_u, dtype=np.float64))
    y = np.ascontiguousarray(np.asarray(sample_v, dtype=np.float64))
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("samples must be equal-length vectors")
    if x.shape[0] < 2:
        raise ValueError("kendall_tau needs at least 2 observations")
    return float(np.clip(kernels.kendall_tau(x, y), -1.0, 1.0))


def _frank_tau(theta: float) -> float:
    if abs(theta) < 1e-10:
        return 0.0
    debye, _ = integrate.quad(lambda t: t / np.expm1(t), 0.0, theta)
    return 1.0 - 4.0 / theta * (1.0 - debye / theta)


def copula_tau(cop: BivariateCopula) -> float:
    """Population Kendall's tau implied by a copula."""
    fam = _base_family(cop.family)
    if cop.family == "independence":
        return 0.0
    if fam == "gaussian":
        return 2.0 / np.pi * np.arcsin(cop.theta)
    if fam == "clayton":
        return cop.theta / (cop.theta + 2.0)
    if fam == "gumbel":
        return 1.0 - 1.0 / cop.theta
    return _frank_tau(cop.theta)


def tau_to_theta(family: str, tau: float) -> float:
    """Moment-matching initializer: parameter whose population tau is ``tau``."""
    fam = _base_family(family)
    lo, hi = THETA_BOUNDS[fam]
    if fam == "gaussian":
        theta = np.sin(np.pi * tau / 2.0)
    elif fam == "clayton":
        t = max(tau, 1e-6)
        theta = 2.0 * t / (1.0 - t)
    elif fam == "gumbel":
        t = max(tau, 0.0)
        theta = 1.0 / max(1.0 - t, 1e-6)
    else:  # frank: invert the Debye relation numerically
        if abs(tau) < 1e-6:
            return 1e-6 if tau >= 0 else -1e-6
        theta = optimize.brentq(lambda th: _frank_tau(th) - tau, -34.999, 34.999, xtol=1e-10)
    return float(np.clip(theta, lo, hi))


def fit_family(sample_u, sample_v, family: str) -> BivariateCopula:
    """Maximum-likelihood fit of one family on a pseudo-observation sample."""
    u = np.asarray(sample_u, dtype=np.float64)
    v = np.asarray(sample_v, dtype=np.float64)
    if u.shape[0] < 20:
        raise ValueError("fit_family needs at least 20 observations")
    if family == "independence":
        return BivariateCopula("independence", loglik=0.0)

    tau = kendall_tau(u, v)
    lo, hi = THETA_BOUNDS[_base_family(family)]

    def negll(theta):
        return -float(np.sum(log_density(BivariateCopula(family, theta), u, v)))

    res = optimize.minimize_scalar(
        negll, bounds=(lo, hi), method="bounded",
        options={"xatol": 1e-10, "maxiter": 500},
    )
    theta_hat = float(res.x)
    ll = -float(res.fun)
    if not np.isfinite(ll):
        warnings.warn(
            f"{family} likelihood not finite at optimum; falling back to tau inversion",
            RuntimeWarning,
        )
        theta_hat = tau_to_theta(family, tau)
        ll = -negll(theta_hat)
        if not np.isfinite(ll):
            raise RuntimeError(f"cannot evaluate {family} log-likelihood on this sample")
    return BivariateCopula(family, theta_hat, loglik=ll)


def aic(cop: BivariateCopula) -> float:
    return -2.0 * cop.loglik + 2.0 * cop.n_params


def select_family(sample_u, sample_v, families=FAMILIES) -> BivariateCopula:
    """Fit all admissible families and return the lowest-AIC one.

    Ties break toward fewer parameters, then the ``FAMILIES`` order.
    """
    tau = kendall_tau(sample_u, sample_v)
    fits = []
    for fam in families:
        if tau < 0.0 and fam in TAIL_FAMILIES:
            continue
        fits.append(fit_family(sample_u, sample_v, fam))
    return min(fits, key=lambda c: (aic(c), c.n_params, FAMILIES.index(c.family)))


def sample_pair(cop: BivariateCopula, n: int, seed) -> np.ndarray:
    """Draw ``n`` samples (u, v) via the conditional method."""
    rng = np.random.default_rng(seed)
    v = rng.random(n)
    w = rng.random(n)
    u = hfunc_inv(cop, w, v)
    return np.column_stack([u, v])
