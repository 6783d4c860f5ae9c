"""Pure-numpy implementations of the numeric hot loops.

Reference backend; mirrored one-for-one by the numba twins in
``pvmpi.kernels._nb``.  All array arguments are 1-D float64 (except the
scenario matrices, which are 2-D), and copula arguments are clipped into
``[CLIP, 1 - CLIP]`` before evaluation so every kernel returns finite
values on the closed unit square.
"""

import numpy as np
from scipy import special, stats

CLIP = 1e-12


def _clip(x):
    return np.clip(x, CLIP, 1.0 - CLIP)


# -- normal CDF / inverse CDF -------------------------------------------

def norm_cdf(x):
    return special.ndtr(x)


def norm_ppf(p):
    return special.ndtri(_clip(p))


# -- Gaussian pair copula ------------------------------------------------

def gauss_logpdf(u, v, rho):
    x = norm_ppf(u)
    y = norm_ppf(v)
    r2 = 1.0 - rho * rho
    return -0.5 * np.log(r2) - (rho * rho * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * r2)


def gauss_hfunc(u, v, rho):
    x = norm_ppf(u)
    y = norm_ppf(v)
    out = norm_cdf((x - rho * y) / np.sqrt(1.0 - rho * rho))
    return _clip(out)


def gauss_hinv(w, v, rho):
    zw = norm_ppf(w)
    zv = norm_ppf(v)
    return _clip(norm_cdf(zw * np.sqrt(1.0 - rho * rho) + rho * zv))


# -- Clayton pair copula -------------------------------------------------

def clayton_logpdf(u, v, theta):
    lu = np.log(_clip(u))
    lv = np.log(_clip(v))
    # u^-t + v^-t - 1, written tie-safe for tiny theta
    t = np.expm1(-theta * lu) + np.expm1(-theta * lv) + 1.0
    return np.log1p(theta) - (1.0 + theta) * (lu + lv) - (2.0 + 1.0 / theta) * np.log(t)


def clayton_hfunc(u, v, theta):
    lu = np.log(_clip(u))
    lv = np.log(_clip(v))
    t = np.expm1(-theta * lu) + np.expm1(-theta * lv) + 1.0
    logh = -(theta + 1.0) * lv - (1.0 + 1.0 / theta) * np.log(t)
    return _clip(np.exp(logh))


def clayton_hinv(w, v, theta):
    lw = np.log(_clip(w))
    lv = np.log(_clip(v))
    # u = [1 + v^-t (w^(-t/(1+t)) - 1)]^(-1/t), evaluated in log space
    g = np.expm1(-theta / (1.0 + theta) * lw)
    inner = np.logaddexp(0.0, -theta * lv + np.log(g))
    return _clip(np.exp(-inner / theta))


# -- Gumbel pair copula --------------------------------------------------

def gumbel_logpdf(u, v, theta):
    x = -np.log(_clip(u))
    y = -np.log(_clip(v))
    lx = np.log(x)
    ly = np.log(y)
    ls = np.log(np.exp(theta * lx) + np.exp(theta * ly))
    a = np.exp(ls / theta)
    return -a + x + y + (theta - 1.0) * (lx + ly) + (1.0 / theta - 2.0) * ls + np.log(a + theta - 1.0)


def gumbel_hfunc(u, v, theta):
    x = -np.log(_clip(u))
    y = -np.log(_clip(v))
    ls = np.log(np.exp(theta * np.log(x)) + np.exp(theta * np.log(y)))
    a = np.exp(ls / theta)
    logh = -a + y + (theta - 1.0) * np.log(y) + (1.0 / theta - 1.0) * ls
    return _clip(np.exp(logh))


def gumbel_hinv(w, v, theta):
    # no closed form; monotone bisection on u (60 halvings < the 200 cap)
    w = _clip(np.asarray(w, dtype=np.float64))
    v = _clip(np.asarray(v, dtype=np.float64))
    lo = np.full(w.shape, CLIP)
    hi = np.full(w.shape, 1.0 - CLIP)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        below = gumbel_hfunc(mid, v, theta) < w
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


# -- Frank pair copula ---------------------------------------------------
#
# With a = e^{-t u}, b = e^{-t v}, c = e^{-t} the density denominator is
# ab - a - b + c.  For t > 0 that equals -(a(1-b) + (b-c)) and for t < 0
# it equals (a-1)(b-1) + (c-1); both right-hand forms are sums of positive
# terms, which avoids the catastrophic cancellation of the textbook form
# near the (1,1) corner.

def _frank_pos_denom(u, v, theta):
    a = np.exp(-theta * u)
    em_v = -np.expm1(-theta * v)
    bmc = np.exp(-theta) * np.expm1(theta * (1.0 - v))
    return a * em_v + bmc


def frank_logpdf(u, v, theta):
    if abs(theta) < 1e-8:
        return np.zeros(np.broadcast(u, v).shape)
    u = _clip(u)
    v = _clip(v)
    if theta > 0.0:
        em_c = -np.expm1(-theta)
        pos = _frank_pos_denom(u, v, theta)
        return np.log(theta * em_c) - theta * (u + v) - 2.0 * np.log(pos)
    t = -theta
    ea = np.expm1(t * u)
    eb = np.expm1(t * v)
    ec = np.expm1(t)
    return np.log(t * ec) + t * (u + v) - 2.0 * np.log(ea * eb + ec)


def frank_hfunc(u, v, theta):
    if abs(theta) < 1e-8:
        return _clip(np.broadcast_arrays(u, v)[0].astype(np.float64))
    u = _clip(u)
    v = _clip(v)
    if theta > 0.0:
        b = np.exp(-theta * v)
        one_m_a = -np.expm1(-theta * u)
        out = b * one_m_a / _frank_pos_denom(u, v, theta)
    else:
        t = -theta
        b = np.exp(t * v)
        ea = np.expm1(t * u)
        eb = np.expm1(t * v)
        ec = np.expm1(t)
        out = b * ea / (ea * eb + ec)
    return _clip(out)


def frank_hinv(w, v, theta):
    if abs(theta) < 1e-8:
        return _clip(np.broadcast_arrays(w, v)[0].astype(np.float64))
    w = _clip(w)
    v = _clip(v)
    b = np.exp(-theta * v)
    c = np.exp(-theta)
    a = (b * (1.0 - w) + w * c) / (b * (1.0 - w) + w)
    return _clip(-np.log(a) / theta)


# -- rank statistics -----------------------------------------------------

def kendall_tau(x, y):
    tau = stats.kendalltau(x, y)[0]
    return float(tau) if np.isfinite(tau) else 0.0


# -- multivariate verification scores ------------------------------------

def energy_score(obs, scen):
    scen = np.asarray(scen, dtype=np.float64)
    n = scen.shape[0]
    t1 = float(np.sqrt(((scen - obs) ** 2).sum(axis=1)).mean())
    t2 = 0.0
    block = 256
    for i0 in range(0, n, block):
        blk = scen[i0:i0 + block]
        diff = blk[:, None, :] - scen[None, :, :]
        t2 += float(np.sqrt((diff * diff).sum(axis=2)).sum())
    return t1 - t2 / (2.0 * n * n)


def vario_pair_means(scen, gamma):
    scen = np.asarray(scen, dtype=np.float64)
    diff = np.abs(scen[:, :, None] - scen[:, None, :]) ** gamma
    return diff.mean(axis=0)


# -- MPI coverage counting -----------------------------------------------

def coverage_fraction(scen, lo, hi):
    inside = np.all((scen >= lo) & (scen <= hi), axis=1)
    return float(inside.mean())
