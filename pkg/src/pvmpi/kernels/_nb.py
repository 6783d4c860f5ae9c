"""Numba-compiled twins of the hot loops in ``pvmpi.kernels._np``.

Every public function takes and returns the same shapes as the numpy
backend; results agree to floating-point noise. The inverse normal CDF is
the AS241 rational approximation (double precision), which keeps the
whole Gaussian kernel self-contained inside nopython code.
"""

import math

import numpy as np
from numba import njit

CLIP = 1e-12
_INV_SQRT2 = 1.0 / math.sqrt(2.0)


@njit(cache=True)
def _clip_s(x):
    if x < CLIP:
        return CLIP
    if x > 1.0 - CLIP:
        return 1.0 - CLIP
    return x


@njit(cache=True)
def _phi(x):
    return 0.5 * math.erfc(-x * _INV_SQRT2)


@njit(cache=True)
def _phi_inv(p):
    # Wichura's AS241 (PPND16): ~1e-15 relative accuracy.
    p = _clip_s(p)
    q = p - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        num = (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r
                    + 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r
                  + 1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r
                + 1.3314166789178437745e2) * r + 3.3871328727963666080e0)
        den = (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r
                    + 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r
                  + 5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r
                + 4.2313330701600911252e1) * r + 1.0)
        return q * num / den
    if q < 0.0:
        r = p
    else:
        r = 1.0 - p
    r = math.sqrt(-math.log(r))
    if r <= 5.0:
        r = r - 1.6
        num = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r
                    + 2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r
                  + 3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r
                + 4.63033784615654529590e0) * r + 1.42343711074968357734e0)
        den = (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r
                    + 1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r
                  + 6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r
                + 2.05319162663775882187e0) * r + 1.0)
    else:
        r = r - 5.0
        num = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r
                    + 1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r
                  + 2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r
                + 5.46378491116411436990e0) * r + 6.65790464350110377720e0)
        den = (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-9) * r
                    + 1.84631831751005468180e-6) * r + 7.86869131145613259100e-4) * r
                  + 1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r
                + 5.99832206555887937690e-1) * r + 1.0)
    val = num / den
    if q < 0.0:
        return -val
    return val


@njit(cache=True)
def norm_cdf(x):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        out[i] = _phi(x[i])
    return out


@njit(cache=True)
def norm_ppf(p):
    out = np.empty(p.shape[0])
    for i in range(p.shape[0]):
        out[i] = _phi_inv(p[i])
    return out


# -- Gaussian pair copula ------------------------------------------------

@njit(cache=True)
def gauss_logpdf(u, v, rho):
    n = u.shape[0]
    out = np.empty(n)
    r2 = 1.0 - rho * rho
    for i in range(n):
        x = _phi_inv(u[i])
        y = _phi_inv(v[i])
        out[i] = -0.5 * math.log(r2) - (rho * rho * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * r2)
    return out


@njit(cache=True)
def gauss_hfunc(u, v, rho):
    n = u.shape[0]
    out = np.empty(n)
    s = math.sqrt(1.0 - rho * rho)
    for i in range(n):
        x = _phi_inv(u[i])
        y = _phi_inv(v[i])
        out[i] = _clip_s(_phi((x - rho * y) / s))
    return out


@njit(cache=True)
def gauss_hinv(w, v, rho):
    n = w.shape[0]
    out = np.empty(n)
    s = math.sqrt(1.0 - rho * rho)
    for i in range(n):
        zw = _phi_inv(w[i])
        zv = _phi_inv(v[i])
        out[i] = _clip_s(_phi(zw * s + rho * zv))
    return out


# -- Clayton pair copula -------------------------------------------------

@njit(cache=True)
def clayton_logpdf(u, v, theta):
    n = u.shape[0]
    out = np.empty(n)
    for i in range(n):
        lu = math.log(_clip_s(u[i]))
        lv = math.log(_clip_s(v[i]))
        t = math.expm1(-theta * lu) + math.expm1(-theta * lv) + 1.0
        out[i] = math.log1p(theta) - (1.0 + theta) * (lu + lv) - (2.0 + 1.0 / theta) * math.log(t)
    return out


@njit(cache=True)
def clayton_hfunc(u, v, theta):
    n = u.shape[0]
    out = np.empty(n)
    for i in range(n):
        lu = math.log(_clip_s(u[i]))
        lv = math.log(_clip_s(v[i]))
        t = math.expm1(-theta * lu) + math.expm1(-theta * lv) + 1.0
        logh = -(theta + 1.0) * lv - (1.0 + 1.0 / theta) * math.log(t)
        out[i] = _clip_s(math.exp(logh))
    return out


@njit(cache=True)
def clayton_hinv(w, v, theta):
    n = w.shape[0]
    out = np.empty(n)
    for i in range(n):
        lw = math.log(_clip_s(w[i]))
        lv = math.log(_clip_s(v[i]))
        g = math.expm1(-theta / (1.0 + theta) * lw)
        z = -theta * lv + math.log(g)
        if z > 0.0:
            inner = z + math.log1p(math.exp(-z))
        else:
            inner = math.log1p(math.exp(z))
        out[i] = _clip_s(math.exp(-inner / theta))
    return out


# -- Gumbel pair copula --------------------------------------------------

@njit(cache=True)
def _gumbel_h_s(u, v, theta):
    x = -math.log(_clip_s(u))
    y = -math.log(_clip_s(v))
    ls = math.log(math.exp(theta * math.log(x)) + math.exp(theta * math.log(y)))
    a = math.exp(ls / theta)
    logh = -a + y + (theta - 1.0) * math.log(y) + (1.0 / theta - 1.0) * ls
    return _clip_s(math.exp(logh))


@njit(cache=True)
def gumbel_logpdf(u, v, theta):
    n = u.shape[0]
    out = np.empty(n)
    for i in range(n):
        x = -math.log(_clip_s(u[i]))
        y = -math.log(_clip_s(v[i]))
        lx = math.log(x)
        ly = math.log(y)
        ls = math.log(math.exp(theta * lx) + math.exp(theta * ly))
        a = math.exp(ls / theta)
        out[i] = (-a + x + y + (theta - 1.0) * (lx + ly)
                  + (1.0 / theta - 2.0) * ls + math.log(a + theta - 1.0))
    return out


@njit(cache=True)
def gumbel_hfunc(u, v, theta):
    n = u.shape[0]
    out = np.empty(n)
    for i in range(n):
        out[i] = _gumbel_h_s(u[i], v[i], theta)
    return out


@njit(cache=True)
def gumbel_hinv(w, v, theta):
    n = w.shape[0]
    out = np.empty(n)
    for i in range(n):
        wi = _clip_s(w[i])
        vi = _clip_s(v[i])
        lo = CLIP
        hi = 1.0 - CLIP
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if _gumbel_h_s(mid, vi, theta) < wi:
                lo = mid
            else:
                hi = mid
        out[i] = 0.5 * (lo + hi)
    return out


# -- Frank pair copula ---------------------------------------------------

@njit(cache=True)
def _frank_pos_denom_s(u, v, theta):
    a = math.exp(-theta * u)
    em_v = -math.expm1(-theta * v)
    bmc = math.exp(-theta) * math.expm1(theta * (1.0 - v))
    return a * em_v + bmc


@njit(cache=True)
def frank_logpdf(u, v, theta):
    n = u.shape[0]
    out = np.empty(n)
    if abs(theta) < 1e-8:
        for i in range(n):
            out[i] = 0.0
        return out
    if theta > 0.0:
        em_c = -math.expm1(-theta)
        for i in range(n):
            ui = _clip_s(u[i])
            vi = _clip_s(v[i])
            pos = _frank_pos_denom_s(ui, vi, theta)
            out[i] = math.log(theta * em_c) - theta * (ui + vi) - 2.0 * math.log(pos)
        return out
    t = -theta
    ec = math.expm1(t)
    for i in range(n):
        ui = _clip_s(u[i])
        vi = _clip_s(v[i])
        ea = math.expm1(t * ui)
        eb = math.expm1(t * vi)
        out[i] = math.log(t * ec) + t * (ui + vi) - 2.0 * math.log(ea * eb + ec)
    return out


@njit(cache=True)
def frank_hfunc(u, v, theta):
    n = u.shape[0]
    out = np.empty(n)
    if abs(theta) < 1e-8:
        for i in range(n):
            out[i] = _clip_s(u[i])
        return out
    if theta > 0.0:
        for i in range(n):
            ui = _clip_s(u[i])
            vi = _clip_s(v[i])
            b = math.exp(-theta * vi)
            one_m_a = -math.expm1(-theta * ui)
            out[i] = _clip_s(b * one_m_a / _frank_pos_denom_s(ui, vi, theta))
        return out
    t = -theta
    ec = math.expm1(t)
    for i in range(n):
        ui = _clip_s(u[i])
        vi = _clip_s(v[i])
        b = math.exp(t * vi)
        ea = math.expm1(t * ui)
        eb = math.expm1(t * vi)
        out[i] = _clip_s(b * ea / (ea * eb + ec))
    return out


@njit(cache=True)
def frank_hinv(w, v, theta):
    n = w.shape[0]
    out = np.empty(n)
    if abs(theta) < 1e-8:
        for i in range(n):
            out[i] = _clip_s(w[i])
        return out
    c = math.exp(-theta)
    for i in range(n):
        wi = _clip_s(w[i])
        vi = _clip_s(v[i])
        b = math.exp(-theta * vi)
        a = (b * (1.0 - wi) + wi * c) / (b * (1.0 - wi) + wi)
        out[i] = _clip_s(-math.log(a) / theta)
    return out


# -- rank statistics -----------------------------------------------------

@njit(cache=True)
def kendall_tau(x, y):
    n = x.shape[0]
    s = 0
    tx = 0
    ty = 0
    for i in range(n - 1):
        for j in range(i + 1, n):
            dx = x[i] - x[j]
            dy = y[i] - y[j]
            if dx == 0.0 and dy == 0.0:
                tx += 1
                ty += 1
            elif dx == 0.0:
                tx += 1
            elif dy == 0.0:
                ty += 1
            elif (dx > 0.0) == (dy > 0.0):
                s += 1
            else:
                s -= 1
    n0 = n * (n - 1) // 2
    denom = math.sqrt(float(n0 - tx) * float(n0 - ty))
    if denom == 0.0:
        return 0.0
    return s / denom


# -- multivariate verification scores ------------------------------------

@njit(cache=True)
def energy_score(obs, scen):
    n, d = scen.shape
    t1 = 0.0
    for s in range(n):
        acc = 0.0
        for k in range(d):
            diff = obs[k] - scen[s, k]
            acc += diff * diff
        t1 += math.sqrt(acc)
    t1 /= n
    t2 = 0.0
    for s in range(n - 1):
        for r in range(s + 1, n):
            acc = 0.0
            for k in range(d):
                diff = scen[s, k] - scen[r, k]
                acc += diff * diff
            t2 += math.sqrt(acc)
    return t1 - t2 / (float(n) * n)


@njit(cache=True)
def vario_pair_means(scen, gamma):
    n, d = scen.shape
    out = np.zeros((d, d))
    for s in range(n):
        for i in range(d):
            for j in range(i + 1, d):
                out[i, j] += abs(scen[s, i] - scen[s, j]) ** gamma
    for i in range(d):
        for j in range(i + 1, d):
            out[i, j] /= n
            out[j, i] = out[i, j]
    return out


# -- MPI coverage counting -----------------------------------------------

@njit(cache=True)
def coverage_fraction(scen, lo, hi):
    n, d = scen.shape
    cnt = 0
    for s in range(n):
        ok = True
        for k in range(d):
            p = scen[s, k]
            if p < lo[k] or p > hi[k]:
                ok = False
                break
        if ok:
            cnt += 1
    return cnt / n
