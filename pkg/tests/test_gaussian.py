"""Gaussian copula model: fit, log-likelihood, sampling."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from pvmpi import gaussian
from pvmpi.gaussian import GaussianCopulaModel


def _model(rho, dim=2):
    corr = np.eye(dim)
    corr[0, 1] = corr[1, 0] = rho
    return GaussianCopulaModel(dim=dim, corr=corr)


def test_fit_independent_uniforms(rng):
    u = rng.random((5000, 3))
    model = gaussian.fit_gaussian(u)
    off = model.corr[~np.eye(3, dtype=bool)]
    assert np.abs(off).max() < 0.05
    assert model.kappa == 3


def test_fit_identical_columns_triggers_shrinkage(rng):
    col = rng.random(200)
    u = np.column_stack([col, col, rng.random(200)])
    model = gaussian.fit_gaussian(u)
    assert np.linalg.eigvalsh(model.corr).min() > gaussian.EIG_FLOOR


def test_kappa_at_dim_11(rng):
    u = rng.random((30, 11))
    model = gaussian.fit_gaussian(u)
    assert model.kappa == 55


def test_fit_requires_enough_rows(rng):
    with pytest.raises(ValueError):
        gaussian.fit_gaussian(rng.random((3, 3)))


def test_loglik_identity_matrix_is_zero(rng):
    model = GaussianCopulaModel(dim=4, corr=np.eye(4))
    u = rng.random((100, 4))
    assert gaussian.loglik_gaussian(model, u) == 0.0


def test_loglik_closed_form_at_median():
    # single point u = (0.5, 0.5): z = 0, loglik = -0.5 log det = -0.5 log 0.75
    val = gaussian.loglik_gaussian(_model(0.5), np.array([[0.5, 0.5]]))
    assert_allclose(val, -0.5 * np.log(0.75), atol=1e-12)
    assert_allclose(val, 0.1438, atol=5e-5)


def test_loglik_mle_dominates_identity(rng):
    from scipy.special import ndtr

    z = rng.multivariate_normal([0, 0, 0], [[1, 0.6, 0.3], [0.6, 1, 0.4], [0.3, 0.4, 1]], 500)
    u = np.clip(ndtr(z), 1e-9, 1 - 1e-9)
    model = gaussian.fit_gaussian(u)
    ident = GaussianCopulaModel(dim=3, corr=np.eye(3))
    assert gaussian.loglik_gaussian(model, u) >= gaussian.loglik_gaussian(ident, u)


def test_loglik_row_order_invariant(rng):
    u = rng.random((200, 3))
    model = gaussian.fit_gaussian(u)
    shuffled = u[rng.permutation(200)]
    assert_allclose(
        gaussian.loglik_gaussian(model, u),
        gaussian.loglik_gaussian(model, shuffled),
        rtol=1e-10,
    )


def test_sample_independent(rng):
    model = GaussianCopulaModel(dim=2, corr=np.eye(2))
    u = gaussian.sample_gaussian(model, 4000, seed=1)
    crit = 1.36 / np.sqrt(4000)
    for col in range(2):
        x = np.sort(u[:, col])
        ecdf = np.arange(1, 4001) / 4000
        ks = max(np.abs(ecdf - x).max(), np.abs(x - (ecdf - 1 / 4000)).max())
        assert ks < crit
    from pvmpi import bicop
    assert abs(bicop.kendall_tau(u[:, 0], u[:, 1])) < 3.0 / np.sqrt(4000)


def test_sample_recovers_correlation():
    u = gaussian.sample_gaussian(_model(0.8), 10000, seed=2)
    z = gaussian._normal_scores(np.clip(u, 1e-12, 1 - 1e-12))
    assert abs(np.corrcoef(z, rowvar=False)[0, 1] - 0.8) < 0.03


def test_sample_deterministic():
    m = _model(0.5)
    a = gaussian.sample_gaussian(m, 100, seed=42)
    b = gaussian.sample_gaussian(m, 100, seed=42)
    assert np.array_equal(a, b)


def test_fit_sample_round_trip():
    corr = np.array([[1.0, 0.7, 0.4], [0.7, 1.0, 0.5], [0.4, 0.5, 1.0]])
    model = GaussianCopulaModel(dim=3, corr=corr)
    refit = gaussian.fit_gaussian(gaussian.sample_gaussian(model, 10000, seed=3))
    assert np.abs(refit.corr - corr).max() < 0.05


def test_json_round_trip(tmp_path, rng):
    model = gaussian.fit_gaussian(rng.random((100, 4)))
    path = tmp_path / "gauss.json"
    model.save(path)
    back = GaussianCopulaModel.load(path)
    assert back.dim == 4 and back.kappa == 6
    assert_allclose(back.corr, model.corr)
    assert back.loglik == model.loglik
