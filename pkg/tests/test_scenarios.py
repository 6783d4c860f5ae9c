"""Scenario generation and its CSV round trip."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from pvmpi import bicop, marginals, rvine, scenarios
from pvmpi.gaussian import GaussianCopulaModel
from pvmpi.marginals import QuantileCurve


def _curve(values, day="2020-06-01", lead=0):
    return QuantileCurve(day=day, lead=lead, levels=marginals.DEFAULT_LEVELS,
                         values=np.asarray(values, dtype=float))


def _linear_curves(dim, day="2020-06-01"):
    return [
        _curve(np.linspace(0.1 + 0.02 * d, 0.9 - 0.02 * d, 19), day=day, lead=d)
        for d in range(dim)
    ]


def _gauss_model(dim, rho):
    corr = np.full((dim, dim), rho) + (1 - rho) * np.eye(dim)
    return GaussianCopulaModel(dim=dim, corr=corr)


def test_generate_shape_matches_protocol():
    model = _gauss_model(11, 0.5)
    ss = scenarios.generate(model, _linear_curves(11), 500, seed=1)
    assert ss.values.shape == (500, 11)
    assert ss.generator == "gaussian"
    assert ss.values.min() >= 0.0 and ss.values.max() <= 1.0


def test_degenerate_curves_give_constant_central_scenarios():
    # point-mass marginals: every quantile equals c_d, so the box of central
    # sample quantiles collapses onto (c_1, ..., c_D)
    model = _gauss_model(3, 0.4)
    consts = [0.3, 0.5, 0.7]
    curves = [_curve(np.full(19, c), lead=d) for d, c in enumerate(consts)]
    ss = scenarios.generate(model, curves, 4000, seed=2)
    for d, c in enumerate(consts):
        central = np.quantile(ss.values[:, d], [0.1, 0.25, 0.5, 0.75, 0.9])
        assert_allclose(central, c, atol=1e-6)
        assert ss.values[:, d].min() >= 0.0 and ss.values[:, d].max() <= 1.0


def test_independence_model_preserves_marginals():
    model = _gauss_model(2, 0.0)
    curves = _linear_curves(2)
    ss = scenarios.generate(model, curves, 5000, seed=3)
    # per-dimension KS against the curve CDF itself
    for d in range(2):
        u = marginals.cdf(curves[d], ss.values[:, d])
        x = np.sort(u)
        ecdf = np.arange(1, 5001) / 5000
        ks = max(np.abs(ecdf - x).max(), np.abs(x - (ecdf - 1 / 5000)).max())
        assert ks < 1.36 / np.sqrt(5000)


def test_copula_tau_preserved_through_transform():
    model = _gauss_model(2, 0.7)
    ss = scenarios.generate(model, _linear_curves(2), 5000, seed=4)
    tau = bicop.kendall_tau(ss.values[:, 0], ss.values[:, 1])
    assert abs(tau - 2 / np.pi * np.arcsin(0.7)) < 0.05


def test_rvine_model_generator_tag():
    model = rvine.model_from_edges(2, [
        {"conditioned": [0, 1], "family": "clayton", "theta": 2.0},
    ])
    ss = scenarios.generate(model, _linear_curves(2), 100, seed=5)
    assert ss.generator == "rvine"
    assert ss.values.shape == (100, 2)


def test_generate_deterministic():
    model = _gauss_model(2, 0.5)
    a = scenarios.generate(model, _linear_curves(2), 64, seed=6)
    b = scenarios.generate(model, _linear_curves(2), 64, seed=6)
    assert np.array_equal(a.values, b.values)


def test_dimension_mismatch_fatal():
    model = _gauss_model(3, 0.5)
    with pytest.raises(ValueError):
        scenarios.generate(model, _linear_curves(2), 10, seed=7)


def test_day_seed_derivation_is_stable():
    a = np.random.default_rng(scenarios.day_seed(42, 3, 1)).random(4)
    b = np.random.default_rng(scenarios.day_seed(42, 3, 1)).random(4)
    c = np.random.default_rng(scenarios.day_seed(42, 4, 1)).random(4)
    assert np.array_equal(a, b) and not np.array_equal(a, c)


# -- export ------------------------------------------------------------------

def test_export_round_trip(tmp_path):
    model = _gauss_model(2, 0.5)
    ss = scenarios.generate(model, _linear_curves(2), 25, seed=8)
    path = tmp_path / "scen.csv"
    scenarios.export([ss], path)
    back = scenarios.read_csv(path)["2020-06-01"]
    assert np.abs(back.values - ss.values).max() < 1e-9


def test_export_empty_set(tmp_path):
    path = tmp_path / "empty.csv"
    scenarios.export([], path)
    assert path.read_text() == "day,scenario\n"


def test_export_shape(tmp_path):
    model = _gauss_model(2, 0.2)
    ss = scenarios.generate(model, _linear_curves(2), 2, seed=9)
    path = tmp_path / "two.csv"
    scenarios.export([ss], path)
    lines = path.read_text().strip().splitlines()
    assert len(lines) == 3  # header + 2 rows
    assert lines[0] == "day,scenario,h1,h2"
    assert sum(len(l.split(",")) - 2 for l in lines[1:]) == 4  # 4 value cells
