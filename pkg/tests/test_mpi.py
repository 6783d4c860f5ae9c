"""Adjusted-interval MPI construction."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from pvmpi import marginals, mpi
from pvmpi.marginals import QuantileCurve
from pvmpi.scenarios import ScenarioSet

LEVELS19 = marginals.DEFAULT_LEVELS


def _scenario_set(values, day="d"):
    return ScenarioSet(day=day, values=np.atleast_2d(np.asarray(values, dtype=float)),
                       generator="test")


def _curve_through(q25, q75, day="d", lead=0):
    # linear curve with prescribed quantiles at levels 0.25 and 0.75
    slope = (q75 - q25) / 0.5
    vals = np.clip(q25 + (np.array(LEVELS19) - 0.25) * slope, 0.0, 1.0)
    return QuantileCurve(day=day, lead=lead, levels=LEVELS19, values=vals)


LADDER = np.array([[0.1], [0.2], [0.3], [0.4], [0.5], [0.6], [0.7], [0.8], [0.9], [1.0]])


# -- coverage counting ----------------------------------------------------------

def test_coverage_envelope_is_one():
    scen = np.random.default_rng(0).random((50, 3))
    assert mpi.coverage_count(scen, scen.min(0), scen.max(0)) == 1.0


def test_coverage_excluding_one_of_three():
    scen = np.array([[0.1, 0.1], [0.5, 0.5], [0.9, 0.9]])
    cov = mpi.coverage_count(scen, np.array([0.0, 0.0]), np.array([0.6, 0.6]))
    assert_allclose(cov, 2.0 / 3.0)


def test_coverage_matches_brute_force(rng):
    scen = rng.random((40, 2))
    lo, hi = np.array([0.25, 0.1]), np.array([0.6, 0.5])
    brute = sum(
        1 for row in scen if all(lo[d] <= row[d] <= hi[d] for d in range(2))
    ) / 40
    assert_allclose(mpi.coverage_count(scen, lo, hi), brute)


def test_coverage_closed_bounds():
    scen = np.array([[0.3, 0.7]])
    assert mpi.coverage_count(scen, np.array([0.3, 0.7]), np.array([0.3, 0.7])) == 1.0


# -- volume ------------------------------------------------------------------------

def test_volume_degenerate_zero():
    assert mpi.volume([0.2, 0.5], [0.2, 0.9]) == 0.0


def test_volume_hand_product():
    assert_allclose(mpi.volume([0.0, 0.0], [0.2, 0.5]), 0.1)


def test_volume_power_eleven():
    lo = np.zeros(11)
    hi = np.full(11, 0.5)
    assert_allclose(mpi.volume(lo, hi), 0.5 ** 11)
    assert abs(mpi.volume(lo, hi) - 4.883e-4) < 1e-6


def test_volume_violated_precondition():
    with pytest.raises(ValueError):
        mpi.volume([0.5], [0.4])


# -- widening loop -------------------------------------------------------------------

def test_initial_box_already_covering_returned_unchanged():
    lo, hi, cov = mpi.widen_to_coverage(LADDER, np.array([0.28]), np.array([0.72]), 0.5)
    assert_allclose(lo, [0.28])
    assert_allclose(hi, [0.72])
    assert_allclose(cov, 0.5)


def test_widening_loop_hand_simulation():
    # [0.45, 0.55] covers 0.1 -> widen to [0.4, 0.6] (0.3) -> [0.3, 0.7] (0.5)
    lo, hi, cov = mpi.widen_to_coverage(LADDER, np.array([0.45]), np.array([0.55]), 0.5)
    assert_allclose(lo, [0.3])
    assert_allclose(hi, [0.7])
    assert_allclose(cov, 0.5)


def test_widening_stops_at_envelope_with_full_coverage():
    lo, hi, cov = mpi.widen_to_coverage(LADDER, np.array([0.45]), np.array([0.55]), 0.9999)
    assert cov == 1.0
    assert lo[0] <= 0.1 and hi[0] >= 1.0


def test_empty_scenarios_fatal():
    with pytest.raises(ValueError):
        mpi.widen_to_coverage(np.empty((0, 1)), np.array([0.1]), np.array([0.2]), 0.5)


# -- build_mpi over curves ---------------------------------------------------------

def test_build_mpi_initial_box_from_upi():
    curve = _curve_through(0.28, 0.72)
    lo, hi, cov = mpi.build_mpi(_scenario_set(LADDER), [curve], 0.5)
    assert_allclose(lo, [0.28], atol=1e-12)
    assert_allclose(hi, [0.72], atol=1e-12)
    assert cov >= 0.5


def test_build_mpi_coverage_at_least_alpha_or_envelope(rng):
    scen = _scenario_set(rng.random((200, 3)))
    curves = [_curve_through(0.4, 0.6, lead=d) for d in range(3)]
    for alpha in LEVELS19:
        lo, hi, cov = mpi.build_mpi(scen, curves, alpha)
        envelope = (
            np.all(lo <= scen.values.min(0)) and np.all(hi >= scen.values.max(0))
        )
        assert cov >= alpha or envelope


def test_build_mpi_set_nested_and_monotone(rng):
    scen = _scenario_set(np.clip(rng.normal(0.5, 0.18, size=(500, 4)), 0, 1))
    curves = [_curve_through(0.35, 0.65, lead=d) for d in range(4)]
    ms = mpi.build_mpi_set(scen, curves, LEVELS19)
    for prev, cur in zip(ms.boxes, ms.boxes[1:]):
        assert prev.alpha < cur.alpha
        assert np.all(prev.lower >= cur.lower) and np.all(prev.upper <= cur.upper)
        assert mpi.volume(prev.lower, prev.upper) <= mpi.volume(cur.lower, cur.upper)
        assert cur.coverage >= prev.coverage - 1e-12
    for box in ms.boxes:
        assert box.coverage >= box.alpha or (
            np.all(box.lower <= scen.values.min(0))
            and np.all(box.upper >= scen.values.max(0))
        )


def test_mpi_csv_round_trip(tmp_path, rng):
    scen = _scenario_set(rng.random((100, 2)))
    curves = [_curve_through(0.3, 0.7, lead=d) for d in range(2)]
    ms = mpi.build_mpi_set(scen, curves, [0.25, 0.5, 0.75])
    path = tmp_path / "mpi.csv"
    mpi.export([ms], path)
    back = mpi.read_csv(path)["d"]
    for a, b in zip(ms.boxes, back.boxes):
        assert a.alpha == b.alpha
        assert np.abs(a.lower - b.lower).max() < 1e-12
        assert np.abs(a.upper - b.upper).max() < 1e-12
