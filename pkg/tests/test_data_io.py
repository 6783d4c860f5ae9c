"""CSV ingestion, windowing, splitting, synthetic generation."""

import datetime as dt

import numpy as np
import pytest
from numpy.testing import assert_allclose

from pvmpi import bicop, data_io
from pvmpi.data_io import DayMatrix, Record, SynthSpec


def _write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


GOOD = """timestamp,power,f1,f2
2020-01-01T07:00:00,1.0,0.1,0.2
2020-01-01T08:00:00,2.0,0.3,0.4
2020-01-01T09:00:00,1.5,0.5,0.6
"""


# -- load_csv -----------------------------------------------------------------

def test_load_well_formed(tmp_path):
    records = data_io.load_csv(_write(tmp_path, GOOD))
    assert len(records) == 3
    assert records[0].timestamp == dt.datetime(2020, 1, 1, 7)
    assert records[1].power == 2.0
    assert records[2].features == (0.5, 0.6)


def test_load_sorts_unordered_rows(tmp_path):
    shuffled = GOOD.splitlines()
    text = "\n".join([shuffled[0], shuffled[2], shuffled[1], shuffled[3]]) + "\n"
    records = data_io.load_csv(_write(tmp_path, text))
    ts = [r.timestamp for r in records]
    assert ts == sorted(ts)


def test_load_non_numeric_power_names_row(tmp_path):
    bad = GOOD.replace("2.0", "oops")
    with pytest.raises(ValueError, match="row 3"):
        data_io.load_csv(_write(tmp_path, bad))


def test_load_duplicate_timestamp_names_both_rows(tmp_path):
    dup = GOOD + "2020-01-01T09:00:00,9.0,0.0,0.0\n"
    with pytest.raises(ValueError, match="rows 4 and 5"):
        data_io.load_csv(_write(tmp_path, dup))


def test_load_missing_column(tmp_path):
    with pytest.raises(ValueError, match="missing column 'power'"):
        data_io.load_csv(_write(tmp_path, "timestamp,f1\n2020-01-01T07:00:00,0.1\n"))


def test_load_bad_timestamp_names_row(tmp_path):
    bad = GOOD.replace("2020-01-01T08:00:00", "not-a-time")
    with pytest.raises(ValueError, match="row 3"):
        data_io.load_csv(_write(tmp_path, bad))


def test_load_feature_subset(tmp_path):
    records = data_io.load_csv(_write(tmp_path, GOOD), feature_columns=["f2"])
    assert records[0].features == (0.2,)


# -- normalize_and_window --------------------------------------------------------

def _records_for_days(dates, hours, power=5.0):
    recs = []
    for date in dates:
        for h in hours:
            recs.append(Record(dt.datetime.combine(date, dt.time(h)), power, (0.0,)))
    return recs


def test_normalize_full_power_is_one():
    recs = _records_for_days([dt.date(2020, 1, 1)], range(7, 18), power=5.0)
    days = data_io.normalize_and_window(recs, capacity=5.0, hour_start=7, hour_end=17)
    assert len(days) == 1
    assert_allclose(days[0].powers, np.ones(11))


def test_window_7_to_17_gives_dimension_11():
    recs = _records_for_days([dt.date(2020, 1, 1)], range(0, 24))
    days = data_io.normalize_and_window(recs, capacity=10.0, hour_start=7, hour_end=17)
    assert days[0].powers.shape == (11,)


def test_day_missing_hour_dropped(caplog):
    import logging

    full = _records_for_days([dt.date(2020, 1, 1)], range(7, 18))
    partial = [
        r for r in _records_for_days([dt.date(2020, 1, 2)], range(7, 18))
        if r.timestamp.hour != 12
    ]
    with caplog.at_level(logging.INFO, logger="pvmpi.data_io"):
        days = data_io.normalize_and_window(full + partial, 10.0, 7, 17)
    assert [d.date for d in days] == [dt.date(2020, 1, 1)]
    assert "dropped 1 days" in caplog.text


def test_powers_clamped_to_unit_interval():
    recs = _records_for_days([dt.date(2020, 1, 1)], range(7, 18), power=12.0)
    days = data_io.normalize_and_window(recs, capacity=10.0, hour_start=7, hour_end=17)
    assert days[0].powers.max() <= 1.0


def test_zero_capacity_fatal():
    with pytest.raises(ValueError):
        data_io.normalize_and_window([], capacity=0.0, hour_start=7, hour_end=17)


# -- split ------------------------------------------------------------------------

def _dummy_days(n):
    return [
        DayMatrix(dt.date(2020, 1, 1) + dt.timedelta(days=i),
                  np.zeros(2), np.zeros((2, 1)))
        for i in range(n)
    ]


def test_split_counts():
    days = _dummy_days(100)
    train, evaluation = data_io.split(days, days[59].date)
    assert (len(train), len(evaluation)) == (60, 40)
    assert max(d.date for d in train) < min(d.date for d in evaluation)


def test_split_before_first_day_fatal():
    days = _dummy_days(10)
    with pytest.raises(ValueError):
        data_io.split(days, dt.date(2019, 12, 1))


def test_split_at_last_day_fatal():
    days = _dummy_days(10)
    with pytest.raises(ValueError):
        data_io.split(days, days[-1].date)


# -- synthetic generation ------------------------------------------------------------

def _gauss_spec(dim, rho):
    corr = np.full((dim, dim), rho) + (1 - rho) * np.eye(dim)
    return SynthSpec(copula={"type": "gaussian", "corr": corr.tolist()})


def test_synth_independent_taus_near_zero():
    spec = _gauss_spec(3, 0.0)
    days = data_io.synth_generate(seed=1, n_days=2000, dim=3, truth_spec=spec)
    p = np.array([d.powers for d in days])
    bound = 3.0 / np.sqrt(2000)
    for i in range(3):
        for j in range(i + 1, 3):
            assert abs(bicop.kendall_tau(p[:, i], p[:, j])) < bound


def test_synth_gaussian_tau_closed_form():
    spec = _gauss_spec(2, 0.5)
    days = data_io.synth_generate(seed=2, n_days=4000, dim=2, truth_spec=spec)
    p = np.array([d.powers for d in days])
    assert abs(bicop.kendall_tau(p[:, 0], p[:, 1]) - 1.0 / 3.0) < 0.05


def test_synth_deterministic():
    spec = _gauss_spec(3, 0.4)
    a = data_io.synth_generate(seed=3, n_days=50, dim=3, truth_spec=spec)
    b = data_io.synth_generate(seed=3, n_days=50, dim=3, truth_spec=spec)
    for da, db in zip(a, b):
        assert np.array_equal(da.powers, db.powers)
        assert np.array_equal(da.features, db.features)


def test_synth_normal_scores_correlation_recovered():
    from scipy.special import ndtri

    spec = _gauss_spec(3, 0.6)
    days = data_io.synth_generate(seed=4, n_days=2000, dim=3, truth_spec=spec)
    p = np.array([d.powers for d in days])
    # powers are monotone in the truth uniforms: rank-transform back
    u = (np.argsort(np.argsort(p, axis=0), axis=0) + 0.5) / len(days)
    z = ndtri(u)
    corr = np.corrcoef(z, rowvar=False)
    off = corr[~np.eye(3, dtype=bool)]
    assert np.abs(off - 0.6).max() < 0.05


def test_synth_rvine_truth():
    spec = SynthSpec(copula={"type": "rvine", "edges": [
        {"conditioned": [0, 1], "family": "clayton", "theta": 2.0},
        {"conditioned": [1, 2], "family": "gumbel", "theta": 2.0},
        {"conditioned": [0, 2], "conditioning": [1], "family": "independence"},
    ]})
    days = data_io.synth_generate(seed=5, n_days=3000, dim=3, truth_spec=spec)
    p = np.array([d.powers for d in days])
    assert abs(bicop.kendall_tau(p[:, 0], p[:, 1]) - 0.5) < 0.05
    assert abs(bicop.kendall_tau(p[:, 1], p[:, 2]) - 0.5) < 0.05


def test_synth_non_pd_corr_fatal():
    corr = [[1.0, 0.9, -0.9], [0.9, 1.0, 0.9], [-0.9, 0.9, 1.0]]
    with pytest.raises(ValueError, match="positive definite"):
        data_io.synth_generate(seed=1, n_days=10, dim=3,
                               truth_spec=SynthSpec(copula={"type": "gaussian", "corr": corr}))


def test_synth_powers_bounded():
    spec = _gauss_spec(4, 0.3)
    days = data_io.synth_generate(seed=6, n_days=500, dim=4, truth_spec=spec)
    p = np.array([d.powers for d in days])
    assert p.min() >= 0.0 and p.max() <= 1.0


# -- round trips -----------------------------------------------------------------------

def test_day_csv_round_trip(tmp_path):
    spec = _gauss_spec(3, 0.4)
    days = data_io.synth_generate(seed=7, n_days=20, dim=3, truth_spec=spec)
    path = tmp_path / "days.csv"
    data_io.write_days_csv(days, path)
    back = data_io.read_days_csv(path)
    assert len(back) == 20
    for a, b in zip(days, back):
        assert a.date == b.date
        assert np.abs(a.powers - b.powers).max() < 1e-12
        assert np.abs(a.features - b.features).max() < 1e-12


def test_records_csv_pipeline_round_trip(tmp_path):
    spec = _gauss_spec(3, 0.4)
    days = data_io.synth_generate(seed=8, n_days=15, dim=3, truth_spec=spec)
    path = tmp_path / "records.csv"
    data_io.write_records_csv(days, path, capacity=7.5, hour_start=7)
    records = data_io.load_csv(path)
    back = data_io.normalize_and_window(records, capacity=7.5, hour_start=7, hour_end=9)
    assert len(back) == 15
    for a, b in zip(days, back):
        assert np.abs(a.powers - b.powers).max() < 1e-12
        assert np.abs(a.features - b.features).max() < 1e-12
