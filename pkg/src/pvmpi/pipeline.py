"""End-to-end composition of the library modules.

Used by the CLI subcommands and by the acceptance suite, so that both
exercise exactly the same paths.
"""

import logging

from . import gaussian as _gaussian
from . import marginals as _marginals
from . import mpi as _mpi
from . import rvine as _rvine
from . import scenarios as _scenarios
from . import scoring as _scoring

logger = logging.getLogger(__name__)

STREAMS = {"gaussian": 0, "rvine": 1}


def fit_marginal_stage(train_days, eval_days, levels, feature_names=None):
    """Quantile models plus per-day curves and the training PIT matrix."""
    models = _marginals.fit_quantile_models(train_days, levels, feature_names)
    curves_train = [_marginals.curves_for_day(models, day) for day in train_days]
    curves_eval = [_marginals.curves_for_day(models, day) for day in eval_days]
    pit_train = _marginals.pit(train_days, curves_train)
    return models, curves_train, curves_eval, pit_train


def fit_copulas(pit_train, which="both"):
    models = {}
    if which in ("gaussian", "both"):
        models["gaussian"] = _gaussian.fit_gaussian(pit_train)
    if which in ("rvine", "both"):
        models["rvine"] = _rvine.select_structure(pit_train)
    return models


def fit_stats(model, n_rows):
    return {
        "loglik": float(model.loglik),
        "aic": float(_rvine.aic(model)),
        "bic": float(_rvine.bic(model, n_rows)),
        "kappa": int(model.kappa),
    }


def scenarios_for_days(model, tag, curves_eval, n_scenarios, master_seed):
    stream = STREAMS[tag]
    sets = []
    for t, day_curves in enumerate(curves_eval):
        seed = _scenarios.day_seed(master_seed, t, stream)
        sets.append(_scenarios.generate(model, day_curves, n_scenarios, seed))
    return sets


def mpi_for_days(scenario_sets, curves_eval, alphas):
    return [
        _mpi.build_mpi_set(ss, day_curves, alphas)
        for ss, day_curves in zip(scenario_sets, curves_eval)
    ]


def score_model(tag, stats, scenario_sets, mpi_sets, eval_days, gamma, weights=None):
    observed = [day.powers for day in eval_days]
    per_day_es = [
        _scoring.energy_score(obs, ss.values) for obs, ss in zip(observed, scenario_sets)
    ]
    per_day_vs = [
        _scoring.variogram_score(obs, ss.values, gamma, weights)
        for obs, ss in zip(observed, scenario_sets)
    ]
    coverage = _scoring.mpi_calibration(mpi_sets, observed)
    return _scoring.summarize(tag, stats, per_day_es, per_day_vs, coverage, mpi_sets)


def run_pipeline(train_days, eval_days, levels, alphas, n_scenarios, gamma,
                 master_seed, which="both"):
    """Full fit/sample/MPI/score pass; returns reports and intermediates."""
    models, _, curves_eval, pit_train = fit_marginal_stage(train_days, eval_days, levels)
    copulas = fit_copulas(pit_train, which)
    out = {"copulas": copulas, "reports": {}, "scenarios": {}, "mpi": {}}
    for tag, model in copulas.items():
        stats = fit_stats(model, pit_train.shape[0])
        sets = scenarios_for_days(model, tag, curves_eval, n_scenarios, master_seed)
        mpis = mpi_for_days(sets, curves_eval, alphas)
        out["scenarios"][tag] = sets
        out["mpi"][tag] = mpis
        out["reports"][tag] = score_model(tag, stats, sets, mpis, eval_days, gamma)
        logger.info("scored %s: ES=%.5g deviation=%.3g%%", tag,
                    out["reports"][tag].mean_energy_score,
                    out["reports"][tag].avg_deviation_pct)
    return out
