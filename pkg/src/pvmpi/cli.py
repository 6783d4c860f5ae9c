"""Command-line pipeline driver.

Subcommands (all take ``--config`` plus optional ``--seed``, ``--copula``,
``--out`` overrides):

  synth          write a synthetic dataset (data.csv + truth.json)
  fit-marginals  quantile models, per-day curves, PIT uniforms
  fit-copula     Gaussian and/or R-Vine copula on the training PIT
  sample         per-day scenario sets for the evaluation days
  mpi            multivariate prediction intervals from the scenarios
  score          goodness-of-fit plus ES/VS/calibration per model
  report         merge the per-model scores into report.json
  plot           emit the SVG figures

File formats are documented in the module that owns them (data_io,
marginals, scenarios, mpi, scoring).
"""

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import data_io, gaussian, marginals, mpi, pipeline, plots, rvine, scenarios, scoring
from .config import RunConfig

logger = logging.getLogger("pvmpi")

MODEL_FILES = {"gaussian": "gaussian_model.json", "rvine": "rvine_model.json"}


def _load_config(args) -> RunConfig:
    cfg = RunConfig.from_json(args.config) if args.config else RunConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    if args.copula is not None:
        cfg.copula = args.copula
    if args.out is not None:
        cfg.out_dir = args.out
    os.makedirs(cfg.out_dir, exist_ok=True)
    return cfg


def _out(cfg, name):
    return os.path.join(cfg.out_dir, name)


def _models_requested(cfg):
    return ("gaussian", "rvine") if cfg.copula == "both" else (cfg.copula,)


def _load_days(cfg):
    records = data_io.load_csv(cfg.data_csv, cfg.feature_columns)
    days = data_io.normalize_and_window(records, cfg.capacity, cfg.hour_start, cfg.hour_end)
    return data_io.split(days, cfg.train_end)


def _write_matrix_csv(path, day_keys, matrix):
    dim = matrix.shape[1]
    with open(path, "w") as fh:
        fh.write("day" + "".join(f",h{d + 1}" for d in range(dim)) + "\n")
        for key, row in zip(day_keys, matrix):
            fh.write(key + "".join(f",{float(x)!r}" for x in row) + "\n")


def _read_matrix_csv(path):
    days, rows = [], []
    with open(path) as fh:
        fh.readline()
        for line in fh:
            parts = line.strip().split(",")
            days.append(parts[0])
            rows.append([float(x) for x in parts[1:]])
    return days, np.asarray(rows)


# -- subcommands ------------------------------------------------------------

def cmd_synth(args):
    cfg = _load_config(args)
    dim = cfg.dim
    if args.truth:
        with open(args.truth) as fh:
            spec = data_io.SynthSpec.from_dict(json.load(fh))
    else:
        corr = np.full((dim, dim), 0.5) + 0.5 * np.eye(dim)
        spec = data_io.SynthSpec(copula={"type": "gaussian", "corr": corr.tolist()})
    days = data_io.synth_generate(cfg.seed, args.days, dim, spec)
    data_path = _out(cfg, "data.csv")
    data_io.write_records_csv(days, data_path, cfg.capacity, cfg.hour_start)
    with open(_out(cfg, "truth.json"), "w") as fh:
        json.dump(spec.to_dict(), fh, sort_keys=True, indent=2)
        fh.write("\n")
    split_at = days[int(args.days * 0.6)].date
    cfg.data_csv = data_path
    cfg.train_end = split_at.isoformat()
    cfg.to_json(_out(cfg, "config.json"))
    logger.info("wrote %s (%d days, D=%d), train_end=%s", data_path, args.days, dim, split_at)
    return 0


def cmd_fit_marginals(args):
    cfg = _load_config(args)
    train_days, eval_days = _load_days(cfg)
    feature_names = cfg.feature_columns or [
        f"f{k + 1}" for k in range(train_days[0].features.shape[1])
    ]
    models, curves_train, curves_eval, pit_train = pipeline.fit_marginal_stage(
        train_days, eval_days, cfg.levels, feature_names)
    marginals.models_to_json(models, feature_names, _out(cfg, "marginal_models.json"))
    marginals.curves_to_csv(curves_train, _out(cfg, "curves_train.csv"))
    marginals.curves_to_csv(curves_eval, _out(cfg, "curves_eval.csv"))
    _write_matrix_csv(_out(cfg, "pit_train.csv"),
                      [d.date.isoformat() for d in train_days], pit_train)
    _write_matrix_csv(_out(cfg, "observed_eval.csv"),
                      [d.date.isoformat() for d in eval_days],
                      np.array([d.powers for d in eval_days]))
    logger.info("marginals fitted: %d train days, %d eval days", len(train_days), len(eval_days))
    return 0


def cmd_fit_copula(args):
    cfg = _load_config(args)
    _, pit_train = _read_matrix_csv(_out(cfg, "pit_train.csv"))
    for tag, model in pipeline.fit_copulas(pit_train, cfg.copula).items():
        model.save(_out(cfg, MODEL_FILES[tag]))
        logger.info("%s copula: loglik=%.3f kappa=%d", tag, model.loglik, model.kappa)
    return 0


def _load_model(cfg, tag):
    path = _out(cfg, MODEL_FILES[tag])
    if not os.path.exists(path):
        raise FileNotFoundError(f"{path} not found; run fit-copula first")
    return gaussian.GaussianCopulaModel.load(path) if tag == "gaussian" \
        else rvine.RVineModel.load(path)


def _eval_curves(cfg):
    by_day = marginals.curves_from_csv(_out(cfg, "curves_eval.csv"))
    return sorted(by_day), [by_day[k] for k in sorted(by_day)]


def cmd_sample(args):
    cfg = _load_config(args)
    _, curves_eval = _eval_curves(cfg)
    for tag in _models_requested(cfg):
        model = _load_model(cfg, tag)
        sets = pipeline.scenarios_for_days(model, tag, curves_eval, cfg.n_scenarios, cfg.seed)
        scenarios.export(sets, _out(cfg, f"scenarios_{tag}.csv"))
        logger.info("sampled %d x %d scenarios for %s", len(sets), cfg.n_scenarios, tag)
    return 0


def cmd_mpi(args):
    cfg = _load_config(args)
    day_keys, curves_eval = _eval_curves(cfg)
    for tag in _models_requested(cfg):
        per_day = scenarios.read_csv(_out(cfg, f"scenarios_{tag}.csv"))
        sets = [per_day[k] for k in day_keys]
        mpis = pipeline.mpi_for_days(sets, curves_eval, cfg.alphas)
        mpi.export(mpis, _out(cfg, f"mpi_{tag}.csv"))
        mpi.summary_json(mpis, _out(cfg, f"mpi_summary_{tag}.json"))
        logger.info("built %d x %d MPIs for %s", len(mpis), len(cfg.alphas), tag)
    return 0


def cmd_score(args):
    cfg = _load_config(args)
    day_keys, _ = _eval_curves(cfg)
    train_keys, pit_train = _read_matrix_csv(_out(cfg, "pit_train.csv"))
    obs_keys, observed = _read_matrix_csv(_out(cfg, "observed_eval.csv"))
    if obs_keys != day_keys:
        raise ValueError("observed_eval.csv and curves_eval.csv disagree on days")
    for tag in _models_requested(cfg):
        model = _load_model(cfg, tag)
        stats = pipeline.fit_stats(model, pit_train.shape[0])
        per_day = scenarios.read_csv(_out(cfg, f"scenarios_{tag}.csv"))
        sets = [per_day[k] for k in day_keys]
        mpis_by_day = mpi.read_csv(_out(cfg, f"mpi_{tag}.csv"))
        mpis = [mpis_by_day[k] for k in day_keys]
        eval_days = [
            data_io.DayMatrix(date=k, powers=row, features=np.zeros((len(row), 0)))
            for k, row in zip(day_keys, observed)
        ]
        report = pipeline.score_model(tag, stats, sets, mpis, eval_days, cfg.gamma)
        with open(_out(cfg, f"scores_{tag}.json"), "w") as fh:
            json.dump(report.to_dict(), fh, sort_keys=True, indent=2)
            fh.write("\n")
        scoring.reliability_to_csv(report.coverage, _out(cfg, f"reliability_{tag}.csv"))
        logger.info("%s: ES=%.5g VS=%.5g deviation=%.3g%%", tag,
                    report.mean_energy_score, report.mean_variogram_score,
                    report.avg_deviation_pct)
    return 0


def cmd_report(args):
    cfg = _load_config(args)
    doc = {}
    for tag in _models_requested(cfg):
        path = _out(cfg, f"scores_{tag}.json")
        if not os.path.exists(path):
            raise FileNotFoundError(f"{path} not found; run score first")
        with open(path) as fh:
            doc[tag] = json.load(fh)
    with open(_out(cfg, "report.json"), "w") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")
    logger.info("report.json written with rows: %s", ", ".join(sorted(doc)))
    return 0


def cmd_plot(args):
    cfg = _load_config(args)
    day_keys, curves_eval = _eval_curves(cfg)
    _, observed = _read_matrix_csv(_out(cfg, "observed_eval.csv"))
    day = args.day or day_keys[0]
    idx = day_keys.index(day)
    plot_dir = _out(cfg, "plots")
    os.makedirs(plot_dir, exist_ok=True)
    obs = observed[idx]

    def emit(name, svg):
        path = os.path.join(plot_dir, name)
        with open(path, "w") as fh:
            fh.write(svg)
        logger.info("wrote %s", path)

    emit("fan.svg", plots.fan_chart_svg(curves_eval[idx], obs, cfg.hour_start))
    coverage_by_model = {}
    for tag in _models_requested(cfg):
        scen = scenarios.read_csv(_out(cfg, f"scenarios_{tag}.csv"))[day]
        emit(f"scenarios_{tag}.svg", plots.scenarios_svg(scen.values, obs, cfg.hour_start))
        ms = mpi.read_csv(_out(cfg, f"mpi_{tag}.csv"))[day]
        emit(f"mpi_bands_{tag}.svg", plots.mpi_bands_svg(ms, obs, cfg.hour_start))
        mid = ms.boxes[0].lower.shape[0] // 2
        emit(f"boxes_{tag}.svg", plots.bivariate_boxes_svg(ms, mid - 1, mid, obs))
        rel_path = _out(cfg, f"reliability_{tag}.csv")
        if os.path.exists(rel_path):
            with open(rel_path) as fh:
                fh.readline()
                coverage_by_model[tag] = {
                    float(a): float(e) for a, e in
                    (line.strip().split(",") for line in fh)
                }
    if coverage_by_model:
        emit("reliability.svg", plots.reliability_svg(coverage_by_model))
    return 0


COMMANDS = {
    "synth": cmd_synth,
    "fit-marginals": cmd_fit_marginals,
    "fit-copula": cmd_fit_copula,
    "sample": cmd_sample,
    "mpi": cmd_mpi,
    "score": cmd_score,
    "report": cmd_report,
    "plot": cmd_plot,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pvmpi",
        description="PV power scenario generation and multivariate prediction intervals",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=str, default=None, help="run config JSON")
        p.add_argument("--seed", type=int, default=None, help="master seed override")
        p.add_argument("--copula", choices=("gaussian", "rvine", "both"), default=None)
        p.add_argument("--out", type=str, default=None, help="output directory override")
        if name == "synth":
            p.add_argument("--days", type=int, default=300)
            p.add_argument("--truth", type=str, default=None, help="truth spec JSON")
        if name == "plot":
            p.add_argument("--day", type=str, default=None, help="evaluation day to draw")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ValueError, OSError, RuntimeError) as exc:
        logger.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
