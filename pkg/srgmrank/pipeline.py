import concurrent.futures
import logging
import os
import timeit

import numpy as np
import pandas as pd
from tqdm import tqdm

from srgmrank.errors import ConfigError
from srgmrank.evaluation.criteria import CriteriaMatrix, evaluate_all
from srgmrank.evaluation.ranking import rank_models
from srgmrank.models.catalog import get_spec, mean_value, ModelId, parse_model
from srgmrank.models.fit import fit_model, FittedModel

FITS_FOLDER = "fits"
PARAMS_FILE = "params.csv"
CRITERIA_FILE = "criteria.csv"
RANKING_FILE = "ranking.csv"
CURVE_TEMPLATE = "curve_{}.csv"

logger = logging.getLogger(__name__)


def model_seed(seed, model):
    """Per-model seed, independent of which other models are fitted"""
    return seed ^ parse_model(model).index


def fixed_parameters(model, pin_ztp_p=False):
    if pin_ztp_p and parse_model(model) is ModelId.ZTP:
        return {"p": 1.0}
    return {}


def fit_one(args):
    dataset, model, ssa_config, fixed, restarts = args
    return fit_model(dataset, model, ssa_config, fixed=fixed, restarts=restarts)


def _set_fit_args(dataset, models, ssa_config, pin_ztp_p, restarts):
    return [
        (dataset, model, ssa_config.replace(seed=model_seed(ssa_config.seed, model)), fixed_parameters(model, pin_ztp_p), restarts)
        for model in models
    ]


def fit_models(dataset, models, ssa_config, pin_ztp_p=False, restarts=1, workers=None, progress=True):
    """Fit several models to one dataset, in parallel processes unless ``workers == 1``

    Model ``i`` of the catalog is seeded with ``ssa_config.seed ^ i`` so the results do not
    depend on the selection, its order or the number of workers.

    Returns:
        list of FittedModel: in the order of ``models``
    """
    models = [parse_model(m) for m in models]
    fit_args = _set_fit_args(dataset, models, ssa_config, pin_ztp_p, restarts)
    print(f"Fitting {len(models)} models to {dataset.name} ({dataset.k} points)")

    start_time = timeit.default_timer()
    if workers == 1 or len(fit_args) == 1:
        fitted = [fit_one(args) for args in tqdm(fit_args, disable=not progress)]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as executor:
            fit_iterator = executor.map(fit_one, fit_args)
            # wrapping tqdm for progress report
            fitted = list(tqdm(fit_iterator, total=len(fit_args), disable=not progress))
    elapsed = timeit.default_timer() - start_time
    print(f"Time to fit {len(models)} models: {elapsed:.3f} sec")
    return fitted


def params_table(fitted_models):
    """One row per model: ``model``, the union of parameter names, ``objective``"""
    names = []
    for fitted in fitted_models:
        names.extend(n for n in fitted.params.names if n not in names)
    rows = [
        dict(model=fitted.model.short_name, **fitted.params.as_dict(), objective=fitted.objective_value)
        for fitted in fitted_models
    ]
    return pd.DataFrame(rows, columns=["model"] + names + ["objective"])


def _fit_path(output_dir, model, suffix):
    return os.path.join(output_dir, FITS_FOLDER, f"{parse_model(model).slug}{suffix}")


def write_fits(fitted_models, output_dir):
    """Write ``params.csv`` plus ``fits/<model>.json`` and ``fits/<model>_history.csv`` per model"""
    os.makedirs(os.path.join(output_dir, FITS_FOLDER), exist_ok=True)
    params_table(fitted_models).to_csv(os.path.join(output_dir, PARAMS_FILE), index=False, lineterminator="\n")
    for fitted in fitted_models:
        fitted.write_json(_fit_path(output_dir, fitted.model, ".json"))
        history = pd.DataFrame({"iter": np.arange(1, len(fitted.history) + 1), "best_fitness": fitted.history})
        history.to_csv(_fit_path(output_dir, fitted.model, "_history.csv"), index=False, lineterminator="\n")
    print(f"Stored {len(fitted_models)} fits in {output_dir}")


def read_fits(output_dir, models):
    """Load earlier fit results

    Raises:
        ConfigError: when a model has no result file, telling how to produce it
    """
    missing = [m.slug for m in models if not os.path.isfile(_fit_path(output_dir, m, ".json"))]
    if missing:
        raise ConfigError(
            f"no fit results for {missing} in {os.path.join(output_dir, FITS_FOLDER)}; "
            "run the 'fit' command first or pass --criteria-csv"
        )
    return [FittedModel.read_json(_fit_path(output_dir, m, ".json")) for m in models]


def write_ranking(matrix, result, output_dir):
    os.makedirs(output_dir, exist_ok=True)
    matrix.to_csv(os.path.join(output_dir, CRITERIA_FILE))
    result.to_csv(os.path.join(output_dir, RANKING_FILE))
    result.write_matrices(output_dir)
    print(f"Stored criteria and ranking of {len(matrix.models)} models in {output_dir}")


def curve_frame(dataset, fitted, grid_points):
    """Observed and fitted cumulative faults at the observation times plus a dense grid over [0, t_k]"""
    grid = np.linspace(0.0, dataset.last_time, grid_points)
    times = np.concatenate([dataset.times, grid])
    actual = np.concatenate([dataset.counts, np.full(grid_points, np.nan)])
    frame = pd.DataFrame({"t": times, "actual": actual, "estimated": mean_value(fitted.model, fitted.params, times)})
    return frame.sort_values("t", kind="mergesort").reset_index(drop=True)


def write_curve(dataset, fitted, output_dir, grid_points):
    os.makedirs(output_dir, exist_ok=True)
    path = os.path.join(output_dir, CURVE_TEMPLATE.format(fitted.model.slug))
    curve_frame(dataset, fitted, grid_points).to_csv(path, index=False, na_rep="", lineterminator="\n")
    return path


def run_fit(config, progress=True):
    dataset = config.load_dataset()
    fitted = fit_models(
        dataset, config.models, config.ssa, pin_ztp_p=config.pin_ztp_p,
        restarts=config.restarts, workers=config.workers, progress=progress,
    )
    write_fits(fitted, config.output_dir)
    return fitted


def run_rank(config, criteria_csv=None, fitted=None):
    """Criteria and ranking tables from fits or, when ``criteria_csv`` is given, from a criteria table

    The criteria-table path reads no dataset and runs no optimizer.
    """
    if criteria_csv is not None:
        if not os.path.isfile(criteria_csv):
            raise ConfigError(f"criteria table not found: {criteria_csv}")
        matrix = CriteriaMatrix.from_csv(criteria_csv).select(config.criteria)
    else:
        dataset = config.load_dataset()
        fitted = fitted if fitted is not None else read_fits(config.output_dir, config.models)
        matrix = evaluate_all(dataset, fitted, config.criteria)
    result = rank_models(matrix, config.prr_direction)
    write_ranking(matrix, result, config.output_dir)
    return result


def run_curve(config, model, fitted=None):
    model = parse_model(model)
    dataset = config.load_dataset()
    if fitted is None:
        fitted = read_fits(config.output_dir, [model])[0]
    path = write_curve(dataset, fitted, config.output_dir, config.grid_points)
    logger.info(f"Curve of {model.short_name} written to {path}")
    return path


def run_report(config, progress=True):
    """Fit, rank and write the curve of every selected model"""
    fitted = run_fit(config, progress=progress)
    result = run_rank(config, fitted=fitted)
    for fit in fitted:
        run_curve(config, fit.model, fitted=fit)
    best = parse_model(result.best)
    print(f"Best model for {fitted[0].dataset_name}: {best.short_name} ({len(get_spec(best).param_names)} parameters)")
    return result
