import json
import logging
import math

import numpy as np

from srgmrank.errors import ConfigError
from srgmrank.models.catalog import (
    default_bounds, feasible_rows, get_spec, mean_matrix, ParamBounds, ParamVector, parse_model
)
from srgmrank.optimizer.ssa import optimize, PENALTY, SsaConfig

logger = logging.getLogger(__name__)


class FittedModel:
    """Parameters estimated for one model on one dataset, with fit metadata

    Arguments:
        model (ModelId) : fitted model
        params (ParamVector) : estimated parameters, including pinned ones
        objective_value (float) : SSE of ``params`` on the dataset
        config_used (SsaConfig) : optimizer settings, including the seed
        dataset_name (str) : name of the fitted dataset
        underdetermined (bool, optional) : fewer observations than parameters plus one. Defaults to False.
        fixed (sequence of str, optional) : names of pinned parameters. Defaults to ().
        restarts (int, optional) : optimizer runs, restart ``r`` seeded with ``seed + r``. Defaults to 1.
        best_restart (int, optional) : index of the run that produced ``params``. Defaults to 0.
        iterations (int, optional) : iterations of the winning run. Defaults to None.
        evaluations (int, optional) : objective evaluations of all runs. Defaults to None.
        history (list of float, optional) : best-fitness history of the winning run. Defaults to None.
    """

    def __init__(
            self, model, params, objective_value, config_used, dataset_name,
            underdetermined=False, fixed=(), restarts=1, best_restart=0,
            iterations=None, evaluations=None, history=None):
        self.model = parse_model(model)
        self.params = params
        self.objective_value = float(objective_value)
        self.config_used = config_used
        self.dataset_name = dataset_name
        self.underdetermined = bool(underdetermined)
        self.fixed = tuple(fixed)
        self.restarts = int(restarts)
        self.best_restart = int(best_restart)
        self.iterations = iterations
        self.evaluations = evaluations
        self.history = list(history) if history is not None else []

    @property
    def seed(self):
        return self.config_used.seed

    def to_dict(self):
        return {
            "model": self.model.short_name,
            "dataset": self.dataset_name,
            "params": self.params.as_dict(),
            "objective_value": self.objective_value,
            "underdetermined": self.underdetermined,
            "fixed": list(self.fixed),
            "seed": self.seed,
            "restarts": self.restarts,
            "best_restart": self.best_restart,
            "iterations": self.iterations,
            "evaluations": self.evaluations,
            "config": self.config_used.to_dict(),
            "history": self.history,
        }

    @classmethod
    def from_dict(cls, values):
        model = parse_model(values["model"])
        names = get_spec(model).param_names
        params = ParamVector(names, [values["params"][name] for name in names])
        return cls(
            model, params, values["objective_value"], SsaConfig.from_dict(values["config"]), values["dataset"],
            underdetermined=values.get("underdetermined", False), fixed=values.get("fixed", ()),
            restarts=values.get("restarts", 1), best_restart=values.get("best_restart", 0),
            iterations=values.get("iterations"), evaluations=values.get("evaluations"),
            history=values.get("history"),
        )

    def write_json(self, path):
        with open(path, "w", encoding="utf8", newline="\n") as f:
            json.dump(self.to_dict(), f, indent=2)
            f.write("\n")

    @classmethod
    def read_json(cls, path):
        with open(path, "r", encoding="utf8") as f:
            return cls.from_dict(json.load(f))

    def __eq__(self, other):
        if not isinstance(other, FittedModel):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __repr__(self):
        return f"FittedModel({self.model.short_name}, {self.params!r}, objective={self.objective_value:.6g})"


def _sse_rows(dataset, model, matrix):
    """SSE of every row of an (n, D) candidate matrix; infeasible or non-finite rows get PENALTY"""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    feasible = feasible_rows(model, matrix)
    residuals = dataset.counts - mean_matrix(model, matrix, dataset.times)
    with np.errstate(all="ignore"):
        sse = (residuals ** 2).sum(axis=1)
    return np.where(feasible & np.isfinite(sse), sse, PENALTY)


def objective(dataset, model, params):
    """Sum of squared errors between observed and modelled cumulative faults

    Parameter vectors outside the model's constraint region score ``PENALTY``.
    """
    values = params.values if isinstance(params, ParamVector) else np.asarray(params, dtype=float)
    return float(_sse_rows(dataset, parse_model(model), values[None, :])[0])


class _PinnedObjective:
    """Vectorized SSE over the free parameters, with pinned values filled in"""

    def __init__(self, dataset, model, names, fixed):
        self.dataset = dataset
        self.model = model
        self.free = [i for i, name in enumerate(names) if name not in fixed]
        self.template = np.array([fixed.get(name, np.nan) for name in names], dtype=float)

    def expand(self, free_values):
        free_values = np.atleast_2d(free_values)
        matrix = np.tile(self.template, (len(free_values), 1))
        matrix[:, self.free] = free_values
        return matrix

    def __call__(self, free_values):
        return _sse_rows(self.dataset, self.model, self.expand(free_values))


def _check_fixed(model, names, fixed):
    fixed = dict(fixed or {})
    unknown = sorted(set(fixed) - set(names))
    if unknown:
        raise ConfigError(f"cannot pin {unknown}: {model.short_name} has parameters {names}")
    for name, value in fixed.items():
        if not math.isfinite(float(value)):
            raise ConfigError(f"pinned value of '{name}' must be finite, got {value}")
    if len(fixed) == len(names):
        raise ConfigError(f"at least one parameter of {model.short_name} must stay free")
    return {name: float(value) for name, value in fixed.items()}


def fit_model(dataset, model, config=None, bounds=None, fixed=None, restarts=1):
    """Estimate the parameters of ``model`` on ``dataset`` by minimizing the SSE with SSA

    Arguments:
        dataset (FailureDataset) : observations
        model (ModelId or str) : catalog model
        config (SsaConfig, optional) : optimizer settings. Defaults to ``SsaConfig()``.
        bounds (ParamBounds, optional) : search box. Defaults to ``default_bounds(model, dataset)``.
        fixed (dict, optional) : parameter name -> pinned value. Defaults to None.
        restarts (int, optional) : independent runs seeded ``seed, seed + 1, ...``; the lowest
            objective wins, the earliest on ties. Defaults to 1.

    Raises:
        ConfigError: unknown pinned names, bounds for other parameters, restarts < 1

    Returns:
        FittedModel
    """
    model = parse_model(model)
    spec = get_spec(model)
    config = config or SsaConfig()
    bounds = bounds if bounds is not None else default_bounds(model, dataset)
    if not isinstance(bounds, ParamBounds) or bounds.names != spec.param_names:
        raise ConfigError(f"bounds of {model.short_name} must be ParamBounds over {spec.param_names}")
    if restarts < 1:
        raise ConfigError(f"restarts must be >= 1, got {restarts}")
    fixed = _check_fixed(model, spec.param_names, fixed)

    pinned = _PinnedObjective(dataset, model, spec.param_names, fixed)
    search_bounds = bounds.select([name for name in spec.param_names if name not in fixed])

    best, best_restart, evaluations = None, 0, 0
    for restart in range(restarts):
        run_config = config.replace(seed=(config.seed + restart) % 2 ** 64)
        result = optimize(pinned, search_bounds, run_config, vectorized=True)
        evaluations += result.evaluations
        if best is None or result.fitness < best.fitness:
            best, best_restart = result, restart

    params = ParamVector(spec.param_names, pinned.expand(best.position)[0])
    underdetermined = dataset.k <= spec.dimension
    if underdetermined:
        logger.warning(f"{model.short_name} has {spec.dimension} parameters but {dataset.name} only {dataset.k} points")
    fitted = FittedModel(
        model, params, objective(dataset, model, params), config, dataset.name,
        underdetermined=underdetermined, fixed=sorted(fixed, key=spec.param_names.index),
        restarts=restarts, best_restart=best_restart,
        iterations=best.iterations, evaluations=evaluations, history=best.history,
    )
    logger.debug(f"Fitted {fitted!r} with seed {config.seed}")
    return fitted
