"""Run configuration assembled from defaults, a key=value file and command-line flags.

Example file::

    # dataset and outputs
    dataset=example/sample/weekly_faults.csv
    output_dir=results
    models=GoelOkumoto, LogGro, Z-T-P
    seed=7
    max_iters=300
"""
import logging
import os

from dotenv import dotenv_values

from srgmrank.data.dataset import load_dataset
from srgmrank.errors import ConfigError
from srgmrank.evaluation.criteria import DEFAULT_RANKING_CRITERIA, parse_criterion
from srgmrank.evaluation.ranking import DEFAULT_PRR_DIRECTION, PRR_DIRECTIONS
from srgmrank.models.catalog import ModelId, parse_model
from srgmrank.optimizer.ssa import SsaConfig

DEFAULT_OUTPUT_DIR = "results"
DEFAULT_GRID_POINTS = 200

logger = logging.getLogger(__name__)


def _parse_bool(text):
    lowered = str(text).strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_list(text):
    return [item.strip() for item in str(text).split(",") if item.strip()]


def _parse_optional_int(text):
    return None if str(text).strip().lower() in ("", "none", "auto") else int(text)


_PARSERS = {
    "dataset": str,
    "output_dir": str,
    "models": _parse_list,
    "criteria": _parse_list,
    "seed": int,
    "pop": int,
    "r_a": float,
    "p_c": float,
    "p_m": float,
    "max_iters": int,
    "intensity_constant": float,
    "stall_iters": int,
    "restarts": int,
    "prr_direction": str,
    "pin_ztp_p": _parse_bool,
    "workers": _parse_optional_int,
    "grid_points": int,
}
CONFIG_KEYS = tuple(_PARSERS)


def read_config_file(path):
    """Parse a key=value config file into typed values

    Raises:
        ConfigError: missing file, unknown key, or a value that does not parse
    """
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    values = {}
    for key, text in dotenv_values(path).items():
        key = key.strip().lower()
        if key not in _PARSERS:
            raise ConfigError(f"unknown config key '{key}' in {path}; valid keys are: {', '.join(CONFIG_KEYS)}")
        if text is None:
            raise ConfigError(f"config key '{key}' in {path} has no value")
        try:
            values[key] = _PARSERS[key](text)
        except ValueError:
            raise ConfigError(f"invalid value {text!r} for config key '{key}' in {path}")
    logger.debug(f"Read {sorted(values)} from {path}")
    return values


class RunConfig:
    """Everything a fit / rank / curve run needs

    Arguments:
        dataset (str, optional) : path of the dataset CSV. Defaults to None.
        models (list, optional) : model names. Defaults to all 16 models.
        criteria (list, optional) : criterion names. Defaults to ``DEFAULT_RANKING_CRITERIA``.
        output_dir (str, optional) : output folder. Defaults to "results".
        seed (int, optional) : base seed; model ``i`` of the catalog is fitted with ``seed ^ i``. Defaults to 1.
        prr_direction (str, optional) : PRR handling of the ranking. Defaults to ``DEFAULT_PRR_DIRECTION``.
        pin_ztp_p (bool, optional) : fix ``p = 1`` when fitting Z-T-P. Defaults to False.
        restarts (int, optional) : optimizer runs per model. Defaults to 1.
        workers (int, optional) : parallel fitting processes, 1 runs in-process. Defaults to None (one per CPU).
        grid_points (int, optional) : dense grid size of curve files. Defaults to 200.
        **ssa (optional) : remaining ``SsaConfig`` fields (pop, r_a, p_c, p_m, max_iters,
            intensity_constant, stall_iters)

    Raises:
        ConfigError: when a value is invalid
    """

    def __init__(
            self, dataset=None, models=None, criteria=None, output_dir=DEFAULT_OUTPUT_DIR, seed=1,
            prr_direction=DEFAULT_PRR_DIRECTION, pin_ztp_p=False, restarts=1, workers=None,
            grid_points=DEFAULT_GRID_POINTS, **ssa):
        unknown = set(ssa) - set(SsaConfig.FIELDS)
        if unknown:
            raise ConfigError(f"unknown settings {sorted(unknown)}")
        self.dataset = dataset
        self.models = [parse_model(m) for m in (models if models is not None else list(ModelId))]
        self.criteria = [parse_criterion(c) for c in (criteria if criteria is not None else DEFAULT_RANKING_CRITERIA)]
        self.output_dir = output_dir
        self.prr_direction = prr_direction
        self.pin_ztp_p = bool(pin_ztp_p)
        self.restarts = int(restarts)
        self.workers = workers
        self.grid_points = int(grid_points)
        self.ssa = SsaConfig(seed=seed, **ssa)
        self._validate()

    def _validate(self):
        if not self.models:
            raise ConfigError("model selection must not be empty")
        if not self.criteria:
            raise ConfigError("criteria selection must not be empty")
        if len(set(self.models)) != len(self.models):
            raise ConfigError("model selection lists a model twice")
        if self.prr_direction not in PRR_DIRECTIONS:
            raise ConfigError(f"prr_direction must be one of {PRR_DIRECTIONS}, got {self.prr_direction!r}")
        if self.restarts < 1:
            raise ConfigError(f"restarts must be >= 1, got {self.restarts}")
        if self.workers is not None and self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.grid_points < 2:
            raise ConfigError(f"grid_points must be >= 2, got {self.grid_points}")

    @property
    def seed(self):
        return self.ssa.seed

    @classmethod
    def from_sources(cls, config_file=None, overrides=None):
        """Defaults, then ``config_file`` values, then non-None ``overrides``"""
        values = read_config_file(config_file) if config_file else {}
        values.update({key: value for key, value in (overrides or {}).items() if value is not None})
        unknown = set(values) - set(CONFIG_KEYS)
        if unknown:
            raise ConfigError(f"unknown settings {sorted(unknown)}")
        return cls(**values)

    def load_dataset(self):
        """Read and validate the configured dataset

        Raises:
            ConfigError: no dataset configured or the file does not exist
            DatasetError: the file does not parse or validate
        """
        if not self.dataset:
            raise ConfigError("no dataset configured; pass --dataset or set 'dataset' in the config file")
        if not os.path.isfile(self.dataset):
            raise ConfigError(f"dataset file not found: {self.dataset}")
        return load_dataset(self.dataset)

    def to_dict(self):
        values = {
            "dataset": self.dataset,
            "models": [m.slug for m in self.models],
            "criteria": [c.value for c in self.criteria],
            "output_dir": self.output_dir,
            "prr_direction": self.prr_direction,
            "pin_ztp_p": self.pin_ztp_p,
            "restarts": self.restarts,
            "workers": self.workers,
            "grid_points": self.grid_points,
        }
        values.update(self.ssa.to_dict())
        return values

    def __repr__(self):
        return f"RunConfig({self.to_dict()})"
