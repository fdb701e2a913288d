"""Goodness-of-fit criteria for a fitted model on a failure dataset.

Residuals are oriented as ``e_i = m(t_i) - m_i`` (estimate minus observation)
and ``p`` is the number of model parameters.
"""
import logging
from enum import Enum

import numpy as np
import pandas as pd

from srgmrank.errors import ConfigError, CriterionError
from srgmrank.models.catalog import get_spec, intensity, mean_value

EXTREME_ROWS = ("Amin", "Amax")
MODEL_COLUMN = "model"

logger = logging.getLogger(__name__)


class Direction(Enum):
    LOWER_IS_BETTER = "lower"
    HIGHER_IS_BETTER = "higher"


class CriterionId(Enum):
    Bias = "Bias"
    MSE = "MSE"
    MAE = "MAE"
    MEOP = "MEOP"
    AE = "AE"
    Noise = "Noise"
    PRR = "PRR"
    Variance = "Variance"
    RMSPE = "RMSPE"
    Rsq = "Rsq"
    SSE = "SSE"
    TS = "TS"

    @property
    def direction(self):
        if self is CriterionId.Rsq:
            return Direction.HIGHER_IS_BETTER
        return Direction.LOWER_IS_BETTER

    def __str__(self):
        return self.value


DEFAULT_RANKING_CRITERIA = (
    CriterionId.MSE, CriterionId.MAE, CriterionId.MEOP, CriterionId.AE, CriterionId.Noise,
    CriterionId.RMSPE, CriterionId.SSE, CriterionId.TS, CriterionId.PRR, CriterionId.Rsq,
)

_ALIASES = {"rsqr": CriterionId.Rsq, "r_sq": CriterionId.Rsq, "r2": CriterionId.Rsq}


def parse_criterion(name):
    if isinstance(name, CriterionId):
        return name
    key = str(name).strip().lower()
    for criterion in CriterionId:
        if criterion.value.lower() == key:
            return criterion
    if key in _ALIASES:
        return _ALIASES[key]
    valid = ", ".join(c.value for c in CriterionId)
    raise ConfigError(f"unknown criterion '{name}'; valid names are: {valid}")


def _degrees_of_freedom(k, n_params, offset=0):
    dof = k - n_params + offset
    if dof <= 0:
        raise CriterionError(f"k-p{'+' + str(offset) if offset else ''} <= 0 for model with {n_params} parameters on {k} points")
    return dof


def bias(actual, estimated):
    return float(np.mean(estimated - actual))


def sse(actual, estimated):
    return float(np.sum((estimated - actual) ** 2))


def mse(actual, estimated, n_params):
    return sse(actual, estimated) / _degrees_of_freedom(len(actual), n_params)


def mae(actual, estimated, n_params):
    return float(np.sum(np.abs(estimated - actual))) / _degrees_of_freedom(len(actual), n_params)


def meop(actual, estimated, n_params):
    return float(np.sum(np.abs(estimated - actual))) / _degrees_of_freedom(len(actual), n_params, offset=1)


def accuracy_of_estimation(actual_total, estimated_total):
    """|M_a - a| / M_a with M_a the observed and ``a`` the estimated faults at the last observation"""
    if actual_total <= 0:
        raise CriterionError(f"AE needs a positive observed total, got {actual_total}")
    return abs((actual_total - estimated_total) / actual_total)


def noise(intensities):
    """Sum of relative intensity changes between consecutive observation times, from the second one on"""
    intensities = np.asarray(intensities, dtype=float)
    previous = intensities[:-1]
    if np.any(previous == 0):
        row = int(np.flatnonzero(previous == 0)[0]) + 1
        raise CriterionError(f"intensity is zero at observation {row}")
    return float(np.sum(np.abs((intensities[1:] - previous) / previous)))


def predictive_ratio_risk(actual, estimated):
    if np.any(estimated == 0):
        row = int(np.flatnonzero(estimated == 0)[0]) + 1
        raise CriterionError(f"estimated value is zero at observation {row}")
    return float(np.sum((estimated - actual) / estimated))


def variance(actual, estimated):
    """Sample standard deviation of the prediction errors around the bias"""
    k = len(actual)
    if k < 2:
        raise CriterionError(f"Variance needs at least 2 points, got {k}")
    errors = estimated - actual
    return float(np.sqrt(np.sum((errors - bias(actual, estimated)) ** 2) / (k - 1)))


def rmspe(actual, estimated):
    return float(np.sqrt(variance(actual, estimated) ** 2 + bias(actual, estimated) ** 2))


def r_squared(actual, estimated):
    spread = float(np.sum((actual - np.mean(actual)) ** 2))
    if spread == 0:
        raise CriterionError("Rsq is undefined when every observed count is equal")
    return 1 - sse(actual, estimated) / spread


def theil_statistic(actual, estimated):
    scale = float(np.sum(actual ** 2))
    if scale == 0:
        raise CriterionError("TS is undefined when every observed count is zero")
    return 100 * float(np.sqrt(sse(actual, estimated) / scale))


def compute_criterion(criterion, actual, estimated, n_params, intensities=None):
    """Evaluate a criterion on plain arrays

    Arguments:
        criterion (CriterionId or str) : criterion to compute
        actual (array-like) : observed cumulative faults m_1..m_k
        estimated (array-like) : model values m(t_1)..m(t_k)
        n_params (int) : number of model parameters p
        intensities (array-like, optional) : lambda(t_1)..lambda(t_k), required by Noise. Defaults to None.

    Raises:
        CriterionError: when the criterion's precondition fails

    Returns:
        float
    """
    criterion = parse_criterion(criterion)
    actual = np.asarray(actual, dtype=float)
    estimated = np.asarray(estimated, dtype=float)
    if actual.shape != estimated.shape:
        raise CriterionError(f"actual and estimated values differ in shape: {actual.shape} vs {estimated.shape}")
    if criterion is CriterionId.Bias:
        return bias(actual, estimated)
    if criterion is CriterionId.MSE:
        return mse(actual, estimated, n_params)
    if criterion is CriterionId.MAE:
        return mae(actual, estimated, n_params)
    if criterion is CriterionId.MEOP:
        return meop(actual, estimated, n_params)
    if criterion is CriterionId.AE:
        return accuracy_of_estimation(actual[-1], estimated[-1])
    if criterion is CriterionId.Noise:
        if intensities is None:
            raise CriterionError("Noise needs the model intensities at the observation times")
        return noise(intensities)
    if criterion is CriterionId.PRR:
        return predictive_ratio_risk(actual, estimated)
    if criterion is CriterionId.Variance:
        return variance(actual, estimated)
    if criterion is CriterionId.RMSPE:
        return rmspe(actual, estimated)
    if criterion is CriterionId.Rsq:
        return r_squared(actual, estimated)
    if criterion is CriterionId.SSE:
        return sse(actual, estimated)
    return theil_statistic(actual, estimated)


def evaluate_criterion(criterion, dataset, fitted):
    """Evaluate ``criterion`` for ``fitted`` on ``dataset``

    Raises:
        CriterionError: naming the model and criterion when the precondition fails
    """
    criterion = parse_criterion(criterion)
    estimated = mean_value(fitted.model, fitted.params, dataset.times)
    rates = intensity(fitted.model, fitted.params, dataset.times) if criterion is CriterionId.Noise else None
    n_params = get_spec(fitted.model).dimension
    try:
        return compute_criterion(criterion, dataset.counts, estimated, n_params, intensities=rates)
    except CriterionError as e:
        raise CriterionError(str(e), criterion=criterion.value, model=fitted.model.short_name) from e


class CriteriaMatrix:
    """Criterion values of several models, one row per model and one column per criterion

    Arguments:
        values (pandas.DataFrame) : index = model labels, columns = criteria
        directions (dict, optional) : CriterionId -> Direction. Defaults to each criterion's own direction.

    Raises:
        ConfigError: duplicate model labels, empty matrix, or missing / non-finite cells
    """

    def __init__(self, values, directions=None):
        frame = values.copy()
        frame.columns = [parse_criterion(c) for c in frame.columns]
        frame.index = [str(label) for label in frame.index]
        frame.index.name = MODEL_COLUMN
        if frame.empty:
            raise ConfigError("a criteria matrix needs at least one model and one criterion")
        if frame.index.has_duplicates:
            raise ConfigError(f"duplicate models in criteria matrix: {sorted(set(frame.index[frame.index.duplicated()]))}")
        if frame.columns.has_duplicates:
            raise ConfigError("duplicate criteria in criteria matrix")
        frame = frame.astype(float)
        missing = ~np.isfinite(frame.to_numpy())
        if missing.any():
            row, col = np.argwhere(missing)[0]
            raise ConfigError(f"criteria matrix cell ({frame.index[row]}, {frame.columns[col]}) is missing or not finite")
        directions = dict(directions or {})
        self.directions = {c: directions.get(c, c.direction) for c in frame.columns}
        self.values = frame

    @property
    def models(self):
        return list(self.values.index)

    @property
    def criteria(self):
        return list(self.values.columns)

    @property
    def amin(self):
        return self.values.min(axis=0)

    @property
    def amax(self):
        return self.values.max(axis=0)

    def with_column(self, criterion, column, direction):
        """Copy of the matrix with one column's values and direction replaced"""
        criterion = parse_criterion(criterion)
        values = self.values.copy()
        values[criterion] = column
        directions = dict(self.directions)
        directions[criterion] = direction
        return CriteriaMatrix(values, directions)

    def select(self, criteria):
        """Copy restricted to ``criteria``, columns in the given order

        Raises:
            ConfigError: when a selected criterion is not a column of the matrix
        """
        chosen = _ordered_selection(criteria)
        missing = [c.value for c in chosen if c not in self.directions]
        if missing:
            raise ConfigError(f"criteria {missing} are not in the criteria table {[c.value for c in self.criteria]}")
        return CriteriaMatrix(self.values[chosen], {c: self.directions[c] for c in chosen})

    def to_frame(self, extremes=True):
        """Table with criterion names as columns, plus the Amin/Amax rows when ``extremes``"""
        frame = self.values.copy()
        if extremes:
            frame.loc[EXTREME_ROWS[0]] = self.amin
            frame.loc[EXTREME_ROWS[1]] = self.amax
        frame.columns = [c.value for c in self.values.columns]
        frame.index.name = MODEL_COLUMN
        return frame

    def to_csv(self, path, extremes=True):
        self.to_frame(extremes).to_csv(path, lineterminator="\n")

    @classmethod
    def from_csv(cls, path):
        """Read a table with a ``model`` column and one column per criterion; Amin/Amax rows are dropped"""
        frame = pd.read_csv(path, dtype={MODEL_COLUMN: str})
        if MODEL_COLUMN not in frame.columns:
            raise ConfigError(f"criteria table must have a '{MODEL_COLUMN}' column, got {list(frame.columns)}")
        frame[MODEL_COLUMN] = frame[MODEL_COLUMN].str.strip()
        frame = frame[~frame[MODEL_COLUMN].isin(EXTREME_ROWS)].set_index(MODEL_COLUMN)
        return cls(frame)

    def __eq__(self, other):
        if not isinstance(other, CriteriaMatrix):
            return NotImplemented
        return self.directions == other.directions and self.values.equals(other.values)

    def __repr__(self):
        return f"CriteriaMatrix({len(self.models)} models x {[c.value for c in self.criteria]})"


def _ordered_selection(selection):
    if selection is None:
        return list(DEFAULT_RANKING_CRITERIA)
    if isinstance(selection, (set, frozenset)):
        chosen = {parse_criterion(c) for c in selection}
        ordered = [c for c in CriterionId if c in chosen]
    else:
        ordered = list(dict.fromkeys(parse_criterion(c) for c in selection))
    if not ordered:
        raise ConfigError("criteria selection must not be empty")
    return ordered


def evaluate_all(dataset, fitted_models, selection=None):
    """Criteria matrix of several fits on one dataset

    Arguments:
        dataset (FailureDataset) : dataset every fit refers to
        fitted_models (list of FittedModel) : one fit per model
        selection (iterable of CriterionId, optional) : columns; a sequence keeps its order, a set
            follows the catalog order. Defaults to ``DEFAULT_RANKING_CRITERIA``.

    Raises:
        ConfigError: empty inputs or fits of another dataset
        CriterionError: naming the first model/criterion pair that cannot be computed

    Returns:
        CriteriaMatrix
    """
    criteria = _ordered_selection(selection)
    if not fitted_models:
        raise ConfigError("no fitted models to evaluate")
    foreign = [f.model.short_name for f in fitted_models if f.dataset_name != dataset.name]
    if foreign:
        raise ConfigError(f"fits of {foreign} were not made on dataset '{dataset.name}'")
    rows = {}
    for fitted in fitted_models:
        rows[fitted.model.short_name] = [evaluate_criterion(c, dataset, fitted) for c in criteria]
    logger.info(f"Evaluated {len(criteria)} criteria for {len(rows)} models on {dataset.name}")
    return CriteriaMatrix(pd.DataFrame.from_dict(rows, orient="index", columns=criteria))
