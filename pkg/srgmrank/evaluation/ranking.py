"""Weighted-criteria ranking of models.

For a criteria matrix ``a`` the ranking builds

* ratings ``X`` in [0, 1], 1 for the best value of a column and 0 for the worst;
* weights ``W = 1 - X``;
* weighted values ``A = W * a``;
* permanent values ``Z = sum(A) / sum(W)`` per model, smaller is better.
"""
import logging

import numpy as np
import pandas as pd

from srgmrank.errors import ConfigError
from srgmrank.evaluation.criteria import CriterionId, Direction

RAW = "raw"
ABSOLUTE = "absolute"
ABSOLUTE_HIGHER = "absolute_higher"
PRR_DIRECTIONS = (RAW, ABSOLUTE, ABSOLUTE_HIGHER)
# inverts the meaning of PRR (larger |PRR| rated better); the only direction that matches the
# published rankings of both reference datasets
DEFAULT_PRR_DIRECTION = ABSOLUTE_HIGHER

RANKING_COLUMNS = ("model", "sum_weight", "sum_weighted_value", "permanent_value", "rank")

logger = logging.getLogger(__name__)


def apply_prr_direction(matrix, prr_direction=DEFAULT_PRR_DIRECTION):
    """Prepare the PRR column for rating

    ``raw`` keeps the signed values and the matrix direction, ``absolute`` rates
    |PRR| with lower-is-better and ``absolute_higher`` rates |PRR| with
    higher-is-better. Matrices without a PRR column are returned unchanged.
    """
    if prr_direction not in PRR_DIRECTIONS:
        raise ConfigError(f"prr_direction must be one of {PRR_DIRECTIONS}, got {prr_direction!r}")
    if CriterionId.PRR not in matrix.criteria or prr_direction == RAW:
        return matrix
    direction = Direction.LOWER_IS_BETTER if prr_direction == ABSOLUTE else Direction.HIGHER_IS_BETTER
    return matrix.with_column(CriterionId.PRR, matrix.values[CriterionId.PRR].abs(), direction)


def rate(matrix):
    """Rating matrix X; a column whose values are all equal rates 1 everywhere"""
    values = matrix.values
    amin, amax = matrix.amin, matrix.amax
    ratings = pd.DataFrame(index=values.index, columns=values.columns, dtype=float)
    for criterion in values.columns:
        spread = amax[criterion] - amin[criterion]
        if spread == 0:
            ratings[criterion] = 1.0
        elif matrix.directions[criterion] is Direction.HIGHER_IS_BETTER:
            ratings[criterion] = (values[criterion] - amin[criterion]) / spread
        else:
            ratings[criterion] = (amax[criterion] - values[criterion]) / spread
    return ratings


def weights(ratings):
    return 1 - ratings


def weighted_values(weight_matrix, matrix):
    return weight_matrix * matrix.values


def permanent_values(weighted, weight_matrix):
    """Z = sum(A) / sum(W) per model; a model with sum(W) = 0 gets -inf"""
    sum_weighted = weighted.sum(axis=1)
    sum_weight = weight_matrix.sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(sum_weight > 0, sum_weighted / sum_weight.where(sum_weight > 0, 1.0), -np.inf)
    return pd.Series(z, index=weighted.index, name="permanent_value")


def rank(permanent, sum_weight=None):
    """Ranks 1..n ascending in Z; ties go to the smaller sum of weights, then to the model name

    Arguments:
        permanent (pandas.Series or dict) : Z per model
        sum_weight (pandas.Series or dict, optional) : sum of weights per model. Defaults to zeros.

    Returns:
        pandas.Series: integer rank per model, in the input order
    """
    permanent = pd.Series(permanent, dtype=float)
    sum_weight = pd.Series(0.0, index=permanent.index) if sum_weight is None else pd.Series(sum_weight, dtype=float)
    order = sorted(permanent.index, key=lambda model: (permanent[model], sum_weight[model], model))
    positions = {model: position for position, model in enumerate(order, start=1)}
    return pd.Series([positions[m] for m in permanent.index], index=permanent.index, name="rank", dtype=int)


class RankingResult:
    """Intermediate matrices and final ranks of a weighted-criteria ranking"""

    def __init__(self, matrix, ratings, weight_matrix, weighted):
        self.matrix = matrix
        self.ratings = ratings
        self.weights = weight_matrix
        self.weighted = weighted
        self.sum_weight = weight_matrix.sum(axis=1).rename("sum_weight")
        self.sum_weighted_value = weighted.sum(axis=1).rename("sum_weighted_value")
        self.permanent_value = permanent_values(weighted, weight_matrix)
        self.ranks = rank(self.permanent_value, self.sum_weight)

    @property
    def best(self):
        return self.ranks.idxmin()

    def top(self, n):
        return list(self.ranks.sort_values(kind="mergesort").index[:n])

    def to_frame(self):
        """Models in input order with ``sum_weight,sum_weighted_value,permanent_value,rank``"""
        frame = pd.DataFrame({
            "sum_weight": self.sum_weight,
            "sum_weighted_value": self.sum_weighted_value,
            "permanent_value": self.permanent_value,
            "rank": self.ranks,
        })
        frame.index.name = RANKING_COLUMNS[0]
        return frame

    def to_csv(self, path):
        self.to_frame().to_csv(path, lineterminator="\n")

    @staticmethod
    def _named(frame):
        named = frame.copy()
        named.columns = [str(c) for c in frame.columns]
        named.index.name = RANKING_COLUMNS[0]
        return named

    def write_matrices(self, folder):
        """Write ``ratings.csv``, ``weights.csv`` and ``weighted_values.csv`` into ``folder``"""
        for name, frame in (("ratings", self.ratings), ("weights", self.weights), ("weighted_values", self.weighted)):
            self._named(frame).to_csv(f"{folder}/{name}.csv", lineterminator="\n")


def rank_models(matrix, prr_direction=DEFAULT_PRR_DIRECTION):
    """Rank the models of a criteria matrix

    Arguments:
        matrix (CriteriaMatrix) : criterion values
        prr_direction (str, optional) : one of ``PRR_DIRECTIONS``. Defaults to ``DEFAULT_PRR_DIRECTION``.

    Returns:
        RankingResult
    """
    prepared = apply_prr_direction(matrix, prr_direction)
    ratings = rate(prepared)
    weight_matrix = weights(ratings)
    result = RankingResult(prepared, ratings, weight_matrix, weighted_values(weight_matrix, prepared))
    logger.info(f"Ranked {len(matrix.models)} models, best is {result.best}")
    return result
