import os

import numpy as np
import pandas as pd
import pytest

from srgmrank.errors import ConfigError
from srgmrank.evaluation.criteria import CriteriaMatrix, CriterionId, Direction
from srgmrank.evaluation.ranking import (
    ABSOLUTE, ABSOLUTE_HIGHER, apply_prr_direction, DEFAULT_PRR_DIRECTION, rank, rank_models, rate, RAW,
    RANKING_COLUMNS
)

DATASET1_CRITERIA = "tests/unit/evaluation/data/criteria_dataset1.csv"
DATASET2_CRITERIA = "tests/unit/evaluation/data/criteria_dataset2.csv"
DATASET1_PUBLISHED = "tests/unit/evaluation/data/ranking_dataset1_published.csv"
DATASET2_PUBLISHED = "tests/unit/evaluation/data/ranking_dataset2_published.csv"


def small_matrix(prr=(1.0, -6.0, 3.0)):
    frame = pd.DataFrame(
        {"MSE": [1.0, 2.0, 4.0], "PRR": list(prr), "Rsq": [0.9, 0.95, 0.8]},
        index=["m1", "m2", "m3"],
    )
    return CriteriaMatrix(frame)


@pytest.fixture
def dataset1_ranking():
    return rank_models(CriteriaMatrix.from_csv(DATASET1_CRITERIA))


@pytest.fixture
def dataset2_ranking():
    return rank_models(CriteriaMatrix.from_csv(DATASET2_CRITERIA))


def test_rating_of_published_values(dataset1_ranking):
    assert dataset1_ranking.ratings.loc["Goel-O.", CriterionId.MSE] == pytest.approx(0.2668, abs=1e-4)
    assert dataset1_ranking.weights.loc["Goel-O.", CriterionId.MSE] == pytest.approx(0.7332, abs=1e-4)
    assert dataset1_ranking.weighted.loc["Goel-O.", CriterionId.MSE] == pytest.approx(4.8855, abs=1e-3)


def test_ratings_for_both_directions():
    ratings = rate(small_matrix())
    np.testing.assert_allclose(ratings[CriterionId.MSE], [1.0, 2 / 3, 0.0])
    np.testing.assert_allclose(ratings[CriterionId.Rsq], [2 / 3, 1.0, 0.0])


def test_constant_column_rates_one():
    frame = pd.DataFrame({"MSE": [1.0, 2.0], "AE": [0.5, 0.5]}, index=["a", "b"])
    ratings = rate(CriteriaMatrix(frame))
    assert ratings[CriterionId.AE].tolist() == [1.0, 1.0]


@pytest.mark.parametrize(
    "prr_direction, expected",
    [
        (RAW, [2 / 9, 1.0, 0.0]),
        (ABSOLUTE, [1.0, 0.0, 0.6]),
        (ABSOLUTE_HIGHER, [0.0, 1.0, 0.4]),
    ],
)
def test_prr_direction(prr_direction, expected):
    ratings = rate(apply_prr_direction(small_matrix(), prr_direction))
    np.testing.assert_allclose(ratings[CriterionId.PRR], expected)


def test_default_prr_direction():
    assert DEFAULT_PRR_DIRECTION == ABSOLUTE_HIGHER
    prepared = apply_prr_direction(small_matrix())
    assert prepared.directions[CriterionId.PRR] is Direction.HIGHER_IS_BETTER
    assert prepared.values[CriterionId.PRR].tolist() == [1.0, 6.0, 3.0]


def test_unknown_prr_direction():
    with pytest.raises(ConfigError):
        rank_models(small_matrix(), prr_direction="signed")


def test_matrix_without_prr_is_unchanged():
    matrix = CriteriaMatrix(pd.DataFrame({"MSE": [1.0, 2.0]}, index=["a", "b"]))
    assert apply_prr_direction(matrix, ABSOLUTE) is matrix


def test_dominant_model_gets_minus_infinity():
    frame = pd.DataFrame({"MSE": [1.0, 2.0, 3.0], "Rsq": [0.99, 0.9, 0.95]}, index=["best", "mid", "low"])
    result = rank_models(CriteriaMatrix(frame))
    assert result.sum_weight["best"] == 0
    assert result.permanent_value["best"] == -np.inf
    assert result.ranks["best"] == 1
    assert result.best == "best"


def test_single_model_ranks_first():
    result = rank_models(CriteriaMatrix(pd.DataFrame({"MSE": [3.0], "PRR": [0.2]}, index=["only"])))
    assert result.ranks.tolist() == [1]


def test_rank_ties():
    assert rank({"b": 1.0, "a": 1.0, "c": 0.5}).to_dict() == {"b": 3, "a": 2, "c": 1}
    assert rank({"a": 1.0, "b": 1.0}, {"a": 2.0, "b": 1.0}).to_dict() == {"a": 2, "b": 1}


def test_dataset1_replay(dataset1_ranking):
    assert dataset1_ranking.top(3) == ["Log. Gro.", "P-N-Z", "Inf. S."]
    published = pd.read_csv(DATASET1_PUBLISHED, index_col="model")
    sum_weight = dataset1_ranking.sum_weight["Log. Gro."]
    assert abs(sum_weight - published.loc["Log. Gro.", "sum_weight"]) < 0.5
    assert dataset1_ranking.sum_weight["Log. Gro."] == pytest.approx(1.4835, abs=1e-3)


def test_dataset2_replay(dataset2_ranking):
    published = pd.read_csv(DATASET2_PUBLISHED, index_col="model")
    assert dataset2_ranking.best == "Z-T-P"
    assert set(dataset2_ranking.top(3)) <= {"Z-T-P", "P-Z", "Gompert"}
    assert dataset2_ranking.ranks.to_dict() == published["rank"].to_dict()
    assert dataset2_ranking.permanent_value["Z-T-P"] == pytest.approx(0.5240, abs=1e-3)


def test_random_matrices():
    rng = np.random.default_rng(99)
    for _ in range(200):
        n = int(rng.integers(2, 12))
        frame = pd.DataFrame(
            {"MSE": rng.uniform(0, 10, n), "AE": rng.uniform(0, 1, n), "PRR": rng.normal(size=n), "Rsq": rng.uniform(0.5, 1, n)},
            index=[f"model{i}" for i in range(n)],
        )
        result = rank_models(CriteriaMatrix(frame))
        ratings = result.ratings.to_numpy()
        assert np.all((ratings >= 0) & (ratings <= 1))
        assert np.allclose(ratings.max(axis=0), 1.0)
        assert np.allclose(ratings.min(axis=0), 0.0)
        assert sorted(result.ranks) == list(range(1, n + 1))
        values = result.matrix.values
        for model in values.index:
            z = result.permanent_value[model]
            if result.sum_weight[model] > 0:
                assert values.loc[model].min() - 1e-9 <= z <= values.loc[model].max() + 1e-9


def random_matrix(rng, n):
    frame = pd.DataFrame(
        {"MSE": rng.uniform(0, 10, n), "MAE": rng.uniform(0, 3, n), "Rsq": rng.uniform(0.5, 1, n)},
        index=[f"model{i}" for i in range(n)],
    )
    return CriteriaMatrix(frame)


@pytest.mark.parametrize("scale", [1e-3, 0.5, 7.0, 1e4])
def test_scaling_a_lower_is_better_column_keeps_ratings(scale):
    rng = np.random.default_rng(int(scale * 1000) % 2 ** 32)
    for _ in range(50):
        matrix = random_matrix(rng, int(rng.integers(2, 10)))
        scaled = matrix.with_column(CriterionId.MSE, matrix.values[CriterionId.MSE] * scale, Direction.LOWER_IS_BETTER)
        np.testing.assert_allclose(rate(scaled).to_numpy(), rate(matrix).to_numpy(), atol=1e-12)


def test_duplicated_model_keeps_the_order_of_the_others():
    rng = np.random.default_rng(5)
    for _ in range(50):
        matrix = random_matrix(rng, int(rng.integers(2, 10)))
        copied = matrix.values.iloc[[int(rng.integers(len(matrix.models)))]].copy()
        copied.index = ["copy"]
        extended = CriteriaMatrix(pd.concat([matrix.values, copied]))
        before = rate(matrix)
        after = rate(extended).loc[matrix.models]
        np.testing.assert_allclose(after.to_numpy(), before.to_numpy(), atol=1e-12)
        for criterion in matrix.criteria:
            assert list(np.argsort(after[criterion].to_numpy(), kind="stable")) == list(
                np.argsort(before[criterion].to_numpy(), kind="stable")
            )


def test_ranking_frame(dataset2_ranking):
    frame = dataset2_ranking.to_frame()
    assert [frame.index.name] + list(frame.columns) == list(RANKING_COLUMNS)
    assert frame.index.tolist()[0] == "Goel-O."
    assert frame["rank"].dtype.kind == "i"


@pytest.mark.io
def test_write_ranking_files(tmpdir, dataset1_ranking):
    folder = str(tmpdir)
    dataset1_ranking.to_csv(os.path.join(folder, "ranking.csv"))
    dataset1_ranking.write_matrices(folder)
    ranking = pd.read_csv(os.path.join(folder, "ranking.csv"))
    assert list(ranking.columns) == list(RANKING_COLUMNS)
    assert ranking.loc[ranking["rank"] == 1, "model"].tolist() == ["Log. Gro."]
    for name in ("ratings", "weights", "weighted_values"):
        frame = pd.read_csv(os.path.join(folder, f"{name}.csv"))
        assert frame.columns[0] == "model"
        assert len(frame) == 16
        assert "PRR" in frame.columns
