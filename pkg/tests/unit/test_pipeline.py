import os

import numpy as np
import pandas as pd
import pytest

from srgmrank import pipeline
from srgmrank.config import RunConfig
from srgmrank.data.dataset import serialize
from srgmrank.errors import ConfigError
from srgmrank.models.catalog import make_params, ModelId
from srgmrank.models.fit import FittedModel
from srgmrank.optimizer.ssa import SsaConfig


@pytest.fixture
def tiny_config():
    return SsaConfig(pop=6, max_iters=8, seed=5)


def test_model_seed_depends_on_catalog_position():
    assert pipeline.model_seed(8, ModelId.GoelOkumoto) == 8
    assert pipeline.model_seed(8, "Z-T-P") == 8 ^ 15
    assert pipeline.model_seed(8, "LogGro") == 8 ^ 4


def test_fixed_parameters():
    assert pipeline.fixed_parameters("Z-T-P", pin_ztp_p=True) == {"p": 1.0}
    assert pipeline.fixed_parameters("Z-T-P") == {}
    assert pipeline.fixed_parameters("P-Z", pin_ztp_p=True) == {}


def test_fits_do_not_depend_on_the_selection(go_dataset, tiny_config):
    alone = pipeline.fit_models(go_dataset, ["LogGro"], tiny_config, workers=1, progress=False)
    together = pipeline.fit_models(go_dataset, ["GoelOkumoto", "LogGro"], tiny_config, workers=1, progress=False)
    assert alone[0] == together[1]
    assert together[0].model is ModelId.GoelOkumoto
    assert together[1].seed == 5 ^ 4


def test_params_table(go_dataset):
    fits = [
        FittedModel(ModelId.GoelOkumoto, make_params("Goel-O.", [100.0, 0.1]), 0.0, SsaConfig(), go_dataset.name),
        FittedModel(ModelId.LogisticGrowth, make_params("LogGro", [90.0, 0.2, 5.0]), 12.5, SsaConfig(), go_dataset.name),
    ]
    table = pipeline.params_table(fits)
    assert list(table.columns) == ["model", "a", "b", "k", "objective"]
    assert table["model"].tolist() == ["Goel-O.", "Log. Gro."]
    assert np.isnan(table.loc[0, "k"])
    assert table.loc[1, "objective"] == 12.5


def test_curve_frame(go_dataset):
    fitted = FittedModel(ModelId.GoelOkumoto, make_params("Goel-O.", [100.0, 0.1]), 0.0, SsaConfig(), go_dataset.name)
    frame = pipeline.curve_frame(go_dataset, fitted, 11)
    assert list(frame.columns) == ["t", "actual", "estimated"]
    assert len(frame) == go_dataset.k + 11
    assert frame["t"].is_monotonic_increasing
    assert frame.loc[0, "t"] == 0.0 and frame.loc[0, "estimated"] == 0.0
    observed = frame.dropna(subset=["actual"])
    np.testing.assert_allclose(observed["actual"], observed["estimated"])
    assert frame["actual"].isna().sum() == 11


@pytest.mark.io
def test_run_report_writes_every_output(tmpdir, weekly_dataset):
    dataset_path = str(tmpdir.join("weekly.csv"))
    serialize(weekly_dataset, dataset_path)
    output_dir = str(tmpdir.join("out"))
    config = RunConfig(
        dataset=dataset_path, output_dir=output_dir, models=["GoelOkumoto", "YDel", "Musa-O"],
        pop=8, max_iters=10, workers=1, grid_points=20,
    )
    result = pipeline.run_report(config, progress=False)
    assert result.best in ("Goel-O.", "Y. Del.", "Musa-O.")
    for name in ("params.csv", "criteria.csv", "ranking.csv", "ratings.csv", "weights.csv", "weighted_values.csv",
                 "curve_Goel-O.csv", "curve_YDel.csv", "curve_Musa-O.csv"):
        assert os.path.isfile(os.path.join(output_dir, name)), name
    for name in ("Goel-O.json", "Goel-O_history.csv", "YDel.json", "Musa-O_history.csv"):
        assert os.path.isfile(os.path.join(output_dir, "fits", name)), name
    history = pd.read_csv(os.path.join(output_dir, "fits", "YDel_history.csv"))
    assert history["iter"].tolist() == list(range(1, 11))

    reloaded = pipeline.read_fits(output_dir, config.models)
    assert [f.model for f in reloaded] == config.models
    assert pipeline.run_rank(config).ranks.to_dict() == result.ranks.to_dict()


@pytest.mark.io
def test_rank_without_fits(tmpdir, weekly_dataset):
    dataset_path = str(tmpdir.join("weekly.csv"))
    serialize(weekly_dataset, dataset_path)
    config = RunConfig(dataset=dataset_path, output_dir=str(tmpdir.join("empty")), models=["LogGro"])
    with pytest.raises(ConfigError, match="run the 'fit' command first"):
        pipeline.run_rank(config)


def test_missing_criteria_table(tmpdir):
    with pytest.raises(ConfigError, match="not found"):
        pipeline.run_rank(RunConfig(output_dir=str(tmpdir)), criteria_csv=str(tmpdir.join("absent.csv")))
