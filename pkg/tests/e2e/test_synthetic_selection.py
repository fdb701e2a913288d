import numpy as np
import pytest

from srgmrank.evaluation.criteria import evaluate_all
from srgmrank.evaluation.ranking import rank_models
from srgmrank.models.catalog import ModelId, synthesize_dataset
from srgmrank.optimizer.ssa import SsaConfig
from srgmrank.pipeline import fit_models

GENERATOR_LIKE = {ModelId.GoelOkumoto.short_name, ModelId.MusaOkumoto.short_name}


@pytest.mark.slow
def test_generator_ranks_near_the_top():
    dataset = synthesize_dataset(ModelId.GoelOkumoto, [100.0, 0.1], np.arange(1, 21), name="go")
    hits = 0
    for seed in range(10):
        fitted = fit_models(dataset, list(ModelId), SsaConfig(seed=seed), progress=False)
        result = rank_models(evaluate_all(dataset, fitted))
        hits += bool(GENERATOR_LIKE & set(result.top(3)))
    assert hits >= 8
