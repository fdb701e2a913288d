import numpy as np
import pytest

from srgmrank.data.dataset import FailureDataset
from srgmrank.errors import ConfigError
from srgmrank.models.catalog import default_bounds, mean_value, ModelId, ParamBounds
from srgmrank.models.fit import _sse_rows, fit_model, FittedModel, objective
from srgmrank.optimizer.ssa import PENALTY, SsaConfig


def test_objective_of_known_residuals():
    times = np.array([1.0, 2.0])
    exact = mean_value(ModelId.GoelOkumoto, [100.0, 0.1], times)
    dataset = FailureDataset(times, exact + [1.0, 2.0])
    assert objective(dataset, ModelId.GoelOkumoto, [100.0, 0.1]) == pytest.approx(5.0)


def test_objective_is_zero_on_generator(go_dataset):
    assert objective(go_dataset, "GoelOkumoto", [100.0, 0.1]) == pytest.approx(0.0, abs=1e-12)


def test_objective_penalizes_infeasible(go_dataset):
    assert objective(go_dataset, ModelId.GoelOkumoto, [-1.0, 0.1]) == PENALTY
    assert objective(go_dataset, ModelId.Gompertz, [100.0, 0.1, 2.0]) == PENALTY


def test_batch_objective_matches_single(go_dataset):
    matrix = np.array([[100.0, 0.1], [90.0, 0.2], [-5.0, 0.1]])
    batch = _sse_rows(go_dataset, ModelId.GoelOkumoto, matrix)
    single = [objective(go_dataset, ModelId.GoelOkumoto, row) for row in matrix]
    np.testing.assert_allclose(batch, single, rtol=1e-12)


def test_fit_is_deterministic(go_dataset, fast_config):
    first = fit_model(go_dataset, ModelId.InflectedS, fast_config)
    second = fit_model(go_dataset, ModelId.InflectedS, fast_config)
    assert first == second
    assert first.seed == fast_config.seed
    assert first.config_used == fast_config


def test_fit_improves_on_initial_population(go_dataset, fast_config):
    model = ModelId.YamadaDelayedS
    bounds = default_bounds(model, go_dataset)
    initial = bounds.lower + (bounds.upper - bounds.lower) * np.random.default_rng(fast_config.seed).random(
        (fast_config.pop, 2)
    )
    fitted = fit_model(go_dataset, model, fast_config)
    assert fitted.objective_value <= _sse_rows(go_dataset, model, initial).min() * (1 + 1e-12)
    assert fitted.history[0] == pytest.approx(_sse_rows(go_dataset, model, initial).min())
    assert fitted.iterations == fast_config.max_iters
    assert fitted.evaluations == fast_config.max_iters * fast_config.pop


def test_fitted_params_are_feasible(go_dataset, fast_config):
    fitted = fit_model(go_dataset, ModelId.ZTP, fast_config)
    bounds = default_bounds(ModelId.ZTP, go_dataset)
    assert bounds.contains(fitted.params.values)
    assert fitted.params["p"] > fitted.params["beta"]
    assert fitted.objective_value < PENALTY


def test_underdetermined_flag(tiny_dataset, fast_config):
    assert fit_model(tiny_dataset, ModelId.LogisticGrowth, fast_config).underdetermined
    assert not fit_model(tiny_dataset, ModelId.GoelOkumoto, fast_config).underdetermined


def test_pinned_parameter(go_dataset, fast_config):
    fitted = fit_model(go_dataset, ModelId.ZTP, fast_config, fixed={"p": 1.0})
    assert fitted.params["p"] == 1.0
    assert fitted.fixed == ("p",)
    assert fitted.params.names == ("a", "b", "c", "p", "alpha", "beta")


@pytest.mark.parametrize("fixed", [{"q": 1.0}, {"a": 100.0, "b": 0.1}, {"a": np.inf}])
def test_invalid_pins(go_dataset, fast_config, fixed):
    with pytest.raises(ConfigError):
        fit_model(go_dataset, ModelId.GoelOkumoto, fast_config, fixed=fixed)


def test_restarts_keep_the_best_run(go_dataset, fast_config):
    single = fit_model(go_dataset, ModelId.GeneralizedGoel, fast_config)
    restarted = fit_model(go_dataset, ModelId.GeneralizedGoel, fast_config, restarts=3)
    assert restarted.objective_value <= single.objective_value
    assert restarted.restarts == 3
    assert 0 <= restarted.best_restart < 3
    assert restarted.evaluations == 3 * fast_config.max_iters * fast_config.pop


def test_invalid_restarts(go_dataset, fast_config):
    with pytest.raises(ConfigError):
        fit_model(go_dataset, ModelId.GoelOkumoto, fast_config, restarts=0)


def test_bounds_must_match_model(go_dataset, fast_config):
    bounds = ParamBounds(("a", "k"), [1e-6, 1e-6], [10.0, 10.0])
    with pytest.raises(ConfigError):
        fit_model(go_dataset, ModelId.GoelOkumoto, fast_config, bounds=bounds)


def test_custom_bounds_are_respected(go_dataset, fast_config):
    bounds = ParamBounds(("a", "b"), [50.0, 0.01], [60.0, 0.02])
    fitted = fit_model(go_dataset, ModelId.GoelOkumoto, fast_config, bounds=bounds)
    assert bounds.contains(fitted.params.values)


@pytest.mark.slow
def test_curve_recovery_on_noiseless_data(go_dataset):
    recovered = 0
    for seed in range(10):
        fitted = fit_model(go_dataset, ModelId.GoelOkumoto, SsaConfig(seed=seed))
        estimated = mean_value(fitted.model, fitted.params, go_dataset.times)
        recovered += np.mean((estimated - go_dataset.counts) ** 2) < 1e-2
    assert recovered >= 8


def test_fitted_model_dict_round_trip(go_dataset, fast_config):
    fitted = fit_model(go_dataset, ModelId.PNZ, fast_config)
    assert FittedModel.from_dict(fitted.to_dict()) == fitted
    assert fitted.to_dict()["model"] == "P-N-Z"
    assert fitted.to_dict()["dataset"] == "go"


@pytest.mark.io
def test_fitted_model_json_round_trip(tmpdir, go_dataset, fast_config):
    fitted = fit_model(go_dataset, ModelId.ZTP, fast_config, fixed={"p": 1.0}, restarts=2)
    path = str(tmpdir.join("ztp.json"))
    fitted.write_json(path)
    loaded = FittedModel.read_json(path)
    assert loaded == fitted
    assert loaded.params == fitted.params
    assert loaded.fixed == ("p",)
