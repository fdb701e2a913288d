#%%
from srgmrank.data.dataset import load_dataset
from srgmrank.evaluation.criteria import evaluate_all
from srgmrank.evaluation.ranking import rank_models
from srgmrank.models.catalog import ModelId
from srgmrank.optimizer.ssa import SsaConfig
from srgmrank.pipeline import curve_frame, fit_models, params_table

sample_dataset = "sample/weekly_faults.csv"

# Optimizer settings, see srgmrank/optimizer/README.md
SSA_CONFIG = SsaConfig(
    pop=40,
    max_iters=300,
    seed=7,
    stall_iters=100,   # stop early after 100 iterations without improvement
)
MODELS = list(ModelId)  # or a subset, e.g. ["GoelOkumoto", "LogGro", "Z-T-P"]

dataset = load_dataset(sample_dataset)
fitted = fit_models(dataset, MODELS, SSA_CONFIG)
print(params_table(fitted))

#%%
result = rank_models(evaluate_all(dataset, fitted))
print(result.to_frame().sort_values("rank"))

#%%
best = next(f for f in fitted if f.model.short_name == result.best)
curve = curve_frame(dataset, best, grid_points=200)
print(curve.head())
