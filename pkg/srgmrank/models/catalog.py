import logging
from enum import Enum

import numpy as np

from srgmrank.data.dataset import FailureDataset
from srgmrank.errors import ConfigError, ModelDomainError
from srgmrank.models import imperfect, perfect

LOWER_BOUND = 1e-6
RATE_UPPER = 5.0
FACTOR_UPPER = 100.0
UNIT_UPPER = 1 - 1e-6

# symbolic upper bounds resolved against the dataset
FAULT_SCALE = "fault_scale"  # 100 * m_k
TIME_SCALE = "time_scale"  # 100 * t_k
SCALE_FACTOR = 100.0

logger = logging.getLogger(__name__)


class ModelId(Enum):
    """The 16 software reliability growth models, valued by their short names"""

    GoelOkumoto = "Goel-O."
    GeneralizedGoel = "G.Goel"
    Gompertz = "Gompert"
    InflectedS = "Inf. S."
    LogisticGrowth = "Log. Gro."
    MusaOkumoto = "Musa-O."
    YamadaDelayedS = "Y. Del."
    ModifiedDuane = "Modi-D."
    PhamZhangIFD = "P-Z-IFD"
    YamadaRayleigh = "Y. Ray."
    YamadaImperfect1 = "Y. M1"
    YamadaImperfect2 = "Y. M2"
    YamadaExponential = "Y. Exp."
    PNZ = "P-N-Z"
    PhamZhang = "P-Z"
    ZTP = "Z-T-P"

    @property
    def short_name(self):
        return self.value

    @property
    def slug(self):
        """Short name without spaces and periods, used for CLI input and file names"""
        return normalize_name(self.value)

    @property
    def index(self):
        """Position in the catalog, used to derive per-model seeds"""
        return list(ModelId).index(self)

    def __str__(self):
        return self.value


def normalize_name(name):
    return str(name).replace(" ", "").replace(".", "").strip()


def parse_model(name):
    """Resolve a model from its short name, slug or member name (case-insensitive)

    Raises:
        ConfigError: when the name matches no model. The message lists valid names.
    """
    if isinstance(name, ModelId):
        return name
    key = normalize_name(name).lower()
    for model in ModelId:
        if key in (model.slug.lower(), model.name.lower()):
            return model
    valid = ", ".join(model.slug for model in ModelId)
    raise ConfigError(f"unknown model '{name}'; valid names are: {valid}")


class ParamVector:
    """Named parameter values of one model, in the model's parameter order"""

    def __init__(self, names, values):
        values = np.array(values, dtype=float)
        if values.shape != (len(names),):
            raise ModelDomainError(f"expected {len(names)} values for parameters {tuple(names)}, got shape {values.shape}")
        values.setflags(write=False)
        self.names = tuple(names)
        self.values = values

    def __len__(self):
        return len(self.names)

    def __getitem__(self, name):
        try:
            return float(self.values[self.names.index(name)])
        except ValueError:
            raise KeyError(name)

    def __iter__(self):
        return iter(self.values.tolist())

    def __eq__(self, other):
        if not isinstance(other, ParamVector):
            return NotImplemented
        return self.names == other.names and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((self.names, self.values.tobytes()))

    def as_dict(self):
        return dict(zip(self.names, self.values.tolist()))

    def __repr__(self):
        pairs = ", ".join(f"{n}={v:.6g}" for n, v in zip(self.names, self.values))
        return f"ParamVector({pairs})"


class ParamBounds:
    """Per-parameter search box ``lower < x <= upper``

    Arguments:
        names (sequence of str) : parameter names
        lower (array-like) : lower bounds
        upper (array-like) : upper bounds

    Raises:
        ConfigError: when shapes disagree or any lower >= upper
    """

    def __init__(self, names, lower, upper):
        lower = np.array(lower, dtype=float)
        upper = np.array(upper, dtype=float)
        names = tuple(names)
        if lower.shape != (len(names),) or upper.shape != (len(names),):
            raise ConfigError(f"bounds for {names} must have {len(names)} entries each")
        bad = [name for name, lo, hi in zip(names, lower, upper) if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi)]
        if bad:
            raise ConfigError(f"invalid bounds for parameters {bad}: lower must be finite and below upper")
        lower.setflags(write=False)
        upper.setflags(write=False)
        self.names = names
        self.lower = lower
        self.upper = upper

    def __len__(self):
        return len(self.names)

    def contains(self, values):
        values = np.asarray(values, dtype=float)
        return bool(np.all(values >= self.lower) and np.all(values <= self.upper))

    def select(self, names):
        """Bounds restricted to ``names``, in that order"""
        positions = [self.names.index(name) for name in names]
        return ParamBounds(names, self.lower[positions], self.upper[positions])

    def as_dict(self):
        return {name: (lo, hi) for name, lo, hi in zip(self.names, self.lower.tolist(), self.upper.tolist())}

    def __repr__(self):
        return f"ParamBounds({self.as_dict()})"


def _positive(columns):
    feasible = True
    for column in columns:
        feasible = feasible & np.isfinite(column) & (column > 0)
    return feasible


def _gompertz_region(a, b, k):
    return (b < 1) & (k < 1)


def _ztp_region(a, b, c, p, alpha, beta):
    return p > beta


class ModelSpec:
    """Formulas, parameter names, constraints and bound rules of one model

    Arguments:
        mean (callable) : ``mean(t, *params)``
        intensity (callable) : ``intensity(t, *params)``
        params (list of tuple) : ``(name, lower, upper)`` per parameter; ``upper`` may be
            ``FAULT_SCALE`` or ``TIME_SCALE`` to scale with the dataset
        region (callable, optional) : extra constraint on top of positivity. Defaults to None.
        monotone (bool, optional) : whether m(t) is nondecreasing everywhere. Defaults to True.
    """

    def __init__(self, mean, intensity, params, region=None, monotone=True):
        self.mean = mean
        self.intensity = intensity
        self.params = params
        self.region = region
        self.monotone = monotone

    @property
    def param_names(self):
        return tuple(name for name, _, _ in self.params)

    @property
    def dimension(self):
        return len(self.params)

    def feasible(self, columns):
        ok = _positive(columns)
        if self.region is not None:
            ok = ok & self.region(*columns)
        return ok


MODEL_SPECS = {
    ModelId.GoelOkumoto: ModelSpec(
        perfect.goel_okumoto_mean, perfect.goel_okumoto_intensity,
        [("a", LOWER_BOUND, FAULT_SCALE), ("b", LOWER_BOUND, RATE_UPPER)],
    ),
    ModelId.GeneralizedGoel: ModelSpec(
        perfect.generalized_goel_mean, perfect.generalized_goel_intensity,
        [("a", LOWER_BOUND, FAULT_SCALE), ("b", LOWER_BOUND, RATE_UPPER), ("c", LOWER_BOUND, RATE_UPPER)],
    ),
    ModelId.Gompertz: ModelSpec(
        perfect.gompertz_mean, perfect.gompertz_intensity,
        [("a", LOWER_BOUND, FAULT_SCALE), ("b", LOWER_BOUND, UNIT_UPPER), ("k", LOWER_BOUND, UNIT_UPPER)],
        region=_gompertz_region,
    ),
    ModelId.InflectedS: ModelSpec(
        perfect.inflected_s_mean, perfect.inflected_s_intensity,
        [("a", LOWER_BOUND, FAULT_SCALE), ("b", LOWER_BOUND, RATE_UPPER), ("beta", LOWER_BOUND, FACTOR_UPPER)],
    ),
    ModelId.LogisticGrowth: ModelSpec(
        perfect.logistic_growth_mean, perfect.logistic_growth_intensity,
        [("a", LOWER_BOUND, FAULT_SCALE), ("b", LOWER_BOUND, RATE_UPPER), ("k", LOWER_BOUND, FACTOR_UPPER)],
    ),
    ModelId.MusaOkumoto: ModelSpec(
        perfect.musa_okumoto_mean, perfect.musa_okumoto_intensity,
        [("a", LOWER_BOUND, FAULT_SCALE), ("b", LOWER_BOUND, RATE_UPPER)],
    ),
    ModelId.YamadaDelayedS: ModelSpec(
        perfect.yamada_delayed_s_mean, perfect.yamada_delayed_s_intensity,
        [("a", LOWER_BOUND, FAULT_SCALE), ("b", LOWER_BOUND, RATE_UPPER)],
    ),
    ModelId.ModifiedDuane: ModelSpec(
        perfect.modified_duane_mean, perfect.modified_duane_intensity,
        [("a", LOWER_BOUND, FAULT_SCALE), ("b", LOWER_BOUND, TIME_SCALE), ("c", LOWER_BOUND, RATE_UPPER)],
    ),
    ModelId.PhamZhangIFD: ModelSpec(
        perfect.pham_zhang_ifd_mean, perfect.pham_zhang_ifd_intensity,
        [("a", LOWER_BOUND, FAULT_SCALE), ("b", LOWER_BOUND, RATE_UPPER), ("d", LOWER_BOUND, RATE_UPPER)],
        monotone=False,
    ),
    ModelId.YamadaRayleigh: ModelSpec(
        imperfect.yamada_rayleigh_mean, imperfect.yamada_rayleigh_intensity,
        [("a", LOWER_BOUND, FAULT_SCALE), ("alpha", LOWER_BOUND, RATE_UPPER), ("beta", LOWER_BOUND, RATE_UPPER)],
    ),
    ModelId.YamadaImperfect1: ModelSpec(
        imperfect.yamada_imperfect_1_mean, imperfect.yamada_imperfect_1_intensity,
        [("a", LOWER_BOUND, FAULT_SCALE), ("b", LOWER_BOUND, RATE_UPPER), ("alpha", LOWER_BOUND, RATE_UPPER)],
    ),
    ModelId.YamadaImperfect2: ModelSpec(
        imperfect.yamada_imperfect_2_mean, imperfect.yamada_imperfect_2_intensity,
        [("a", LOWER_BOUND, FAULT_SCALE), ("b", LOWER_BOUND, RATE_UPPER), ("alpha", LOWER_BOUND, RATE_UPPER)],
    ),
    ModelId.YamadaExponential: ModelSpec(
        imperfect.yamada_exponential_mean, imperfect.yamada_exponential_intensity,
        [("a", LOWER_BOUND, FAULT_SCALE), ("g", LOWER_BOUND, FACTOR_UPPER), ("beta", LOWER_BOUND, RATE_UPPER)],
    ),
    ModelId.PNZ: ModelSpec(
        imperfect.pnz_mean, imperfect.pnz_intensity,
        [
            ("a", LOWER_BOUND, FAULT_SCALE), ("b", LOWER_BOUND, RATE_UPPER),
            ("alpha", LOWER_BOUND, RATE_UPPER), ("beta", LOWER_BOUND, FACTOR_UPPER),
        ],
    ),
    ModelId.PhamZhang: ModelSpec(
        imperfect.pham_zhang_mean, imperfect.pham_zhang_intensity,
        [
            ("a", LOWER_BOUND, FAULT_SCALE), ("b", LOWER_BOUND, RATE_UPPER), ("c", LOWER_BOUND, FAULT_SCALE),
            ("alpha", LOWER_BOUND, FACTOR_UPPER), ("beta", LOWER_BOUND, FACTOR_UPPER),
        ],
    ),
    ModelId.ZTP: ModelSpec(
        imperfect.ztp_mean, imperfect.ztp_intensity,
        [
            ("a", LOWER_BOUND, FAULT_SCALE), ("b", LOWER_BOUND, RATE_UPPER), ("c", LOWER_BOUND, RATE_UPPER),
            ("p", 1.0, 2.0), ("alpha", LOWER_BOUND, FACTOR_UPPER), ("beta", LOWER_BOUND, UNIT_UPPER),
        ],
        region=_ztp_region,
    ),
}


def get_spec(model):
    return MODEL_SPECS[parse_model(model)]


def param_names(model):
    return get_spec(model).param_names


def make_params(model, values):
    """Build a ParamVector for ``model`` from a sequence or a name -> value mapping

    Raises:
        ModelDomainError: when names are missing or unknown, or the values violate the model's constraints
    """
    names = param_names(model)
    if isinstance(values, dict):
        unknown = set(values) - set(names)
        missing = [name for name in names if name not in values]
        if unknown or missing:
            raise ModelDomainError(
                f"{parse_model(model).short_name} takes parameters {names}; unknown {sorted(unknown)}, missing {missing}"
            )
        values = [values[name] for name in names]
    params = ParamVector(names, values)
    check_params(model, params)
    return params


def _columns(values):
    """Split a (D,) vector into scalars or an (n, D) matrix into (n, 1) columns"""
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        return [values[j] for j in range(values.shape[0])]
    return [values[:, j:j + 1] for j in range(values.shape[1])]


def check_params(model, params):
    model = parse_model(model)
    spec = MODEL_SPECS[model]
    values = params.values if isinstance(params, ParamVector) else np.asarray(params, dtype=float)
    if values.shape != (spec.dimension,):
        raise ModelDomainError(f"{model.short_name} expects {spec.dimension} parameters {spec.param_names}, got {values.shape}")
    if not bool(spec.feasible(_columns(values))):
        pairs = dict(zip(spec.param_names, values.tolist()))
        raise ModelDomainError(f"parameters {pairs} violate the constraints of {model.short_name}")


def feasible_rows(model, matrix):
    """Boolean mask over the rows of an (n, D) candidate matrix"""
    spec = get_spec(model)
    return np.asarray(spec.feasible(_columns(matrix)), dtype=bool).reshape(-1)


def mean_matrix(model, matrix, t):
    """m(t) for every row of an (n, D) candidate matrix, shape (n, len(t)).

    Rows are not checked; combine with ``feasible_rows``.
    """
    spec = get_spec(model)
    with np.errstate(all="ignore"):
        return spec.mean(np.asarray(t, dtype=float), *_columns(matrix))


def _checked_times(t, strict):
    t = np.asarray(t, dtype=float)
    bad = ~np.isfinite(t) | ((t <= 0) if strict else (t < 0))
    if np.any(bad):
        relation = "> 0" if strict else ">= 0"
        raise ModelDomainError(f"time must be finite and {relation}, got {t[bad].tolist() if t.ndim else float(t)}")
    return t


def _as_output(values, t):
    values = np.asarray(values, dtype=float)
    return float(values) if np.ndim(t) == 0 else values


def mean_value(model, params, t):
    """Expected cumulative faults m(t)

    Arguments:
        model (ModelId or str) : catalog model
        params (ParamVector or sequence) : parameter values in the model's order
        t (float or numpy.ndarray) : time(s) >= 0

    Raises:
        ModelDomainError: constraint violation or negative time

    Returns:
        float or numpy.ndarray: m(t), shaped like ``t``
    """
    check_params(model, params)
    t = _checked_times(t, strict=False)
    values = params.values if isinstance(params, ParamVector) else np.asarray(params, dtype=float)
    with np.errstate(over="ignore", under="ignore"):
        return _as_output(get_spec(model).mean(t, *_columns(values)), t)


def intensity(model, params, t):
    """Failure intensity lambda(t) = dm/dt, defined for t > 0. See ``mean_value``."""
    check_params(model, params)
    t = _checked_times(t, strict=True)
    values = params.values if isinstance(params, ParamVector) else np.asarray(params, dtype=float)
    with np.errstate(over="ignore", under="ignore"):
        return _as_output(get_spec(model).intensity(t, *_columns(values)), t)


def default_bounds(model, dataset):
    """Search box for ``model`` scaled to ``dataset``

    Fault-scale parameters get ``100 * m_k`` as upper bound, Modified Duane's ``b``
    gets ``100 * t_k``; the remaining uppers are fixed per parameter.
    """
    if not isinstance(dataset, FailureDataset):
        raise TypeError(f"dataset must be a FailureDataset, got {type(dataset)}")
    spec = get_spec(model)
    # a dataset with m_k = 0 still needs a nonempty box
    fault_scale = SCALE_FACTOR * max(dataset.last_count, 1.0)
    scales = {FAULT_SCALE: fault_scale, TIME_SCALE: SCALE_FACTOR * dataset.last_time}
    lower = [lo for _, lo, _ in spec.params]
    upper = [scales.get(hi, hi) for _, _, hi in spec.params]
    return ParamBounds(spec.param_names, lower, upper)


def total_expected_faults(model, params, dataset):
    """Estimated cumulative faults at the last observation time, m(t_k)"""
    return mean_value(model, params, dataset.last_time)


def synthesize_dataset(model, params, times, name="synthetic", noise="none", seed=None):
    """Generate a dataset from a catalog model

    Arguments:
        model (ModelId or str) : generating model
        params (ParamVector or sequence) : generating parameters
        times (array-like) : observation times, strictly increasing and > 0
        name (str, optional) : dataset name. Defaults to "synthetic".
        noise (str, optional) : "none" for m(t_i) itself, or "poisson" to draw NHPP
            increments N(t_i) - N(t_{i-1}) ~ Poisson(m(t_i) - m(t_{i-1})) starting
            from m(0). Defaults to "none".
        seed (int, optional) : seed of the Poisson draws. Defaults to None.

    Returns:
        FailureDataset
    """
    times = np.asarray(times, dtype=float)
    expected = mean_value(model, params, times)
    if noise == "none":
        counts = expected
    elif noise == "poisson":
        rng = np.random.default_rng(seed)
        grid = np.concatenate([[0.0], times])
        increments = np.clip(np.diff(mean_value(model, params, grid)), 0, None)
        counts = np.cumsum(rng.poisson(increments)).astype(float)
    else:
        raise ConfigError(f"noise must be 'none' or 'poisson', got {noise!r}")
    logger.debug(f"Synthesized {len(times)} points from {parse_model(model).short_name} ({noise} noise)")
    return FailureDataset(times, counts, name=name)
