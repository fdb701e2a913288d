"""Social spider algorithm for box-constrained minimization.

Candidate solutions are spiders on a web. Each iteration every spider emits a
vibration whose intensity grows as its fitness improves; vibrations attenuate
with Manhattan distance, each spider follows the strongest vibration it has
received so far, and a binary dimension mask decides which coordinates copy a
random peer instead.

Random numbers come from one ``numpy.random.default_rng(seed)`` (PCG64)
generator per ``optimize`` call, drawn in this order:

1. initial positions, ``pop x D`` uniform draws in row-major order;
2. initial masks, one uniform per spider in index order, picking the bit set to one;
3. per iteration, after evaluating the fitness of spiders ``0..pop-1``
   (which draws nothing), one ``pop x (4 D + 3)`` uniform block. Row ``s`` belongs
   to spider ``s`` and holds, in this order: the mask-change decision, ``D`` mask
   bits, the flip-rule draw, ``D`` donor draws, the inertia scalar, ``D`` step
   draws and ``D`` pull-back draws. Every slot is drawn whether it is used or not.

Indices come from uniforms as ``floor(u * n)``. A spider that leaves the box
is pulled back inside and remembers the move it actually made, so the inertia
term never pushes it across the same bound again.
"""
import logging
from collections import namedtuple

import numpy as np
import pandas as pd

from srgmrank.errors import ConfigError, DomainError

PENALTY = 1e300

logger = logging.getLogger(__name__)

Vibration = namedtuple("Vibration", ["position", "intensity"])
Vibration.__doc__ = """Source position and intensity of a vibration.

Both fields may be stacked (positions ``(n, D)``, intensities ``(n,)``) to
describe the vibrations received from a whole population at once.
"""


class SsaConfig:
    """Settings of one optimizer run

    Arguments:
        pop (int, optional) : population size, >= 2. Defaults to 40.
        r_a (float, optional) : attenuation rate, > 0. Defaults to 1.
        p_c (float, optional) : base probability of keeping the mask, in (0, 1). Defaults to 0.7.
        p_m (float, optional) : probability of a mask bit being one, in (0, 1). Defaults to 0.1.
        max_iters (int, optional) : iteration cap, >= 1. Defaults to 500.
        seed (int, optional) : generator seed, 0 <= seed < 2**64. Defaults to 1.
        intensity_constant (float, optional) : constant C of the intensity formula; must lie
            below every fitness value, so C < 0 for nonnegative objectives. Defaults to -1e-6.
        stall_iters (int, optional) : stop after this many iterations without improvement,
            0 disables. Defaults to 0.

    Raises:
        ConfigError: when a value is out of range
    """

    FIELDS = ("pop", "r_a", "p_c", "p_m", "max_iters", "seed", "intensity_constant", "stall_iters")

    def __init__(self, pop=40, r_a=1.0, p_c=0.7, p_m=0.1, max_iters=500, seed=1, intensity_constant=-1e-6, stall_iters=0):
        self.pop = _as_int("pop", pop)
        self.r_a = float(r_a)
        self.p_c = float(p_c)
        self.p_m = float(p_m)
        self.max_iters = _as_int("max_iters", max_iters)
        self.seed = _as_int("seed", seed)
        self.intensity_constant = float(intensity_constant)
        self.stall_iters = _as_int("stall_iters", stall_iters)
        self._validate()

    def _validate(self):
        if self.pop < 2:
            raise ConfigError(f"pop must be >= 2, got {self.pop}")
        if not self.r_a > 0:
            raise ConfigError(f"r_a must be > 0, got {self.r_a}")
        for name in ("p_c", "p_m"):
            value = getattr(self, name)
            if not 0 < value < 1:
                raise ConfigError(f"{name} must lie in (0, 1), got {value}")
        if self.max_iters < 1:
            raise ConfigError(f"max_iters must be >= 1, got {self.max_iters}")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if not self.intensity_constant < 0:
            raise ConfigError(f"intensity_constant must be < 0, got {self.intensity_constant}")
        if self.stall_iters < 0:
            raise ConfigError(f"stall_iters must be >= 0, got {self.stall_iters}")

    def replace(self, **changes):
        values = self.to_dict()
        values.update(changes)
        return SsaConfig(**values)

    def to_dict(self):
        return {name: getattr(self, name) for name in self.FIELDS}

    @classmethod
    def from_dict(cls, values):
        return cls(**{name: values[name] for name in cls.FIELDS if name in values})

    def __eq__(self, other):
        if not isinstance(other, SsaConfig):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __repr__(self):
        return f"SsaConfig({self.to_dict()})"


def _as_int(name, value):
    if isinstance(value, bool) or not float(value).is_integer():
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    return int(value)


class Spider:
    """State of one population member"""

    def __init__(self, position, mask):
        self.position = np.array(position, dtype=float)
        self.fitness = np.inf
        self.target_position = self.position.copy()
        self.target_intensity = 0.0
        self.inactive_degree = 0
        self.previous_move = np.zeros_like(self.position)
        self.mask = np.array(mask, dtype=np.int8)

    @property
    def dimension(self):
        return len(self.position)


class OptimizeResult:
    """Best-ever position and fitness plus the per-iteration best-fitness history

    Unpacks as ``position, fitness, history``.
    """

    def __init__(self, position, fitness, history, iterations, evaluations):
        self.position = position
        self.fitness = fitness
        self.history = history
        self.iterations = iterations
        self.evaluations = evaluations

    def __iter__(self):
        return iter((self.position, self.fitness, self.history))

    def history_frame(self):
        return pd.DataFrame({"iter": np.arange(1, len(self.history) + 1), "best_fitness": self.history})

    def write_history(self, path):
        """Write the history as CSV with columns ``iter,best_fitness``"""
        self.history_frame().to_csv(path, index=False, lineterminator="\n")


def source_intensity(fitness, C):
    """Vibration intensity log(1 / (fitness - C) + 1)

    Raises:
        DomainError: when fitness <= C
    """
    fitness = np.asarray(fitness, dtype=float)
    gap = fitness - C
    if np.any(~(gap > 0)):
        raise DomainError(f"fitness must exceed the intensity constant {C}; lower the constant below the objective's infimum")
    intensity = np.log1p(1.0 / gap)
    return float(intensity) if intensity.ndim == 0 else intensity


def attenuated_intensity(intensity, distance, sigma_bar, r_a):
    """Intensity received at Manhattan ``distance`` from the source

    ``intensity * exp(-distance / (sigma_bar * r_a))``. A population with
    ``sigma_bar == 0`` only hears vibrations at distance 0. Broadcasts over arrays.
    """
    intensity = np.asarray(intensity, dtype=float)
    distance = np.asarray(distance, dtype=float)
    if sigma_bar == 0:
        received = np.where(distance == 0, intensity, 0.0)
    else:
        received = intensity * np.exp(-distance / (sigma_bar * r_a))
    return float(received) if received.ndim == 0 else received


def _stack(received):
    if isinstance(received, Vibration) and np.ndim(received.intensity) == 1:
        return np.asarray(received.position, dtype=float), np.asarray(received.intensity, dtype=float)
    if isinstance(received, Vibration):
        received = [received]
    positions = np.array([np.asarray(v.position, dtype=float) for v in received])
    intensities = np.array([float(v.intensity) for v in received])
    return positions, intensities


StepDraws = namedtuple("StepDraws", ["change", "bits", "flip", "donors", "inertia", "step", "pull_back"])


def split_draws(block, dimension):
    """Slice one iteration's ``pop x (4 D + 3)`` uniform block into its named columns"""
    d = dimension
    return StepDraws(
        change=block[:, 0],
        bits=block[:, 1:d + 1],
        flip=block[:, d + 1],
        donors=block[:, d + 2:2 * d + 2],
        inertia=block[:, 2 * d + 2],
        step=block[:, 2 * d + 3:3 * d + 3],
        pull_back=block[:, 3 * d + 3:4 * d + 3],
    )


def _draw_index(draws, n):
    return np.minimum((np.asarray(draws) * n).astype(np.intp), n - 1)


def _select_targets(target_positions, target_intensities, inactive_degrees, positions, received):
    # received[s, j] is the intensity spider s hears from spider j; updates the first three in place
    best = np.argmax(received, axis=1)
    strongest = received[np.arange(len(received)), best]
    replaced = strongest > target_intensities
    target_positions[replaced] = positions[best[replaced]]
    target_intensities[replaced] = strongest[replaced]
    inactive_degrees[:] = np.where(replaced, 0, inactive_degrees + 1)


def _fresh_masks(bit_draws, flip_draws, p_m):
    masks = (bit_draws < p_m).astype(np.int8)
    rows = np.arange(len(masks))
    flip = _draw_index(flip_draws, masks.shape[1])
    empty, full = ~masks.any(axis=1), masks.all(axis=1)
    masks[rows[empty], flip[empty]] = 1
    masks[rows[full], flip[full]] = 0
    return masks


def _walk(positions, previous_moves, following, inertia, steps):
    return positions + previous_moves * inertia + (following - positions) * steps


def _pull_back(old, proposed, lower, upper, draws):
    result = np.where(proposed > upper, old + (upper - old) * draws, proposed)
    return np.where(proposed < lower, old - (old - lower) * draws, result)


def select_target(spider, received):
    """Follow the strongest received vibration if it beats the stored target

    Arguments:
        spider (Spider) : spider to update in place
        received (Vibration or list of Vibration) : vibrations from the whole population,
            stacked or one per source

    Returns:
        Spider: the updated spider
    """
    positions, intensities = _stack(received)
    target_position = spider.target_position[None, :].copy()
    target_intensity = np.array([spider.target_intensity], dtype=float)
    inactive_degree = np.array([spider.inactive_degree])
    _select_targets(target_position, target_intensity, inactive_degree, positions, intensities[None, :])
    spider.target_position = target_position[0]
    spider.target_intensity = float(target_intensity[0])
    spider.inactive_degree = int(inactive_degree[0])
    return spider


def mask_changes(inactive_degree, p_c, rng):
    """Draw whether a mask is regenerated, with probability 1 - p_c ** inactive_degree"""
    return rng.random() < 1 - p_c ** inactive_degree


def update_mask(spider, p_c, p_m, rng):
    """Regenerate the mask with probability ``1 - p_c ** inactive_degree``

    A regenerated mask has each bit one with probability ``p_m``; an all-zero mask gets
    one random bit set and an all-one mask one random bit cleared.
    """
    if mask_changes(spider.inactive_degree, p_c, rng):
        bits = rng.random(spider.dimension)
        flip = rng.random()
        spider.mask = _fresh_masks(bits[None, :], np.array([flip]), p_m)[0]
    return spider.mask


def following_position(spider, population, rng):
    """Target coordinates where the mask is 0, a random peer's coordinate where it is 1

    A fresh peer index is drawn for each masked dimension.
    """
    population = np.asarray(population, dtype=float)
    follow = spider.target_position.copy()
    dims = np.flatnonzero(spider.mask)
    if dims.size:
        donors = _draw_index(rng.random(dims.size), len(population))
        follow[dims] = population[donors, dims]
    return follow


def random_walk(spider, following, rng):
    """Move towards ``following`` keeping a random share of the previous move

    ``p + previous_move * r + (following - p) * R``, with ``r`` a scalar and ``R`` a
    per-dimension vector, both uniform in [0, 1). Stores the move in ``spider.previous_move``;
    ``optimize`` stores the move that remains after ``clamp_to_bounds``.
    """
    r = rng.random()
    R = rng.random(spider.dimension)
    new_position = _walk(spider.position, spider.previous_move, following, r, R)
    spider.previous_move = new_position - spider.position
    return new_position


def _box(bounds):
    if hasattr(bounds, "lower") and hasattr(bounds, "upper"):
        lower, upper = bounds.lower, bounds.upper
    else:
        lower, upper = bounds
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if lower.shape != upper.shape or lower.ndim != 1 or not np.all(lower < upper):
        raise ConfigError("bounds must be two equally long vectors with lower < upper")
    return lower, upper


def clamp_to_bounds(old, proposed, bounds, rng):
    """Pull coordinates that left the box back between the old position and the violated bound

    Arguments:
        old (numpy.ndarray) : previous position, inside ``bounds``
        proposed (numpy.ndarray) : candidate position
        bounds (ParamBounds or tuple) : object with ``lower``/``upper`` or a ``(lower, upper)`` pair
        rng (numpy.random.Generator) : one draw per violating coordinate

    Returns:
        numpy.ndarray: position inside ``bounds``
    """
    lower, upper = _box(bounds)
    old = np.asarray(old, dtype=float)
    proposed = np.asarray(proposed, dtype=float)
    violating = np.flatnonzero((proposed > upper) | (proposed < lower))
    draws = np.zeros_like(proposed)
    if violating.size:
        draws[violating] = rng.random(violating.size)
    return _pull_back(old, proposed, lower, upper, draws)


def _evaluate(objective, positions, vectorized):
    if vectorized:
        fitness = np.asarray(objective(positions), dtype=float).reshape(-1)
        if fitness.shape != (len(positions),):
            raise ConfigError(f"vectorized objective must return {len(positions)} values, got shape {fitness.shape}")
    else:
        fitness = np.array([objective(position) for position in positions], dtype=float)
    return np.where(np.isfinite(fitness), fitness, PENALTY)


class Web:
    """State of the whole population, one row per spider"""

    def __init__(self, positions, flip_draws):
        pop, dimension = positions.shape
        self.positions = positions
        self.target_positions = positions.copy()
        self.target_intensities = np.zeros(pop)
        self.inactive_degrees = np.zeros(pop, dtype=np.intp)
        self.previous_moves = np.zeros_like(positions)
        self.masks = np.zeros((pop, dimension), dtype=np.int8)
        self.masks[np.arange(pop), _draw_index(flip_draws, dimension)] = 1

    @property
    def pop(self):
        return len(self.positions)

    @property
    def dimension(self):
        return self.positions.shape[1]

    def step(self, intensities, draws, config, lower, upper):
        """Target selection, mask update, following position, walk and pull-back for every spider"""
        positions = self.positions
        sigma_bar = float(np.mean(np.std(positions, axis=0)))
        distances = np.abs(positions[:, None, :] - positions[None, :, :]).sum(axis=2)
        received = attenuated_intensity(intensities[None, :], distances, sigma_bar, config.r_a)
        _select_targets(self.target_positions, self.target_intensities, self.inactive_degrees, positions, received)

        change = draws.change < 1 - config.p_c ** self.inactive_degrees
        if change.any():
            self.masks[change] = _fresh_masks(draws.bits, draws.flip, config.p_m)[change]

        donors = _draw_index(draws.donors, self.pop)
        borrowed = positions[donors, np.arange(self.dimension)]
        following = np.where(self.masks == 1, borrowed, self.target_positions)

        proposed = _walk(positions, self.previous_moves, following, draws.inertia[:, None], draws.step)
        moved = _pull_back(positions, proposed, lower, upper, draws.pull_back)
        self.previous_moves = moved - positions
        self.positions = moved


def optimize(objective, bounds, config=None, vectorized=False, callback=None):
    """Minimize ``objective`` inside a box

    Arguments:
        objective (callable) : maps a position (numpy.ndarray of shape (D,)) to a real >= 0,
            or, with ``vectorized``, a (pop, D) matrix to pop values. NaN and infinite values
            are replaced by ``PENALTY``.
        bounds (ParamBounds or tuple) : search box
        config (SsaConfig, optional) : run settings. Defaults to ``SsaConfig()``.
        vectorized (bool, optional) : evaluate the population in one call. Defaults to False.
        callback (callable, optional) : called as ``callback(iteration, positions, fitness)``
            after each evaluation, with copies of the population state. Defaults to None.

    Returns:
        OptimizeResult: best-ever position and fitness plus the history
    """
    config = config or SsaConfig()
    lower, upper = _box(bounds)
    dimension = len(lower)
    rng = np.random.default_rng(config.seed)

    positions = lower + (upper - lower) * rng.random((config.pop, dimension))
    web = Web(positions, rng.random(config.pop))

    best_position, best_fitness = positions[0].copy(), np.inf
    history = []
    stalled = 0
    iteration = 0
    for iteration in range(1, config.max_iters + 1):
        fitness = _evaluate(objective, web.positions, vectorized)
        intensities = source_intensity(fitness, config.intensity_constant)
        if iteration == 1:
            web.target_intensities[:] = intensities

        leader = int(np.argmin(fitness))
        if fitness[leader] < best_fitness:
            best_position, best_fitness = web.positions[leader].copy(), float(fitness[leader])
            stalled = 0
        else:
            stalled += 1
        history.append(best_fitness)
        if callback is not None:
            callback(iteration, web.positions.copy(), fitness.copy())

        draws = split_draws(rng.random((config.pop, 4 * dimension + 3)), dimension)
        web.step(intensities, draws, config, lower, upper)

        if config.stall_iters and stalled >= config.stall_iters:
            logger.debug(f"No improvement for {stalled} iterations, stopping at iteration {iteration}")
            break

    logger.debug(f"SSA finished after {iteration} iterations with best fitness {best_fitness:.6g}")
    return OptimizeResult(best_position, best_fitness, history, iteration, iteration * config.pop)
