"""Brain storm optimization in the objective space.

Individuals are split into elites and normals by fitness alone, children
are drawn around one or two parents with Gaussian noise whose scale follows
a logistic schedule, and the population is replaced synchronously at the end
of each iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from .problem import BudgetExhausted, Evaluator, Problem, RandomSource, RunTrace

__all__ = [
    "BsoConfig",
    "BsoState",
    "initialize_population",
    "classify",
    "disrupt",
    "step_size",
    "generate_child",
    "bso_iteration",
    "bso_run",
]


@dataclass(frozen=True)
class BsoConfig:
    """Parameters of the population search.

    ``max_iterations`` is the horizon ``T`` of the step-size schedule; left
    as ``None`` it is derived from the evaluation budget by the run
    functions.
    """

    pop_size: int = 100
    elite_fraction: float = 0.2
    p_disrupt: float = 0.2
    p_one_parent: float = 0.8
    p_elite_source: float = 0.2
    slope_c: float = 20.0
    max_iterations: int | None = None

    def __post_init__(self):
        if int(self.pop_size) != self.pop_size or self.pop_size < 1:
            raise ValueError("pop_size must be a positive integer")
        if not 0.0 < self.elite_fraction < 1.0:
            raise ValueError("elite_fraction must lie in (0, 1)")
        for name in ("p_disrupt", "p_one_parent", "p_elite_source"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")
        if self.slope_c <= 0:
            raise ValueError("slope_c must be positive")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("max_iterations must be a positive integer")

    @property
    def n_elites(self) -> int:
        return max(1, math.ceil(self.elite_fraction * self.pop_size))

    def horizon(self, budget: int) -> int:
        """Default ``T``: full iterations that fit after initialization."""
        if self.max_iterations is not None:
            return self.max_iterations
        return max(1, (budget - self.pop_size) // self.pop_size)


@dataclass
class BsoState:
    positions: np.ndarray
    fitness: np.ndarray
    iteration: int = 0
    horizon: int = 1
    pending: dict = field(default_factory=dict)

    @property
    def best_index(self) -> int:
        # argmin returns the first occurrence, i.e. ties go to the lowest index
        return int(np.argmin(self.fitness))

    @property
    def best(self) -> float:
        return float(self.fitness.min())


def initialize_population(problem: Problem, config: BsoConfig, rng: RandomSource,
                          evaluator: Evaluator, horizon: int | None = None) -> BsoState:
    if evaluator.remaining < config.pop_size:
        raise BudgetExhausted(
            f"initial population needs {config.pop_size} evaluations, "
            f"{evaluator.remaining} left")
    u = rng.uniform((config.pop_size, problem.dim))
    positions = problem.lower + u * problem.width
    fitness = evaluator.evaluate_batch(positions)
    if horizon is None:
        horizon = config.horizon(evaluator.budget)
    return BsoState(positions, fitness, 0, horizon)


def classify(state: BsoState, config: BsoConfig) -> tuple[np.ndarray, np.ndarray]:
    """Split indices into elites (best fitness) and normals.

    Both index arrays are returned in ascending index order.
    """
    if state.fitness.size == 0:
        raise ValueError("population is empty")
    n_elites = min(config.n_elites, state.fitness.size)
    order = np.argsort(state.fitness, kind="stable")
    mask = np.zeros(state.fitness.size, dtype=bool)
    mask[order[:n_elites]] = True
    return np.flatnonzero(mask), np.flatnonzero(~mask)


def disrupt(state: BsoState, problem: Problem, config: BsoConfig, rng: RandomSource,
            evaluator: Evaluator) -> BsoState:
    """Re-draw one coordinate of one random individual, with probability ``p_disrupt``.

    The disrupted individual is always kept, whatever its new fitness.
    Returns ``state`` (modified in place).
    """
    if rng.uniform() >= config.p_disrupt:
        return state
    i = int(rng.integers(state.fitness.size))
    d = int(rng.integers(problem.dim))
    x = state.positions[i].copy()
    x[d] = problem.lower[d] + rng.uniform() * problem.width[d]
    value = evaluator.evaluate(x)
    state.positions[i] = x
    state.fitness[i] = value
    return state


def step_size(t, T, c, rng: RandomSource | None = None, size=None, u=None):
    """Noise scale ``logsig((0.5*T - t)/c) * u`` with ``u ~ U[0, 1)``.

    ``u`` may be given explicitly; otherwise it is drawn from ``rng`` with
    the requested ``size``. ``t`` is clamped to ``[0, T]``.
    """
    if c <= 0:
        raise ValueError("c must be positive")
    t = min(max(t, 0), T)
    envelope = expit((0.5 * T - t) / c)
    if u is None:
        u = rng.uniform(size)
    return envelope * u


def _sample_children(state, elites, normals, problem, config, rng, count):
    """Draw ``count`` children from the current population.

    Draw layout per call: a ``(count, 5)`` uniform block (source, parent
    count, two parent picks, mixing weight), then per-dimension step sizes
    and Gaussian noise.
    """
    n = problem.dim
    u = rng.uniform((count, 5))
    xi = step_size(state.iteration, state.horizon, config.slope_c, rng, (count, n))
    g = rng.normal((count, n))

    use_elite = u[:, 0] < config.p_elite_source
    if normals.size == 0:
        use_elite[:] = True
    elif elites.size == 0:
        use_elite[:] = False
    one_parent = u[:, 1] < config.p_one_parent

    size = np.where(use_elite, elites.size, normals.size)
    pos_a = np.minimum((u[:, 2] * size).astype(int), size - 1)
    # second parent differs from the first whenever the source allows it
    offset = np.minimum((u[:, 3] * np.maximum(size - 1, 1)).astype(int),
                        np.maximum(size - 2, 0))
    pos_b = np.where(size >= 2, (pos_a + 1 + offset) % size, pos_a)

    def pick(pos):
        out = np.empty(count, dtype=int)
        if elites.size:
            out[use_elite] = elites[pos[use_elite]]
        if normals.size:
            out[~use_elite] = normals[pos[~use_elite]]
        return out

    a = state.positions[pick(pos_a)]
    b = state.positions[pick(pos_b)]
    w = np.where(one_parent, 1.0, u[:, 4])[:, None]
    base = w * a + (1.0 - w) * b
    child = base + xi * g * problem.width
    return np.minimum(np.maximum(child, problem.lower), problem.upper)


def generate_child(state: BsoState, elites, normals, problem: Problem, config: BsoConfig,
                   rng: RandomSource, evaluator: Evaluator, index: int = 0):
    """Generate and evaluate one child competing with individual ``index``.

    Returns ``(index, position, fitness)``.
    """
    child = _sample_children(state, elites, normals, problem, config, rng, 1)[0]
    return index, child, evaluator.evaluate(child)


def bso_iteration(state: BsoState, problem: Problem, config: BsoConfig,
                  rng: RandomSource, evaluator: Evaluator) -> BsoState:
    """One classify / disrupt / generate / update cycle.

    Children are generated for every individual from the same (post
    disruption) population and the improving ones are swapped in together
    at the end. If the budget runs out part way, the children evaluated so
    far still take effect.
    """
    elites, normals = classify(state, config)
    try:
        disrupt(state, problem, config, rng, evaluator)
    except BudgetExhausted:
        return state
    if evaluator.remaining <= 0:
        return state
    children = _sample_children(state, elites, normals, problem, config, rng,
                                state.fitness.size)
    values = evaluator.evaluate_batch(children)
    better = np.flatnonzero(values < state.fitness[:values.size])
    state.pending = {int(i): (children[i], values[i]) for i in better}
    _apply_pending(state)
    state.iteration += 1
    return state


def _apply_pending(state: BsoState) -> None:
    for i, (x, f) in state.pending.items():
        state.positions[i] = x
        state.fitness[i] = f
    state.pending = {}


def bso_run(problem: Problem, config: BsoConfig, evaluator: Evaluator,
            rng: RandomSource) -> RunTrace:
    """Run the population search until the evaluation budget is spent."""
    state = initialize_population(problem, config, rng, evaluator)
    while evaluator.remaining > 0:
        bso_iteration(state, problem, config, rng, evaluator)
    return evaluator.trace
