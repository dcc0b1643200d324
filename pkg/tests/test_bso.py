import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sbso.bso import (BsoConfig, BsoState, bso_iteration, bso_run, classify, disrupt,
                      generate_child, initialize_population, step_size)
from sbso.problem import BudgetExhausted, Evaluator, RandomSource
from sbso.suite import make_problem


class ScriptedRng(RandomSource):
    """RandomSource whose uniform draws come from a script, in order."""

    def __init__(self, uniforms, seed=0):
        super().__init__(seed)
        self.script = list(uniforms)

    def uniform(self, size=None):
        value = self.script.pop(0)
        return np.broadcast_to(np.asarray(value, dtype=float), size or ()).copy()


@pytest.fixture
def sphere2():
    return make_problem("sphere", 2)


def _state(problem, fitness, positions=None):
    fitness = np.asarray(fitness, dtype=float)
    if positions is None:
        positions = np.zeros((fitness.size, problem.dim))
    return BsoState(np.asarray(positions, dtype=float), fitness, 0, 10)


# --- initialization ---------------------------------------------------------

def test_initialize_population(sphere2):
    ev = Evaluator(sphere2, 1000)
    st_ = initialize_population(sphere2, BsoConfig(), RandomSource(3), ev)
    assert st_.positions.shape == (100, 2)
    assert ev.count == 100 and st_.iteration == 0
    assert np.all((st_.positions >= sphere2.lower) & (st_.positions <= sphere2.upper))
    np.testing.assert_array_equal(st_.fitness, sphere2(st_.positions))


def test_initialize_same_seed(sphere2):
    a = initialize_population(sphere2, BsoConfig(), RandomSource(9), Evaluator(sphere2, 200))
    b = initialize_population(sphere2, BsoConfig(), RandomSource(9), Evaluator(sphere2, 200))
    np.testing.assert_array_equal(a.positions, b.positions)


def test_initialize_single_individual(sphere2):
    cfg = BsoConfig(pop_size=1)
    st_ = initialize_population(sphere2, cfg, RandomSource(0), Evaluator(sphere2, 10))
    elites, normals = classify(st_, cfg)
    assert elites.tolist() == [0] and normals.size == 0


def test_initialize_needs_budget(sphere2):
    with pytest.raises(BudgetExhausted):
        initialize_population(sphere2, BsoConfig(), RandomSource(0), Evaluator(sphere2, 50))


def test_config_validation():
    with pytest.raises(ValueError):
        BsoConfig(p_disrupt=1.5)
    with pytest.raises(ValueError):
        BsoConfig(elite_fraction=0.0)
    assert BsoConfig().n_elites == 20
    assert BsoConfig(pop_size=7).n_elites == 2


# --- classification ---------------------------------------------------------

def test_classify_examples(sphere2):
    cfg = BsoConfig(pop_size=5)
    elites, normals = classify(_state(sphere2, [5, 1, 3, 2, 4]), cfg)
    assert elites.tolist() == [1] and normals.tolist() == [0, 2, 3, 4]
    elites, _ = classify(_state(sphere2, [2.0] * 5), cfg)
    assert elites.tolist() == [0]
    cfg10 = BsoConfig(pop_size=10)
    elites, _ = classify(_state(sphere2, np.arange(10.0)[::-1]), cfg10)
    assert len(elites) == 2 and set(elites) == {8, 9}


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=40), st.floats(0.01, 0.99))
def test_classify_partition(values, frac):
    cfg = BsoConfig(pop_size=len(values), elite_fraction=frac)
    state = BsoState(np.zeros((len(values), 1)), np.array(values, float))
    elites, normals = classify(state, cfg)
    assert sorted(elites.tolist() + normals.tolist()) == list(range(len(values)))
    assert len(elites) == min(len(values), max(1, math.ceil(frac * len(values))))
    if normals.size:
        assert state.fitness[elites].max() <= state.fitness[normals].min()


# --- disruption -------------------------------------------------------------

def test_disrupt_never(sphere2):
    state = _state(sphere2, [1.0, 2.0], [[1.0, 0.0], [0.0, 1.4142]])
    before = state.positions.copy()
    ev = Evaluator(sphere2, 10)
    disrupt(state, sphere2, BsoConfig(p_disrupt=0.0), RandomSource(0), ev)
    np.testing.assert_array_equal(state.positions, before)
    assert ev.count == 0


@pytest.mark.parametrize("seed", range(20))
def test_disrupt_always(sphere2, seed):
    pos = np.array([[1.0, 1.0], [2.0, -1.0], [0.5, 0.5]])
    state = _state(sphere2, sphere2(pos), pos.copy())
    ev = Evaluator(sphere2, 10)
    disrupt(state, sphere2, BsoConfig(p_disrupt=1.0), RandomSource(seed), ev)
    changed = state.positions != pos
    assert changed.sum() == 1
    i, d = np.argwhere(changed)[0]
    assert sphere2.lower[d] <= state.positions[i, d] <= sphere2.upper[d]
    assert state.fitness[i] == sphere2(state.positions[i])
    assert ev.count == 1


# --- step size --------------------------------------------------------------

def test_step_size_examples():
    assert step_size(50, 100, 20.0, u=1.0) == 0.5
    expected = 1.0 / (1.0 + math.exp(-2.5))
    assert step_size(0, 100, 20.0, u=1.0) == pytest.approx(expected, abs=1e-15)
    assert expected == pytest.approx(0.924142, abs=1e-6)


@given(st.integers(1, 1000), st.floats(0.1, 100))
def test_step_size_envelope_monotone(T, c):
    env = [step_size(t, T, c, u=1.0) for t in range(T + 1)]
    assert all(b <= a for a, b in zip(env, env[1:]))
    assert env[0] > env[-1]


def test_step_size_range():
    xi = step_size(0, 10, 0.1, RandomSource(0), size=10000)
    assert xi.min() >= 0.0 and xi.max() < 1.0


# --- child generation -------------------------------------------------------

def _elite_normal(n):
    return np.arange(1), np.arange(1, n)


def test_child_two_parents_degenerate(sphere2):
    pos = np.array([[1.0, 2.0], [-1.0, 0.5], [3.0, -2.0]])
    state = _state(sphere2, sphere2(pos), pos)
    elites, normals = np.array([0]), np.array([1, 2])
    cfg = BsoConfig(pop_size=3)
    # source normals, two parents, first pick normals[0], second -> normals[1], w = 1
    rng = ScriptedRng([[[0.9, 0.95, 0.0, 0.0, 1.0]], 0.0])
    _, child, f = generate_child(state, elites, normals, sphere2, cfg, rng,
                                 Evaluator(sphere2, 5))
    np.testing.assert_array_equal(child, pos[1])
    assert f == sphere2(pos[1])


def test_child_one_parent_zero_noise(sphere2):
    pos = np.array([[1.0, 2.0], [-1.0, 0.5], [3.0, -2.0]])
    state = _state(sphere2, sphere2(pos), pos)
    rng = ScriptedRng([[[0.1, 0.1, 0.3, 0.6, 0.5]], 0.0])
    _, child, _ = generate_child(state, np.array([0]), np.array([1, 2]), sphere2,
                                 BsoConfig(pop_size=3), rng, Evaluator(sphere2, 5))
    np.testing.assert_array_equal(child, pos[0])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31))
def test_children_in_box(seed):
    p = make_problem("branin", 2)
    ev = Evaluator(p, 400)
    rng = RandomSource(seed)
    state = initialize_population(p, BsoConfig(pop_size=10), rng, ev, horizon=5)
    elites, normals = classify(state, BsoConfig(pop_size=10))
    for i in range(10):
        _, x, f = generate_child(state, elites, normals, p, BsoConfig(pop_size=10), rng, ev, i)
        assert np.all((x >= p.lower) & (x <= p.upper))
        assert f == p(x)


# --- iteration --------------------------------------------------------------

def test_iteration_no_better_child(sphere2):
    cfg = BsoConfig(pop_size=10, p_disrupt=0.0)
    state = _state(sphere2, np.zeros(10))
    ev = Evaluator(sphere2, 100)
    bso_iteration(state, sphere2, cfg, RandomSource(1), ev)
    assert np.all(state.positions == 0) and np.all(state.fitness == 0)
    assert state.iteration == 1


@pytest.mark.parametrize("p_disrupt,extra", [(0.0, 0), (1.0, 1)])
def test_iteration_evaluation_count(sphere2, p_disrupt, extra):
    cfg = BsoConfig(pop_size=20, p_disrupt=p_disrupt)
    ev = Evaluator(sphere2, 1000)
    state = initialize_population(sphere2, cfg, RandomSource(5), ev)
    before = ev.count
    bso_iteration(state, sphere2, cfg, RandomSource(6), ev)
    assert ev.count - before == 20 + extra


@pytest.mark.parametrize("seed", range(10))
def test_iteration_elitist(seed):
    p = make_problem("rastrigin", 5)
    cfg = BsoConfig(pop_size=30, p_disrupt=0.0)
    ev = Evaluator(p, 3000)
    rng = RandomSource(seed)
    state = initialize_population(p, cfg, rng, ev)
    for _ in range(10):
        before = state.fitness.copy()
        bso_iteration(state, p, cfg, rng, ev)
        assert np.all(state.fitness <= before)
        np.testing.assert_array_equal(state.fitness, p(state.positions))


def test_iteration_partial_budget(sphere2):
    cfg = BsoConfig(pop_size=20, p_disrupt=0.0)
    ev = Evaluator(sphere2, 27)
    state = initialize_population(sphere2, cfg, RandomSource(2), ev)
    best = state.best
    bso_iteration(state, sphere2, cfg, RandomSource(3), ev)
    assert ev.count == 27
    assert state.best == min(best, ev.trace.best)
    assert state.best == ev.trace.best


def test_staged_update_order_independent():
    p = make_problem("levy", 5)
    cfg = BsoConfig(pop_size=12, p_disrupt=0.0)
    ev = Evaluator(p, 10000)
    state = initialize_population(p, cfg, RandomSource(11), ev, horizon=20)
    elites, normals = classify(state, cfg)
    streams = RandomSource(12).spawn(cfg.pop_size)

    def next_population(order):
        s = BsoState(state.positions.copy(), state.fitness.copy(), 0, 20)
        subs = {i: RandomSource(streams[i].seed) for i in order}
        staged = {}
        for i in order:
            _, x, f = generate_child(s, elites, normals, p, cfg, subs[i], ev, i)
            if f < s.fitness[i]:
                staged[i] = (x, f)
        for i in order:
            if i in staged:
                s.positions[i], s.fitness[i] = staged[i]
        return s

    ref = next_population(list(range(12)))
    perm = np.random.default_rng(0).permutation(12).tolist()
    other = next_population(perm)
    np.testing.assert_array_equal(ref.positions, other.positions)
    np.testing.assert_array_equal(ref.fitness, other.fitness)


# --- full runs --------------------------------------------------------------

def test_run_horizon():
    assert BsoConfig().horizon(20000) == 199


def test_run_trace_and_determinism(sphere2):
    a = bso_run(sphere2, BsoConfig(), Evaluator(sphere2, 3000), RandomSource(77))
    b = bso_run(sphere2, BsoConfig(), Evaluator(sphere2, 3000), RandomSource(77))
    assert a == b and len(a) == 3000
    d = a.dense()
    assert np.all(d[1:] <= d[:-1])


def test_sphere2_accuracy():
    # established by running the implementation over seeds 0..49
    p = make_problem("sphere", 2)
    finals = [bso_run(p, BsoConfig(), Evaluator(p, 20000), RandomSource(s)).best
              for s in range(50)]
    assert sum(f <= 1e-6 for f in finals) >= 25
    assert max(finals) <= 1e-4
