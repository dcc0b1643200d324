"""Simplex-BSO: one population iteration, then a short simplex search on the best.

Each outer iteration runs one BSO iteration, hands the best individual to a
fresh Nelder-Mead search limited to ``local_budget_factor * n`` evaluations,
and writes the refined point back over that individual.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bso import BsoConfig, bso_iteration, initialize_population
from .nms import nms_run
from .problem import Evaluator, LocalBudget, Problem, RandomSource, RunTrace

__all__ = ["HybridConfig", "local_refine", "simplex_bso_run", "sweep_lambda",
           "SWEEP_LAMBDAS"]

SWEEP_LAMBDAS = (20, 30, 40, 50, 60)


@dataclass(frozen=True)
class HybridConfig:
    bso: BsoConfig = field(default_factory=BsoConfig)
    local_budget_factor: int = 40

    def __post_init__(self):
        if int(self.local_budget_factor) != self.local_budget_factor or self.local_budget_factor < 0:
            raise ValueError("local_budget_factor must be a non-negative integer")

    def local_budget(self, dim: int) -> int:
        return self.local_budget_factor * dim

    def horizon(self, budget: int, dim: int) -> int:
        """Outer iterations ``T`` for the step-size schedule."""
        if self.bso.max_iterations is not None:
            return self.bso.max_iterations
        return max(1, budget // (self.bso.pop_size + self.local_budget(dim)))


def local_refine(x0, evaluator: Evaluator, lam: int, f0: float = np.inf):
    """Simplex search around ``x0`` on at most ``lam * n`` evaluations.

    Returns ``(x, f)``. The result is never worse than ``(x0, f0)``; with no
    budget left ``x0`` comes back untouched and nothing is evaluated.
    """
    x0 = np.asarray(x0, dtype=float)
    local = LocalBudget(evaluator, lam * x0.size)
    if local.limit == 0:
        return x0.copy(), f0
    x, f = nms_run(x0, local)
    if f <= f0:
        return x, f
    return x0.copy(), f0


def simplex_bso_run(problem: Problem, config: HybridConfig, evaluator: Evaluator,
                    rng: RandomSource) -> RunTrace:
    horizon = config.horizon(evaluator.budget, problem.dim)
    state = initialize_population(problem, config.bso, rng, evaluator, horizon)
    lam = config.local_budget_factor
    while evaluator.remaining > 0:
        bso_iteration(state, problem, config.bso, rng, evaluator)
        if evaluator.remaining <= 0 or lam == 0:
            continue
        b = state.best_index
        x, f = local_refine(state.positions[b], evaluator, lam, state.fitness[b])
        state.positions[b] = x
        state.fitness[b] = f
    return evaluator.trace


def sweep_lambda(problems, lambdas=SWEEP_LAMBDAS, runs: int = 10, budget: int = 20000,
                 base_seed: int = 0, workers: int = 1):
    """Run Simplex-BSO once per local-budget factor and collect a history matrix.

    Each factor is treated as its own solver (named ``sbso-<factor>``), so
    the result feeds straight into :func:`sbso.vci.vci_compare`.
    """
    from .harness import ExperimentConfig, execute

    if not lambdas:
        raise ValueError("at least one local budget factor is required")
    config = ExperimentConfig(problems=list(problems),
                              solvers=[f"sbso-{lam}" for lam in lambdas],
                              runs=runs, budget=budget, base_seed=base_seed,
                              workers=workers)
    return execute(config).history
