"""Brain storm optimization, Nelder-Mead and their Simplex-BSO hybrid.

Also ships the Hedar box-constrained test set and a small benchmarking
toolkit (seeded batch runs, L-curves, confidence-interval data profiles).
"""

from .bso import BsoConfig, bso_run
from .harness import ExperimentConfig, execute, run_experiment
from .hybrid import HybridConfig, simplex_bso_run, sweep_lambda
from .nms import nms_run
from .problem import (BudgetExhausted, Evaluator, Problem, RandomSource, RunTrace,
                      best_at, clamp_to_bounds)
from .suite import list_suite, make_problem
from .vci import HistoryMatrix, vci_compare

__version__ = "0.1.0"

__all__ = [
    "BsoConfig", "bso_run", "HybridConfig", "simplex_bso_run", "sweep_lambda",
    "nms_run", "Problem", "Evaluator", "RandomSource", "RunTrace", "BudgetExhausted",
    "best_at", "clamp_to_bounds", "list_suite", "make_problem", "HistoryMatrix",
    "vci_compare", "ExperimentConfig", "execute", "run_experiment",
]
