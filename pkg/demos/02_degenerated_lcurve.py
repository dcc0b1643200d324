"""
Degenerated L-curves
====================

Brain storm optimization drops quickly at first and then crawls. Handing the
best individual to a short Nelder-Mead search after every population
iteration turns the crawl into a steep descent on smooth problems.
"""

import numpy as np

from sbso.bso import BsoConfig, bso_run
from sbso.hybrid import HybridConfig, simplex_bso_run
from sbso.nms import nms_run
from sbso.problem import Evaluator, RandomSource, best_at
from sbso.suite import make_problem

problem = make_problem("zakharov", 5)
budget = 20000
checkpoints = [200, 500, 1000, 2000, 5000, 10000, 20000]

bso = bso_run(problem, BsoConfig(), Evaluator(problem, budget), RandomSource(1))
sbso = simplex_bso_run(problem, HybridConfig(), Evaluator(problem, budget), RandomSource(1))

rng = RandomSource(1)
ev = Evaluator(problem, budget)
nms_run(problem.lower + rng.uniform(problem.dim) * problem.width, ev)
nms = ev.trace

print(f"{'evals':>6s} {'bso':>10s} {'nms':>10s} {'sbso':>10s}")
for k in checkpoints:
    row = [best_at(t, k) - problem.f_min for t in (bso, nms, sbso)]
    print(f"{k:6d} " + " ".join(f"{v:10.2e}" for v in row))

# the whole curve is available as a dense array, one value per evaluation
curve = sbso.dense()
print("first evaluation below 1e-10:", int(np.argmax(curve <= 1e-10)) + 1)
