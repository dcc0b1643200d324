"""
Comparing stochastic solvers with confidence-interval data profiles
===================================================================

Run three solvers a few times on a handful of problems, then profile the run
means to pick a winner and profile the confidence bounds to see whether the
win survives the run-to-run spread.
"""

from sbso.harness import ExperimentConfig, execute
from sbso.suite import make_problem
from sbso.vci import vci_compare

problems = [make_problem(f, d) for f, d in
            [("sphere", 5), ("rosenbrock", 5), ("levy", 5), ("branin", 2),
             ("hartman-3", 3), ("shekel-7", 4), ("rastrigin", 2), ("powell", 4)]]
config = ExperimentConfig(problems=problems, solvers="bso,nms,sbso", runs=5, budget=5000,
                          base_seed=11, workers=1)
H = execute(config).history
print("history matrix", H.data.shape, "(evaluations, runs, problems, solvers)")

for tau in (1e-1, 1e-3, 1e-7):
    rep = vci_compare(H, tau)
    print(f"\ntau = {tau:g}: winner {rep.winner_name} ({rep.verdict})")
    for name, f1, f2 in zip(rep.solvers, rep.step1.final, rep.step2.final):
        print(f"  {name:5s} mean profile {f1:.2f}   bound profile {f2:.2f}")
