"""
How long should each local search run?
======================================

The local search gets ``lambda * n`` evaluations per outer iteration. Sweep
the factor and compare the variants as if they were separate solvers.
"""

from sbso.hybrid import sweep_lambda
from sbso.suite import list_suite
from sbso.vci import vci_compare

subset = list_suite("hedar")[::9]
print("problems:", ", ".join(e.name for e in subset))

H = sweep_lambda(subset, runs=3, budget=4000, base_seed=5)
rep = vci_compare(H, 1e-5)
for name, final, area in zip(rep.solvers, rep.step1.final, rep.step1.area):
    print(f"{name:8s} solved {final:.2f}  area {area:.2f}")
print("winner:", rep.winner_name, rep.verdict)
