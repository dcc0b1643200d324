"""
The Hedar benchmark set
=======================

Sixty-eight bound-constrained instances built from classical test functions,
each with a known global minimum value.
"""

import numpy as np

from sbso.problem import Evaluator
from sbso.suite import list_suite, make_problem

# the full set, and its unimodal / multimodal halves
entries = list_suite("hedar")
print(len(entries), "instances,",
      len(list_suite("hedar-unimodal")), "unimodal,",
      len(list_suite("hedar-multimodal")), "multimodal")

for e in entries[:6]:
    print(f"{e.name:16s} {e.characteristic:10s} f_min = {e.f_min:g}")

# a problem evaluates single points or whole batches along the last axis
branin = make_problem("branin", 2)
print(branin.lower, branin.upper)
print(branin([np.pi, 2.275]), "vs", branin.f_min)
X = branin.lower + np.random.default_rng(0).random((5, 2)) * branin.width
print(branin(X))

# an evaluator counts calls, keeps a best-so-far trace and refuses past its budget
ev = Evaluator(branin, 3)
for x in X[:3]:
    ev.evaluate(x)
print(ev.count, ev.remaining, ev.trace.dense())
