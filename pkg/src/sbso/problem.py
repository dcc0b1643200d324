"""Bound-constrained problems, budgeted evaluation and best-so-far traces.

Every solver in the package talks to its objective through an
:class:`Evaluator`, which enforces the evaluation budget exactly and records
the running minimum of all values it has returned.
"""

from __future__ import annotations

import time
from bisect import bisect_right
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "BudgetExhausted",
    "DimensionMismatch",
    "OutOfBounds",
    "EmptyTrace",
    "Problem",
    "RunTrace",
    "Evaluator",
    "LocalBudget",
    "RandomSource",
    "clamp_to_bounds",
    "best_at",
]


class BudgetExhausted(RuntimeError):
    """Raised when an evaluation is requested after the budget is spent."""


class DimensionMismatch(ValueError):
    pass


class OutOfBounds(ValueError):
    pass


class EmptyTrace(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Problem:
    """A box-constrained minimization problem with a known optimum value.

    Parameters
    ----------
    name : str
        Instance identifier, e.g. ``"rastrigin-2"``.
    lower, upper : array_like
        Box bounds, one entry per dimension.
    objective : callable
        Maps an array of shape ``(..., n)`` to values of shape ``(...)``.
        Must be deterministic.
    f_min : float
        Minimal function value over the box.
    """

    name: str
    lower: np.ndarray
    upper: np.ndarray
    objective: Callable[[np.ndarray], np.ndarray]
    f_min: float

    def __post_init__(self):
        lower = np.array(self.lower, dtype=float)
        upper = np.array(self.upper, dtype=float)
        if lower.ndim != 1 or lower.shape != upper.shape or lower.size == 0:
            raise ValueError("lower and upper must be non-empty vectors of equal length")
        if not np.all(lower < upper):
            raise ValueError("lower must be strictly less than upper in every dimension")
        lower.flags.writeable = False
        upper.flags.writeable = False
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def __call__(self, x):
        return self.objective(np.asarray(x, dtype=float))

    def __repr__(self):
        return f"Problem({self.name!r}, dim={self.dim}, f_min={self.f_min!r})"


class RunTrace:
    """Best-so-far values of one run, stored as improvement points.

    Only evaluations that lower the running minimum are kept, as
    ``(index, value)`` pairs with 1-based evaluation indices. The dense trace
    is rebuilt on demand.
    """

    __slots__ = ("indices", "values", "length")

    def __init__(self, indices=(), values=(), length=0):
        self.indices = list(indices)
        self.values = list(values)
        self.length = int(length)
        if len(self.indices) != len(self.values):
            raise ValueError("indices and values differ in length")
        if self.indices and (self.indices[0] != 1 or self.indices[-1] > self.length):
            raise ValueError("improvement indices must start at 1 and lie within length")

    @classmethod
    def from_values(cls, raw) -> "RunTrace":
        trace = cls()
        for v in raw:
            trace.append(float(v))
        return trace

    def append(self, value: float) -> None:
        self.length += 1
        if not self.values or value < self.values[-1]:
            self.indices.append(self.length)
            self.values.append(value)

    def extend(self, raw: np.ndarray) -> None:
        """Append a batch of raw values (vectorized running minimum)."""
        raw = np.asarray(raw, dtype=float)
        if raw.size == 0:
            return
        prev = self.values[-1] if self.values else np.inf
        run = np.minimum.accumulate(np.concatenate(([prev], raw)))
        improved = np.flatnonzero(run[1:] < run[:-1])
        if not self.values:
            improved = np.union1d([0], improved)
        run = run[1:]
        self.indices.extend((improved + self.length + 1).tolist())
        self.values.extend(run[improved].tolist())
        self.length += raw.size

    def __len__(self):
        return self.length

    @property
    def best(self) -> float:
        if not self.values:
            raise EmptyTrace("trace is empty")
        return self.values[-1]

    def dense(self, length: int | None = None) -> np.ndarray:
        """Dense best-so-far array, optionally held constant up to ``length``."""
        n = self.length if length is None else int(length)
        out = np.empty(n)
        if n == 0:
            return out
        if not self.values:
            raise EmptyTrace("trace is empty")
        bounds = self.indices[1:] + [n + 1]
        for start, stop, v in zip(self.indices, bounds, self.values):
            if start > n:
                break
            out[start - 1:min(stop, n + 1) - 1] = v
        return out

    def __eq__(self, other):
        if not isinstance(other, RunTrace):
            return NotImplemented
        return (self.length == other.length and self.indices == other.indices
                and self.values == other.values)

    def __repr__(self):
        return f"RunTrace(length={self.length}, improvements={len(self.values)})"


def best_at(trace: RunTrace, k: int) -> float:
    """Best value found within the first ``k`` evaluations.

    Past the end of the trace the last value is held, so solvers that stop
    early still have a defined value at every budget.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    if not trace.values:
        raise EmptyTrace("trace is empty")
    pos = bisect_right(trace.indices, min(k, trace.length)) - 1
    return trace.values[pos]


def clamp_to_bounds(x, lower, upper) -> np.ndarray:
    return np.minimum(np.maximum(x, lower), upper)


class Evaluator:
    """Budgeted access to a problem's objective.

    Parameters
    ----------
    problem : Problem
    budget : int
        Maximum number of objective evaluations.

    Notes
    -----
    ``evaluate`` raises :class:`BudgetExhausted` at the boundary; solvers
    treat that as their stop signal. Wall time spent inside the objective is
    accumulated in ``elapsed`` for informational purposes only.
    """

    def __init__(self, problem: Problem, budget: int):
        if int(budget) != budget or budget < 1:
            raise ValueError(f"budget must be a positive integer, got {budget!r}")
        self.problem = problem
        self.budget = int(budget)
        self.count = 0
        self.trace = RunTrace()
        self.elapsed = 0.0
        self._lower = problem.lower
        self._upper = problem.upper
        self._fn = problem.objective

    @property
    def remaining(self) -> int:
        return self.budget - self.count

    @property
    def exhausted(self) -> bool:
        return self.count >= self.budget

    def _check(self, x: np.ndarray) -> None:
        if x.shape[-1] != self._lower.size:
            raise DimensionMismatch(
                f"expected {self._lower.size} coordinates, got {x.shape[-1]}")
        if (x < self._lower).any() or (x > self._upper).any():
            raise OutOfBounds("point lies outside the search box")

    def evaluate(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if x.ndim != 1:
            raise DimensionMismatch("evaluate expects a single point")
        if self.count >= self.budget:
            raise BudgetExhausted(f"budget of {self.budget} evaluations spent")
        self._check(x)
        t0 = time.perf_counter()
        value = float(self._fn(x))
        self.elapsed += time.perf_counter() - t0
        self.count += 1
        self.trace.append(value)
        return value

    def evaluate_batch(self, xs) -> np.ndarray:
        """Evaluate rows of ``xs`` in order, as far as the budget allows.

        Returns the values actually computed; the result is shorter than
        ``xs`` when the budget ran out part way. Raises
        :class:`BudgetExhausted` only if nothing at all could be evaluated.
        """
        xs = np.asarray(xs, dtype=float)
        if xs.ndim != 2:
            raise DimensionMismatch("evaluate_batch expects a 2-D array")
        if len(xs) == 0:
            return np.empty(0)
        if self.count >= self.budget:
            raise BudgetExhausted(f"budget of {self.budget} evaluations spent")
        self._check(xs)
        xs = xs[:self.remaining]
        t0 = time.perf_counter()
        values = np.asarray(self._fn(xs), dtype=float).reshape(len(xs))
        self.elapsed += time.perf_counter() - t0
        self.count += len(values)
        self.trace.extend(values)
        return values


class LocalBudget:
    """A capped view on a parent evaluator.

    Evaluations are charged to the parent; this view refuses further requests
    once its own ``limit`` is reached or the parent is exhausted.
    """

    def __init__(self, parent: Evaluator, limit: int):
        self.parent = parent
        self.limit = max(0, min(int(limit), parent.remaining))
        self.count = 0
        self.problem = parent.problem

    @property
    def remaining(self) -> int:
        return self.limit - self.count

    def evaluate(self, x) -> float:
        if self.count >= self.limit:
            raise BudgetExhausted("local budget spent")
        value = self.parent.evaluate(x)
        self.count += 1
        return value


class RandomSource:
    """Seeded random stream shared by one run.

    Wraps a PCG64 generator; identical seeds give bit-identical draws.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self.gen = np.random.Generator(np.random.PCG64(self.seed))

    def uniform(self, size=None):
        """Uniform draws on [0, 1)."""
        return self.gen.random(size)

    def normal(self, size=None):
        return self.gen.standard_normal(size)

    def integers(self, high, size=None):
        return self.gen.integers(0, high, size=size)

    def spawn(self, n: int) -> list["RandomSource"]:
        """Deterministic child streams, e.g. one per individual."""
        ss = np.random.SeedSequence(self.seed)
        return [RandomSource(int(s.generate_state(1, np.uint64)[0]))
                for s in ss.spawn(n)]
