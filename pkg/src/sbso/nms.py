"""Budgeted Nelder-Mead simplex search.

Reflection, expansion, outside/inside contraction and shrink with unit
coefficients as in the classic method (reflect 1, expand 2, contract 1/2,
shrink 1/2). The search only ends when the evaluator refuses; there is no
convergence test.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .problem import BudgetExhausted

__all__ = [
    "Simplex",
    "initial_simplex",
    "order_simplex",
    "centroid",
    "nms_iteration",
    "nms_run",
]

REL_STEP = 0.05
ZERO_STEP = 0.00025


@dataclass
class Simplex:
    vertices: np.ndarray  # (n + 1, n)
    values: np.ndarray    # (n + 1,)

    @property
    def n(self) -> int:
        return self.vertices.shape[1]

    def copy(self) -> "Simplex":
        return Simplex(self.vertices.copy(), self.values.copy())


class _Tracker:
    """Evaluator proxy remembering the best point it has seen."""

    def __init__(self, evaluator):
        self.evaluator = evaluator
        self.problem = evaluator.problem
        self.best_x = None
        self.best_f = np.inf

    @property
    def remaining(self):
        return self.evaluator.remaining

    def evaluate(self, x):
        f = self.evaluator.evaluate(x)
        if f < self.best_f:
            self.best_x, self.best_f = x.copy(), f
        return f


def _clamp(x, problem):
    return np.minimum(np.maximum(x, problem.lower), problem.upper)


def _initial_vertices(x0, problem):
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    verts = np.tile(x0, (n + 1, 1))
    for i in range(n):
        step = REL_STEP * x0[i] if x0[i] != 0 else ZERO_STEP
        moved = min(max(x0[i] + step, problem.lower[i]), problem.upper[i])
        if moved == x0[i]:
            # pinned against the box; step the other way
            moved = min(max(x0[i] - step, problem.lower[i]), problem.upper[i])
        verts[i + 1, i] = moved
    return verts


def initial_simplex(x0, evaluator) -> Simplex:
    """Vertex 1 is ``x0``; vertex ``i+1`` moves coordinate ``i`` by 5%.

    A zero coordinate moves by 0.00025 instead. All n+1 vertices are
    evaluated; :class:`BudgetExhausted` propagates if they do not fit.
    """
    verts = _initial_vertices(x0, evaluator.problem)
    values = np.empty(len(verts))
    for i, v in enumerate(verts):
        values[i] = evaluator.evaluate(v)
    return Simplex(verts, values)


def order_simplex(s: Simplex) -> Simplex:
    order = np.argsort(s.values, kind="stable")
    return Simplex(s.vertices[order], s.values[order])


def centroid(s: Simplex) -> np.ndarray:
    """Mean of the best n vertices of an ordered simplex."""
    return s.vertices[:-1].mean(axis=0)


def nms_iteration(s: Simplex, evaluator) -> Simplex:
    """One Nelder-Mead step on an ordered simplex; returns a new ordered simplex.

    If the evaluator refuses part way, the simplex is returned with whatever
    replacements were already complete.
    """
    s = s.copy()
    problem = evaluator.problem
    verts, vals = s.vertices, s.values
    f1, fn, fw = vals[0], vals[-2], vals[-1]
    worst = verts[-1]
    xbar = centroid(s)
    try:
        xr = _clamp(2.0 * xbar - worst, problem)
        fr = evaluator.evaluate(xr)
        if f1 <= fr < fn:
            verts[-1], vals[-1] = xr, fr
            return order_simplex(s)
        if fr < f1:
            xe = _clamp(xbar + 2.0 * (xbar - worst), problem)
            fe = evaluator.evaluate(xe)
            if fe < fr:
                verts[-1], vals[-1] = xe, fe
            else:
                verts[-1], vals[-1] = xr, fr
            return order_simplex(s)
        if fr < fw:
            xc = _clamp(0.5 * (xbar + xr), problem)
            fc = evaluator.evaluate(xc)
            if fc < fr:
                verts[-1], vals[-1] = xc, fc
                return order_simplex(s)
        else:
            xcc = _clamp(0.5 * (xbar + worst), problem)
            fcc = evaluator.evaluate(xcc)
            if fcc < fw:
                verts[-1], vals[-1] = xcc, fcc
                return order_simplex(s)
        best = verts[0].copy()
        for i in range(1, len(verts)):
            x = _clamp(0.5 * (verts[i] + best), problem)
            f = evaluator.evaluate(x)
            verts[i], vals[i] = x, f
    except BudgetExhausted:
        pass
    return order_simplex(s)


def nms_run(x0, evaluator):
    """Run Nelder-Mead from ``x0`` until the evaluator refuses.

    Returns ``(best_x, best_f)``, the best point evaluated during the run.
    If not even ``x0`` could be evaluated, ``best_f`` is ``inf``.
    """
    x0 = np.asarray(x0, dtype=float)
    tracker = _Tracker(evaluator)
    try:
        s = order_simplex(initial_simplex(x0, tracker))
    except BudgetExhausted:
        return (x0.copy() if tracker.best_x is None else tracker.best_x), tracker.best_f
    while tracker.remaining > 0:
        s = nms_iteration(s, tracker)
    return tracker.best_x, tracker.best_f
