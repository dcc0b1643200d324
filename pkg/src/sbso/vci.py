"""Confidence-interval data profiles for comparing stochastic solvers.

A history matrix ``H[k, r, j, i]`` holds the best value found by solver
``i`` on problem ``j`` in run ``r`` after ``k + 1`` evaluations. Its mean
and two-standard-error bounds over runs are turned into data profiles, once
on the means to pick a winner and once on the winner's upper bound against
everyone else's lower bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "InsufficientRuns",
    "InconsistentReference",
    "HistoryMatrix",
    "ProfileCurve",
    "ComparisonReport",
    "sample_mean",
    "sample_variance",
    "confidence_bounds",
    "solve_time",
    "solve_times",
    "data_profile",
    "kappa_grid",
    "vci_compare",
    "DEFAULT_TAU",
]

DEFAULT_TAU = 1e-7


class InsufficientRuns(ValueError):
    pass


class InconsistentReference(ValueError):
    pass


@dataclass
class HistoryMatrix:
    """Best-so-far values indexed ``(evaluation, run, problem, solver)``.

    Attributes
    ----------
    data : ndarray, shape (mu_f, n_r, n_p, n_s)
    dims : ndarray of int, shape (n_p,)
        Problem dimensions ``D_p``.
    solvers, problems : list of str
    seeds : ndarray of int, shape (n_r, n_p, n_s), optional
    """

    data: np.ndarray
    dims: np.ndarray
    solvers: list
    problems: list
    seeds: np.ndarray | None = None
    f_min: np.ndarray | None = None

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        self.dims = np.asarray(self.dims, dtype=int)
        if self.data.ndim != 4 or 0 in self.data.shape:
            raise ValueError("history data must be a non-empty 4-D array")
        _, _, n_p, n_s = self.data.shape
        if self.dims.shape != (n_p,):
            raise ValueError("one dimension per problem is required")
        if len(self.solvers) != n_s or len(self.problems) != n_p:
            raise ValueError("solver/problem names do not match the data shape")

    @property
    def budget(self) -> int:
        return self.data.shape[0]

    @property
    def n_runs(self) -> int:
        return self.data.shape[1]

    def is_monotone(self) -> bool:
        d = self.data
        return bool(np.all((d[1:] <= d[:-1]) | (np.isnan(d[1:]) & np.isnan(d[:-1]))))

    @classmethod
    def from_traces(cls, traces, budget, dims, solvers, problems, seeds=None, f_min=None):
        """Assemble from ``traces[(i, j, r)] -> RunTrace``.

        Traces shorter than ``budget`` are held at their last value.
        """
        n_s, n_p = len(solvers), len(problems)
        n_r = 1 + max(r for (_, _, r) in traces)
        data = np.empty((budget, n_r, n_p, n_s))
        for (i, j, r), trace in traces.items():
            data[:, r, j, i] = trace.dense(budget)
        return cls(data, dims, list(solvers), list(problems), seeds, f_min)

    def select(self, solvers=None, problems=None) -> "HistoryMatrix":
        """Sub-matrix restricted to the given solver/problem indices."""
        si = list(range(len(self.solvers))) if solvers is None else list(solvers)
        pj = list(range(len(self.problems))) if problems is None else list(problems)
        data = self.data[:, :, pj][:, :, :, si]
        seeds = None if self.seeds is None else self.seeds[:, pj][:, :, si]
        f_min = None if self.f_min is None else np.asarray(self.f_min)[pj]
        return HistoryMatrix(data, self.dims[pj], [self.solvers[i] for i in si],
                             [self.problems[j] for j in pj], seeds, f_min)


def sample_mean(H) -> np.ndarray:
    """Mean over runs, accumulated run by run, shape ``(mu_f, n_p, n_s)``."""
    data = H.data if isinstance(H, HistoryMatrix) else np.asarray(H, dtype=float)
    acc = data[:, 0].copy()
    for r in range(1, data.shape[1]):
        acc += data[:, r]
    return acc / data.shape[1]


def sample_variance(H, mean=None) -> np.ndarray:
    """Unbiased sample variance over runs; needs at least two runs."""
    data = H.data if isinstance(H, HistoryMatrix) else np.asarray(H, dtype=float)
    n_r = data.shape[1]
    if n_r < 2:
        raise InsufficientRuns(f"variance needs at least 2 runs, got {n_r}")
    if mean is None:
        mean = sample_mean(data)
    acc = np.zeros_like(mean)
    for r in range(n_r):
        d = data[:, r] - mean
        acc += d * d
    return acc / (n_r - 1)


def confidence_bounds(mean, var, n_r: int):
    """Return ``(upper, lower)``: mean plus/minus two standard errors."""
    half = 2.0 * np.sqrt(var) / math.sqrt(n_r)
    return mean + half, mean - half


def solve_time(b, f0: float, fL: float, tau: float):
    """First 1-based index where ``f0 - b[k] >= (1 - tau) * (f0 - fL)``.

    Returns ``math.inf`` if the condition never holds.
    """
    if not 0 < tau < 1:
        raise ValueError("tau must lie in (0, 1)")
    if f0 < fL:
        raise InconsistentReference(f"reference value {f0} lies below f_L = {fL}")
    b = np.asarray(b, dtype=float)
    hit = np.flatnonzero(f0 - b >= (1 - tau) * (f0 - fL))
    return int(hit[0]) + 1 if hit.size else math.inf


def solve_times(M: np.ndarray, fL: np.ndarray, tau: float) -> np.ndarray:
    """Solve times for every (problem, solver) column of ``M[k, j, i]``.

    The reference value is each column's first entry. Returns a float array
    of shape ``(n_p, n_s)`` with ``inf`` for unsolved pairs.
    """
    if not 0 < tau < 1:
        raise ValueError("tau must lie in (0, 1)")
    M = np.asarray(M, dtype=float)
    f0 = M[0]
    fL = np.asarray(fL, dtype=float)[:, None]
    if np.any(f0 < fL):
        raise InconsistentReference("a reference value lies below f_L")
    cond = (f0 - M) >= (1 - tau) * (f0 - fL)
    first = np.argmax(cond, axis=0).astype(float) + 1
    first[~cond.any(axis=0)] = np.inf
    return first


def kappa_grid(budget: int, dims, points: int = 200) -> np.ndarray:
    """Log-spaced budgets from 1 to ``budget / (min D_p + 1)``."""
    top = budget / (np.min(dims) + 1)
    return np.logspace(0.0, np.log10(max(top, 1.0)), points)


@dataclass
class ProfileCurve:
    """Fraction of problems solved per solver along a budget grid.

    ``fraction[i, m]`` is solver ``i`` at ``kappa[m]``.
    """

    kappa: np.ndarray
    fraction: np.ndarray
    solvers: list = field(default_factory=list)

    @property
    def final(self) -> np.ndarray:
        return self.fraction[:, -1]

    @property
    def area(self) -> np.ndarray:
        """Area under each curve against ``log10(kappa)``."""
        if self.kappa.size < 2:
            return self.fraction[:, 0].copy()
        return np.trapezoid(self.fraction, np.log10(self.kappa), axis=1)

    def at(self, kappa: float) -> np.ndarray:
        """Fractions at the largest grid point not exceeding ``kappa``."""
        m = np.searchsorted(self.kappa, kappa, side="right") - 1
        if m < 0:
            return np.zeros(self.fraction.shape[0])
        return self.fraction[:, m]

    def rows(self):
        for i, name in enumerate(self.solvers):
            for k, f in zip(self.kappa, self.fraction[i]):
                yield name, float(k), float(f)


def data_profile(T, dims, kappa, solvers=None) -> ProfileCurve:
    """Fraction of problems with ``t_{p,s} / (D_p + 1) <= kappa``.

    ``T`` has shape ``(n_p, n_s)``; ``inf`` marks unsolved problems. Passing
    zero dimensions gives the profile in raw evaluations.
    """
    T = np.asarray(T, dtype=float)
    if T.ndim != 2 or T.shape[0] == 0:
        raise ValueError("the problem set is empty")
    dims = np.asarray(dims, dtype=float)
    kappa = np.atleast_1d(np.asarray(kappa, dtype=float))
    ratio = T / (dims[:, None] + 1.0)
    counts = (ratio[:, :, None] <= kappa[None, None, :]).sum(axis=0)
    names = list(solvers) if solvers is not None else [str(i) for i in range(T.shape[1])]
    return ProfileCurve(kappa, counts / T.shape[0], names)


@dataclass
class ComparisonReport:
    tau: float
    winner: int
    solvers: list
    step1: ProfileCurve
    step2: ProfileCurve
    verdict: str
    times_step1: np.ndarray
    times_step2: np.ndarray

    @property
    def winner_name(self) -> str:
        return self.solvers[self.winner]

    def as_dict(self) -> dict:
        return {
            "tau": self.tau,
            "winner": self.winner_name,
            "verdict": self.verdict,
            "step1_final": dict(zip(self.solvers, map(float, self.step1.final))),
            "step2_final": dict(zip(self.solvers, map(float, self.step2.final))),
            "step1_area": dict(zip(self.solvers, map(float, self.step1.area))),
            "step2_area": dict(zip(self.solvers, map(float, self.step2.area))),
        }


def _rank_key(curve: ProfileCurve, i: int):
    return float(curve.final[i]), float(curve.area[i])


def vci_compare(H: HistoryMatrix, tau: float = DEFAULT_TAU, kappa=None,
                raw_scale: bool = False) -> ComparisonReport:
    """Two-step comparison of all solvers in ``H``.

    Step 1 profiles the run means and names the winner: largest solved
    fraction at the end of the grid, ties broken by area under the profile,
    then by solver index. Step 2 profiles the winner's upper bound against
    the other solvers' lower bounds. The verdict is ``"significant"`` when the
    winner still ranks strictly first in step 2, else ``"average-only"``.

    With ``raw_scale`` the profiles are in plain evaluations rather than
    units of ``D_p + 1``.
    """
    n_s = H.data.shape[3]
    if n_s < 2:
        raise ValueError("at least two solvers are needed for a comparison")
    dims = np.zeros_like(H.dims) if raw_scale else H.dims
    if kappa is None:
        kappa = kappa_grid(H.budget, dims)
    raw_min = H.data.min(axis=(0, 1, 3))

    mean = sample_mean(H)
    var = sample_variance(H, mean)
    upper, lower = confidence_bounds(mean, var, H.n_runs)

    fL1 = np.fmin(raw_min, np.nanmin(mean, axis=(0, 2)))
    t1 = solve_times(mean, fL1, tau)
    step1 = data_profile(t1, dims, kappa, H.solvers)
    winner = max(range(n_s), key=lambda i: (_rank_key(step1, i), -i))

    mixed = lower.copy()
    mixed[:, :, winner] = upper[:, :, winner]
    fL2 = np.fmin(raw_min, np.nanmin(mixed, axis=(0, 2)))
    t2 = solve_times(mixed, fL2, tau)
    step2 = data_profile(t2, dims, kappa, H.solvers)
    wk = _rank_key(step2, winner)
    strict = all(wk > _rank_key(step2, i) for i in range(n_s) if i != winner)
    verdict = "significant" if strict else "average-only"
    return ComparisonReport(tau, winner, list(H.solvers), step1, step2, verdict, t1, t2)
