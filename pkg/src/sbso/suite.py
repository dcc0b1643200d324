"""The Hedar box-constrained test set: 35 families, 68 instances.

Every objective takes an array of shape ``(..., n)`` and reduces over the
last axis, so the same function scores one point or a whole population.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import partial

import numpy as np

from .problem import Problem

__all__ = [
    "SuiteEntry",
    "UnknownFamily",
    "UnsupportedDimension",
    "UnknownSuite",
    "FUNCTIONS",
    "make_problem",
    "list_suite",
    "suite_problems",
    "manifest_table",
]

PI = np.pi

# max of x*sin(sqrt(x)) on [0, 500]; makes the Schwefel minimum exactly 0
SCHWEFEL_SHIFT = 418.98288727243371
# negated six-hump camel minimum; makes the Hump minimum exactly 0
HUMP_SHIFT = 1.0316284534898774


class UnknownFamily(KeyError):
    pass


class UnsupportedDimension(ValueError):
    pass


class UnknownSuite(KeyError):
    pass


def _idx(x):
    return np.arange(1, x.shape[-1] + 1, dtype=float)


# --------------------------------------------------------------------------
# unimodal
# --------------------------------------------------------------------------

def beale(x):
    x1, x2 = x[..., 0], x[..., 1]
    return ((1.5 - x1 + x1 * x2) ** 2 + (2.25 - x1 + x1 * x2 ** 2) ** 2
            + (2.625 - x1 + x1 * x2 ** 3) ** 2)


def matyas(x):
    x1, x2 = x[..., 0], x[..., 1]
    return 0.26 * (x1 ** 2 + x2 ** 2) - 0.48 * x1 * x2


def sphere(x):
    return np.sum(x * x, axis=-1)


def sum_squares(x):
    return np.sum(_idx(x) * x * x, axis=-1)


def trid(x):
    return (np.sum((x - 1.0) ** 2, axis=-1)
            - np.sum(x[..., 1:] * x[..., :-1], axis=-1))


def zakharov(x):
    s = np.sum(0.5 * _idx(x) * x, axis=-1)
    return np.sum(x * x, axis=-1) + s ** 2 + s ** 4


# --------------------------------------------------------------------------
# multimodal
# --------------------------------------------------------------------------

def ackley(x):
    n = x.shape[-1]
    a = -20.0 * np.exp(-0.2 * np.sqrt(np.sum(x * x, axis=-1) / n))
    b = -np.exp(np.sum(np.cos(2 * PI * x), axis=-1) / n)
    return a + b + 20.0 + np.e


def bohachevsky1(x):
    x1, x2 = x[..., 0], x[..., 1]
    return (x1 ** 2 + 2 * x2 ** 2 - 0.3 * np.cos(3 * PI * x1)
            - 0.4 * np.cos(4 * PI * x2) + 0.7)


def bohachevsky2(x):
    x1, x2 = x[..., 0], x[..., 1]
    return (x1 ** 2 + 2 * x2 ** 2
            - 0.3 * np.cos(3 * PI * x1) * np.cos(4 * PI * x2) + 0.3)


def bohachevsky3(x):
    x1, x2 = x[..., 0], x[..., 1]
    return x1 ** 2 + 2 * x2 ** 2 - 0.3 * np.cos(3 * PI * x1 + 4 * PI * x2) + 0.3


def booth(x):
    x1, x2 = x[..., 0], x[..., 1]
    return (x1 + 2 * x2 - 7) ** 2 + (2 * x1 + x2 - 5) ** 2


def branin(x):
    x1, x2 = x[..., 0], x[..., 1]
    return ((x2 - 5.1 / (4 * PI ** 2) * x1 ** 2 + 5 / PI * x1 - 6) ** 2
            + 10 * (1 - 1 / (8 * PI)) * np.cos(x1) + 10)


def colville(x):
    x1, x2, x3, x4 = (x[..., i] for i in range(4))
    return (100 * (x1 ** 2 - x2) ** 2 + (x1 - 1) ** 2 + (x3 - 1) ** 2
            + 90 * (x3 ** 2 - x4) ** 2
            + 10.1 * ((x2 - 1) ** 2 + (x4 - 1) ** 2)
            + 19.8 * (x2 - 1) * (x4 - 1))


def dixon_price(x):
    i = _idx(x)[1:]
    return ((x[..., 0] - 1) ** 2
            + np.sum(i * (2 * x[..., 1:] ** 2 - x[..., :-1]) ** 2, axis=-1))


def easom(x):
    x1, x2 = x[..., 0], x[..., 1]
    return -np.cos(x1) * np.cos(x2) * np.exp(-(x1 - PI) ** 2 - (x2 - PI) ** 2)


def goldstein_price(x):
    x1, x2 = x[..., 0], x[..., 1]
    a = 1 + (x1 + x2 + 1) ** 2 * (19 - 14 * x1 + 3 * x1 ** 2 - 14 * x2
                                  + 6 * x1 * x2 + 3 * x2 ** 2)
    b = 30 + (2 * x1 - 3 * x2) ** 2 * (18 - 32 * x1 + 12 * x1 ** 2 + 48 * x2
                                       - 36 * x1 * x2 + 27 * x2 ** 2)
    return a * b


def griewank(x):
    return (np.sum(x * x, axis=-1) / 4000
            - np.prod(np.cos(x / np.sqrt(_idx(x))), axis=-1) + 1)


_H3_ALPHA = np.array([1.0, 1.2, 3.0, 3.2])
_H3_A = np.array([[3.0, 10, 30], [0.1, 10, 35], [3.0, 10, 30], [0.1, 10, 35]])
_H3_P = np.array([[0.3689, 0.1170, 0.2673],
                  [0.4699, 0.4387, 0.7470],
                  [0.1091, 0.8732, 0.5547],
                  [0.03815, 0.5743, 0.8828]])

_H6_ALPHA = _H3_ALPHA
_H6_A = np.array([[10, 3, 17, 3.5, 1.7, 8],
                  [0.05, 10, 17, 0.1, 8, 14],
                  [3, 3.5, 1.7, 10, 17, 8],
                  [17, 8, 0.05, 10, 0.1, 14]])
_H6_P = 1e-4 * np.array([[1312, 1696, 5569, 124, 8283, 5886],
                         [2329, 4135, 8307, 3736, 1004, 9991],
                         [2348, 1451, 3522, 2883, 3047, 6650],
                         [4047, 8828, 8732, 5743, 1091, 381]])


def _hartman(x, alpha, a, p):
    d = x[..., None, :] - p
    return -np.sum(alpha * np.exp(-np.sum(a * d * d, axis=-1)), axis=-1)


hartman3 = partial(_hartman, alpha=_H3_ALPHA, a=_H3_A, p=_H3_P)
hartman6 = partial(_hartman, alpha=_H6_ALPHA, a=_H6_A, p=_H6_P)


def hump(x):
    x1, x2 = x[..., 0], x[..., 1]
    return (HUMP_SHIFT + 4 * x1 ** 2 - 2.1 * x1 ** 4 + x1 ** 6 / 3 + x1 * x2
            - 4 * x2 ** 2 + 4 * x2 ** 4)


def levy(x):
    w = 1 + (x - 1) / 4
    head = np.sin(PI * w[..., 0]) ** 2
    mid = np.sum((w[..., :-1] - 1) ** 2
                 * (1 + 10 * np.sin(PI * w[..., :-1] + 1) ** 2), axis=-1)
    tail = (w[..., -1] - 1) ** 2 * (1 + np.sin(2 * PI * w[..., -1]) ** 2)
    return head + mid + tail


def michalewicz(x, m=10):
    return -np.sum(np.sin(x) * np.sin(_idx(x) * x * x / PI) ** (2 * m), axis=-1)


def perm(x, beta=0.5):
    n = x.shape[-1]
    i = _idx(x)
    k = np.arange(1, n + 1, dtype=float)[:, None]
    inner = np.sum((i ** k + beta) * ((x[..., None, :] / i) ** k - 1), axis=-1)
    return np.sum(inner ** 2, axis=-1)


def powell(x):
    a, b, c, d = (x[..., j::4] for j in range(4))
    return np.sum((a + 10 * b) ** 2 + 5 * (c - d) ** 2 + (b - 2 * c) ** 4
                  + 10 * (a - d) ** 4, axis=-1)


_POWER_SUM_B = np.array([8.0, 18, 44, 114])


def power_sum(x):
    k = np.arange(1, x.shape[-1] + 1, dtype=float)[:, None]
    s = np.sum(x[..., None, :] ** k, axis=-1)
    return np.sum((s - _POWER_SUM_B[:x.shape[-1]]) ** 2, axis=-1)


def rastrigin(x):
    return 10 * x.shape[-1] + np.sum(x * x - 10 * np.cos(2 * PI * x), axis=-1)


def rosenbrock(x):
    return np.sum(100 * (x[..., 1:] - x[..., :-1] ** 2) ** 2
                  + (x[..., :-1] - 1) ** 2, axis=-1)


def schwefel(x):
    return (SCHWEFEL_SHIFT * x.shape[-1]
            - np.sum(x * np.sin(np.sqrt(np.abs(x))), axis=-1))


_SHEKEL_A = np.array([[4, 4, 4, 4], [1, 1, 1, 1], [8, 8, 8, 8], [6, 6, 6, 6],
                      [3, 7, 3, 7], [2, 9, 2, 9], [5, 5, 3, 3], [8, 1, 8, 1],
                      [6, 2, 6, 2], [7, 3.6, 7, 3.6]])
_SHEKEL_C = 0.1 * np.array([1, 2, 2, 4, 4, 6, 3, 7, 5, 5])


def shekel(x, m=10):
    d = x[..., None, :] - _SHEKEL_A[:m]
    return -np.sum(1.0 / (np.sum(d * d, axis=-1) + _SHEKEL_C[:m]), axis=-1)


def shubert(x):
    j = np.arange(1, 6, dtype=float)
    terms = np.sum(j * np.cos((j + 1) * x[..., None] + j), axis=-1)
    return np.prod(terms, axis=-1)


FUNCTIONS = {
    "beale": beale,
    "matyas": matyas,
    "sphere": sphere,
    "sum-squares": sum_squares,
    "trid": trid,
    "zakharov": zakharov,
    "ackley": ackley,
    "bohachevsky-1": bohachevsky1,
    "bohachevsky-2": bohachevsky2,
    "bohachevsky-3": bohachevsky3,
    "booth": booth,
    "branin": branin,
    "colville": colville,
    "dixon-price": dixon_price,
    "easom": easom,
    "goldstein-price": goldstein_price,
    "griewank": griewank,
    "hartman-3": hartman3,
    "hartman-6": hartman6,
    "hump": hump,
    "levy": levy,
    "michalewicz": michalewicz,
    "perm": perm,
    "powell": powell,
    "power-sum": power_sum,
    "rastrigin": rastrigin,
    "rosenbrock": rosenbrock,
    "schwefel": schwefel,
    "shekel-5": partial(shekel, m=5),
    "shekel-7": partial(shekel, m=7),
    "shekel-10": partial(shekel, m=10),
    "shubert": shubert,
}


@dataclass(frozen=True)
class SuiteEntry:
    """One row instance of the test set.

    ``f_min`` is the minimal value used as ground truth. ``f_min_reported``
    is the value as printed in the published table; the two differ only
    where the printed value is not the true minimum of the function (Trid in
    10 dimensions) or is truncated (Michalewicz in 10 dimensions).
    """

    family: str
    dim: int
    characteristic: str
    lower: tuple
    upper: tuple
    f_min: float
    f_min_reported: float

    @property
    def name(self) -> str:
        return f"{self.family}-{self.dim}"

    def problem(self) -> Problem:
        return Problem(self.name, np.array(self.lower), np.array(self.upper),
                       FUNCTIONS[self.family], self.f_min)


U, M = "unimodal", "multimodal"

# (family, characteristic, {dim: (f_min, reported)}, lower, upper)
# scalar bounds are broadcast over all dimensions
_TABLE = [
    ("beale", U, {2: 0.0}, -4.5, 4.5),
    ("matyas", U, {2: 0.0}, -8.0, 12.5),
    ("sphere", U, dict.fromkeys((2, 5, 10, 20), 0.0), -4.1, 6.4),
    ("sum-squares", U, dict.fromkeys((2, 5, 10, 20), 0.0), -8.0, 12.5),
    ("trid", U, {6: -50.0, 10: (-210.0, -200.0)}, None, None),
    ("zakharov", U, dict.fromkeys((2, 5, 10, 20), 0.0), -5.0, 10.0),
    ("ackley", M, dict.fromkeys((2, 5, 10, 20), 0.0), -15.0, 30.0),
    ("bohachevsky-1", M, {2: 0.0}, -80.0, 125.0),
    ("bohachevsky-2", M, {2: 0.0}, -80.0, 125.0),
    ("bohachevsky-3", M, {2: 0.0}, -80.0, 125.0),
    ("booth", M, {2: 0.0}, -100.0, 100.0),
    ("branin", M, {2: 0.397887357729739}, (-5.0, 0.0), (10.0, 15.0)),
    ("colville", M, {4: 0.0}, -10.0, 10.0),
    ("dixon-price", M, dict.fromkeys((2, 5, 10, 20), 0.0), -10.0, 10.0),
    ("easom", M, {2: -1.0}, -100.0, 100.0),
    ("goldstein-price", M, {2: 3.0}, -2.0, 2.0),
    ("griewank", M, dict.fromkeys((2, 5, 10, 20), 0.0), -480.0, 750.0),
    ("hartman-3", M, {3: -3.86278214782076}, 0.0, 1.0),
    ("hartman-6", M, {6: -3.32236801141551}, 0.0, 1.0),
    ("hump", M, {2: 0.0}, -5.0, 5.0),
    ("levy", M, dict.fromkeys((2, 5, 10, 20), 0.0), -10.0, 10.0),
    ("michalewicz", M, {2: -1.80130341008983, 5: -4.687658179,
                        10: (-9.66015171564134, -9.66015)}, 0.0, PI),
    ("perm", M, {4: 0.0}, -4.0, 4.0),
    ("powell", M, dict.fromkeys((4, 12, 24, 48), 0.0), -4.0, 5.0),
    ("power-sum", M, {4: 0.0}, 0.0, 4.0),
    ("rastrigin", M, dict.fromkeys((2, 5, 10, 20), 0.0), -4.1, 6.4),
    ("rosenbrock", M, dict.fromkeys((2, 5, 10, 20), 0.0), -5.0, 10.0),
    ("schwefel", M, dict.fromkeys((2, 5, 10, 20), 0.0), -500.0, 500.0),
    ("shekel-5", M, {4: -10.1531996790582}, 0.0, 10.0),
    ("shekel-7", M, {4: -10.4029405668187}, 0.0, 10.0),
    ("shekel-10", M, {4: -10.5364098166920}, 0.0, 10.0),
    ("shubert", M, {2: -186.730908831024}, -10.0, 10.0),
]

_TRID_BOX = {6: 36.0, 10: 100.0}


def _build_entries():
    entries = []
    for family, char, minima, lo, hi in _TABLE:
        for dim in sorted(minima):
            value = minima[dim]
            f_min, reported = value if isinstance(value, tuple) else (value, value)
            if family == "trid":
                lo_v, hi_v = (-_TRID_BOX[dim],) * dim, (_TRID_BOX[dim],) * dim
            elif isinstance(lo, tuple):
                lo_v, hi_v = lo, hi
            else:
                lo_v, hi_v = (lo,) * dim, (hi,) * dim
            entries.append(SuiteEntry(family, dim, char, tuple(map(float, lo_v)),
                                      tuple(map(float, hi_v)), f_min, reported))
    return tuple(entries)


_ENTRIES = _build_entries()
_BY_KEY = {(e.family, e.dim): e for e in _ENTRIES}

SUITES = {
    "hedar": lambda e: True,
    "hedar-unimodal": lambda e: e.characteristic == U,
    "hedar-multimodal": lambda e: e.characteristic == M,
}


def list_suite(suite_id: str = "hedar") -> list[SuiteEntry]:
    """Entries of a suite in table order, dimension ascending within a family."""
    try:
        keep = SUITES[suite_id]
    except KeyError:
        raise UnknownSuite(f"unknown suite {suite_id!r}; choose from {sorted(SUITES)}") from None
    return [e for e in _ENTRIES if keep(e)]


def get_entry(family: str, dim: int) -> SuiteEntry:
    if family not in FUNCTIONS:
        raise UnknownFamily(f"unknown function family {family!r}")
    try:
        return _BY_KEY[(family, int(dim))]
    except KeyError:
        dims = sorted(d for f, d in _BY_KEY if f == family)
        raise UnsupportedDimension(
            f"{family} is only defined at dimensions {dims}, not {dim}") from None


def make_problem(family: str, dim: int) -> Problem:
    return get_entry(family, dim).problem()


def suite_problems(suite_id: str = "hedar") -> list[Problem]:
    return [e.problem() for e in list_suite(suite_id)]


def manifest_table(suite_id: str = "hedar", delimiter: str = ",") -> str:
    """The suite as delimited text: family, dim, characteristic, lower, upper, f_min.

    Per-coordinate bounds are joined with ``;``.
    """
    buf = io.StringIO()
    w = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    w.writerow(["family", "dim", "characteristic", "lower", "upper", "f_min"])
    for e in list_suite(suite_id):
        w.writerow([e.family, e.dim, e.characteristic,
                    ";".join(repr(v) for v in e.lower),
                    ";".join(repr(v) for v in e.upper), repr(e.f_min)])
    return buf.getvalue()
