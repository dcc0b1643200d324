"""Seeded batch experiments over (solver, problem, run) triples.

Results are written as plain text: one trace file per triple holding the
improvement points of its best-so-far curve, one history file per
(problem, solver) holding all runs, and JSON manifests describing the
layout. Everything except wall-clock timings in ``manifest.json`` is
byte-for-byte reproducible from the configuration.
"""

from __future__ import annotations

import json
import logging
import math
import os
import re
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bso import BsoConfig, bso_run
from .hybrid import HybridConfig, simplex_bso_run
from .nms import nms_run
from .problem import Evaluator, Problem, RandomSource, RunTrace
from .suite import list_suite
from .vci import DEFAULT_TAU, HistoryMatrix, vci_compare

log = logging.getLogger(__name__)

__all__ = [
    "ExperimentConfig",
    "ExperimentResult",
    "run_seed",
    "solve",
    "execute",
    "run_experiment",
    "write_trace",
    "read_trace",
    "load_history",
    "emit_lcurves",
    "emit_profiles",
    "WORKERS_ENV",
]

WORKERS_ENV = "SBSO_WORKERS"
LCURVE_FLOOR = 1e-30

_SOLVER_RE = re.compile(r"^(bso|nms|sbso)(?:-(\d+))?$")


class InvalidConfig(ValueError):
    pass


def _parse_solver(name: str):
    m = _SOLVER_RE.match(name)
    if not m or (m.group(2) is not None and m.group(1) != "sbso"):
        raise InvalidConfig(f"unknown solver {name!r}; use bso, nms, sbso or sbso-<factor>")
    return m.group(1), (int(m.group(2)) if m.group(2) else 40)


def solve(solver: str, problem: Problem, budget: int, seed: int) -> RunTrace:
    """Run one named solver once and return its trace."""
    kind, lam = _parse_solver(solver)
    rng = RandomSource(seed)
    ev = Evaluator(problem, budget)
    if kind == "bso":
        return bso_run(problem, BsoConfig(), ev, rng)
    if kind == "sbso":
        return simplex_bso_run(problem, HybridConfig(local_budget_factor=lam), ev, rng)
    x0 = problem.lower + rng.uniform(problem.dim) * problem.width
    nms_run(x0, ev)
    return ev.trace


def run_seed(base_seed: int, solver: int, problem: int, run: int) -> int:
    """64-bit seed of one triple, derived through a SeedSequence hash."""
    ss = np.random.SeedSequence([base_seed, solver, problem, run])
    return int(ss.generate_state(1, np.uint64)[0])


def _budget_rule(rule):
    if isinstance(rule, (int, np.integer)):
        return lambda dim: int(rule)
    m = re.fullmatch(r"\s*(\d+)\s*\*?\s*n\s*", str(rule))
    if m:
        per = int(m.group(1))
        return lambda dim: per * dim
    if str(rule).strip().isdigit():
        return lambda dim: int(rule)
    raise InvalidConfig(f"budget must be an integer or '<k>n', got {rule!r}")


@dataclass
class ExperimentConfig:
    """What to run and where to put it.

    ``problems`` overrides ``suite`` when given. ``budget`` is an integer or
    a per-dimension rule such as ``"10000n"``. ``workers=None`` means the
    ``SBSO_WORKERS`` environment variable, else all cores.
    """

    suite: str = "hedar"
    solvers: list = field(default_factory=lambda: ["bso", "nms", "sbso"])
    runs: int = 50
    budget: int | str = 20000
    base_seed: int = 0
    out: str | None = None
    workers: int | None = None
    problems: list | None = None

    def __post_init__(self):
        if isinstance(self.solvers, str):
            self.solvers = [s.strip() for s in self.solvers.split(",") if s.strip()]
        if not self.solvers:
            raise InvalidConfig("no solvers selected")
        for s in self.solvers:
            _parse_solver(s)
        if len(set(self.solvers)) != len(self.solvers):
            raise InvalidConfig("duplicate solver names")
        if int(self.runs) != self.runs or self.runs < 1:
            raise InvalidConfig("runs must be a positive integer")
        self._budget_of = _budget_rule(self.budget)
        for p in self.problem_list():
            need = BsoConfig().pop_size + p.dim + 1
            if self.budget_for(p) < need:
                raise InvalidConfig(f"budget for {p.name} must be at least {need}")

    def problem_list(self) -> list[Problem]:
        if self.problems is not None:
            return [p.problem() if hasattr(p, "problem") else p for p in self.problems]
        return [e.problem() for e in list_suite(self.suite)]

    def budget_for(self, problem: Problem) -> int:
        return self._budget_of(problem.dim)

    def resolved_workers(self) -> int:
        if self.workers is not None:
            return max(1, int(self.workers))
        env = os.environ.get(WORKERS_ENV)
        if env:
            return max(1, int(env))
        return os.cpu_count() or 1

    def snapshot(self) -> dict:
        return {
            "suite": self.suite if self.problems is None else None,
            "problems": [p.name for p in self.problem_list()],
            "solvers": list(self.solvers),
            "runs": self.runs,
            "budget": self.budget if isinstance(self.budget, (int, np.integer)) else str(self.budget),
            "base_seed": self.base_seed,
        }


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    history: HistoryMatrix
    traces: dict
    records: list


def _run_triple(task):
    i, j, r, solver, problem, budget, seed = task
    t0 = time.perf_counter()
    try:
        trace = solve(solver, problem, budget, seed)
        status, error = "ok", None
    except Exception as exc:  # one bad run must not sink the batch
        trace = RunTrace([1], [math.inf], budget)
        status, error = "failed", "".join(traceback.format_exception_only(type(exc), exc)).strip()
    wall = time.perf_counter() - t0
    return (i, j, r), trace, {
        "solver": solver, "problem": problem.name, "run": r, "seed": seed,
        "status": status, "error": error,
        "evaluations": len(trace) if status == "ok" else 0,
        "budget": budget, "final_best": trace.best, "wall_time": wall,
    }


def execute(config: ExperimentConfig) -> ExperimentResult:
    """Run every triple of ``config`` in memory (no files written)."""
    problems = config.problem_list()
    tasks = [(i, j, r, s, p, config.budget_for(p), run_seed(config.base_seed, i, j, r))
             for i, s in enumerate(config.solvers)
             for j, p in enumerate(problems)
             for r in range(config.runs)]
    workers = min(config.resolved_workers(), len(tasks))
    log.info("running %d triples on %d worker(s)", len(tasks), workers)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_triple, tasks, chunksize=4))
    else:
        results = [_run_triple(t) for t in tasks]
    # assemble in task order regardless of completion order
    traces = {key: tr for key, tr, _ in results}
    records = [rec for _, _, rec in results]
    budget = max(config.budget_for(p) for p in problems)
    seeds = np.zeros((config.runs, len(problems), len(config.solvers)), dtype=np.uint64)
    for (i, j, r), _, rec in results:
        seeds[r, j, i] = rec["seed"]
    history = HistoryMatrix.from_traces(
        traces, budget, [p.dim for p in problems], config.solvers,
        [p.name for p in problems], seeds, np.array([p.f_min for p in problems]))
    for rec in records:
        if rec["status"] != "ok":
            log.warning("%s on %s run %d failed: %s", rec["solver"], rec["problem"],
                        rec["run"], rec["error"])
    return ExperimentResult(config, history, traces, records)


# --------------------------------------------------------------------------
# persistence
# --------------------------------------------------------------------------

def _fmt(v: float) -> str:
    return repr(float(v))


def write_trace(path, trace: RunTrace, header: dict) -> None:
    lines = [f"# {k}: {v}" for k, v in header.items()]
    lines.append(f"# length: {trace.length}")
    lines.append("eval_index,best_value")
    lines.extend(f"{k},{_fmt(v)}" for k, v in zip(trace.indices, trace.values))
    Path(path).write_text("\n".join(lines) + "\n")


def read_trace(path) -> tuple[RunTrace, dict]:
    header, idx, vals = {}, [], []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].partition(":")
            header[key.strip()] = value.strip()
        elif line and line[0].isdigit():
            k, v = line.split(",")
            idx.append(int(k))
            vals.append(float(v))
    return RunTrace(idx, vals, int(header.pop("length"))), header


def _write_history(root: Path, res: ExperimentResult) -> None:
    H = res.history
    hdir = root / "history"
    hdir.mkdir(parents=True, exist_ok=True)
    files = {}
    for j, pname in enumerate(H.problems):
        for i, sname in enumerate(H.solvers):
            fname = f"{pname}__{sname}.csv"
            files[f"{pname}/{sname}"] = fname
            lines = [f"# problem: {pname}", f"# solver: {sname}", "run,eval_index,best_value"]
            for r in range(H.n_runs):
                tr = res.traces[(i, j, r)]
                lines.extend(f"{r},{k},{_fmt(v)}" for k, v in zip(tr.indices, tr.values))
            (hdir / fname).write_text("\n".join(lines) + "\n")
    index = {
        "budget": H.budget,
        "runs": H.n_runs,
        "solvers": H.solvers,
        "problems": H.problems,
        "dims": H.dims.tolist(),
        "f_min": [float(v) for v in H.f_min],
        "seeds": {f"{H.problems[j]}/{H.solvers[i]}": [int(s) for s in H.seeds[:, j, i]]
                  for j in range(len(H.problems)) for i in range(len(H.solvers))},
        "files": files,
    }
    (hdir / "index.json").write_text(json.dumps(index, indent=1) + "\n")


def load_history(root) -> HistoryMatrix:
    """Rebuild the dense history matrix from a results directory."""
    hdir = Path(root) / "history"
    try:
        index = json.loads((hdir / "index.json").read_text())
    except FileNotFoundError:
        raise FileNotFoundError(f"no history index under {root}") from None
    budget, n_r = index["budget"], index["runs"]
    solvers, problems = index["solvers"], index["problems"]
    data = np.empty((budget, n_r, len(problems), len(solvers)))
    seeds = np.zeros((n_r, len(problems), len(solvers)), dtype=np.uint64)
    for j, pname in enumerate(problems):
        for i, sname in enumerate(solvers):
            points = {r: ([], []) for r in range(n_r)}
            text = (hdir / index["files"][f"{pname}/{sname}"]).read_text()
            for line in text.splitlines():
                if not line or line[0] == "#" or not line[0].isdigit():
                    continue
                r, k, v = line.split(",")
                points[int(r)][0].append(int(k))
                points[int(r)][1].append(float(v))
            for r, (ks, vs) in points.items():
                tr = RunTrace(ks, vs, max(ks) if ks else 0)
                data[:, r, j, i] = tr.dense(budget)
            seeds[:, j, i] = index["seeds"][f"{pname}/{sname}"]
    return HistoryMatrix(data, index["dims"], solvers, problems, seeds,
                         np.array(index["f_min"]))


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Execute ``config`` and persist traces, history and manifest under ``config.out``."""
    if config.out is None:
        raise InvalidConfig("an output directory is required")
    root = Path(config.out)
    try:
        root.mkdir(parents=True, exist_ok=True)
        probe = root / ".write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise OSError(f"output directory {root} is not writable: {exc}") from exc

    res = execute(config)
    problems = {p.name: p for p in config.problem_list()}
    by_key = {(x["solver"], x["problem"], x["run"]): x for x in res.records}
    for (i, j, r), trace in res.traces.items():
        rec = by_key[(config.solvers[i], res.history.problems[j], r)]
        p = problems[rec["problem"]]
        tdir = root / "traces" / rec["solver"] / rec["problem"]
        tdir.mkdir(parents=True, exist_ok=True)
        write_trace(tdir / f"run-{r:03d}.trace", trace, {
            "solver": rec["solver"], "problem": p.name, "dim": p.dim,
            "seed": rec["seed"], "budget": rec["budget"], "f_min": _fmt(p.f_min),
            "status": rec["status"],
        })
    _write_history(root, res)
    (root / "config.json").write_text(json.dumps(config.snapshot(), indent=1) + "\n")
    manifest = {"config": config.snapshot(), "runs": res.records}
    (root / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n")
    return res


# --------------------------------------------------------------------------
# plot-ready output
# --------------------------------------------------------------------------

def _as_history(source) -> HistoryMatrix:
    return source if isinstance(source, HistoryMatrix) else load_history(source)


def emit_lcurves(source, out, problems=None, stride: int = 1) -> list[Path]:
    """Write mean best-so-far minus ``f_min`` per (problem, solver).

    Values are floored at 1e-30 so every column can go on a log axis.
    ``problems`` optionally restricts output to the named problems.
    """
    H = _as_history(source)
    if H.f_min is None:
        raise ValueError("history carries no f_min values")
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    wanted = set(problems) if problems else None
    if wanted and not wanted <= set(H.problems):
        raise KeyError(f"no traces for {sorted(wanted - set(H.problems))}")
    with np.errstate(invalid="ignore"):
        mean = H.data.mean(axis=1)
    ks = np.arange(1, H.budget + 1)
    keep = np.unique(np.r_[np.arange(0, H.budget, max(1, stride)), H.budget - 1])
    written = []
    for j, pname in enumerate(H.problems):
        if wanted and pname not in wanted:
            continue
        for i, sname in enumerate(H.solvers):
            acc = np.maximum(mean[:, j, i] - H.f_min[j], LCURVE_FLOOR)
            path = out / f"{pname}__{sname}.csv"
            lines = ["evaluation,mean_error"]
            lines.extend(f"{ks[m]},{_fmt(acc[m])}" for m in keep)
            path.write_text("\n".join(lines) + "\n")
            written.append(path)
    return written


def _write_profile(path: Path, curve) -> None:
    lines = ["solver,kappa,fraction"]
    lines.extend(f"{s},{_fmt(k)},{_fmt(f)}" for s, k, f in curve.rows())
    path.write_text("\n".join(lines) + "\n")


def emit_profiles(source, taus=(DEFAULT_TAU,), out=".") -> list[Path]:
    """Data profiles (both steps, both budget scalings) and a report per tolerance."""
    H = _as_history(source)
    out = Path(out)
    written = []
    for tau in taus:
        tdir = out / f"tau-{tau:g}"
        tdir.mkdir(parents=True, exist_ok=True)
        rep = vci_compare(H, tau)
        raw = vci_compare(H, tau, raw_scale=True)
        for name, curve in (("step1", rep.step1), ("step2", rep.step2),
                            ("step1_raw", raw.step1), ("step2_raw", raw.step2)):
            _write_profile(tdir / f"{name}.csv", curve)
            written.append(tdir / f"{name}.csv")
        doc = rep.as_dict()
        doc["raw_scale"] = raw.as_dict()
        (tdir / "report.json").write_text(json.dumps(doc, indent=1) + "\n")
        written.append(tdir / "report.json")
    return written
