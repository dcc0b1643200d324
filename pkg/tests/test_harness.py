import json
import math

import numpy as np
import pytest

from sbso import harness
from sbso.cli import main, parse_cli
from sbso.harness import (ExperimentConfig, InvalidConfig, emit_lcurves, emit_profiles, execute,
                          load_history, read_trace, run_experiment, run_seed, solve, write_trace)
from sbso.problem import RunTrace
from sbso.suite import make_problem

SMALL = [make_problem("sphere", 2), make_problem("booth", 2), make_problem("hartman-3", 3)]


def _small_config(tmp_path=None, **kw):
    base = dict(problems=SMALL, solvers="bso,nms,sbso", runs=2, budget=400, base_seed=5,
                workers=1, out=None if tmp_path is None else str(tmp_path))
    base.update(kw)
    return ExperimentConfig(**base)


# --- configuration ----------------------------------------------------------

def test_config_defaults_and_parsing():
    cfg = ExperimentConfig(solvers="bso, sbso-20")
    assert cfg.solvers == ["bso", "sbso-20"] and cfg.runs == 50 and cfg.budget == 20000
    assert len(cfg.problem_list()) == 68
    per_dim = ExperimentConfig(budget="10000n")
    assert per_dim.budget_for(make_problem("sphere", 5)) == 50000


@pytest.mark.parametrize("kw", [
    dict(solvers="bso,cmaes"), dict(solvers="nms-20"), dict(solvers=""), dict(runs=0),
    dict(budget=50), dict(budget="lots"), dict(suite="nope"), dict(solvers="bso,bso"),
])
def test_config_rejects(kw):
    with pytest.raises((InvalidConfig, KeyError, ValueError)):
        ExperimentConfig(**kw)


def test_workers_env(monkeypatch):
    monkeypatch.setenv(harness.WORKERS_ENV, "3")
    assert ExperimentConfig().resolved_workers() == 3
    assert ExperimentConfig(workers=2).resolved_workers() == 2


def test_run_seed_distinct():
    seeds = {run_seed(0, i, j, r) for i in range(3) for j in range(10) for r in range(10)}
    assert len(seeds) == 300
    assert run_seed(1, 0, 0, 0) == run_seed(1, 0, 0, 0) != run_seed(2, 0, 0, 0)


@pytest.mark.parametrize("solver", ["bso", "nms", "sbso", "sbso-20"])
def test_solve_uses_whole_budget(solver):
    tr = solve(solver, make_problem("levy", 5), 700, 11)
    assert len(tr) == 700
    assert tr == solve(solver, make_problem("levy", 5), 700, 11)


# --- execution --------------------------------------------------------------

def test_execute_shapes_and_seeds():
    res = execute(_small_config())
    H = res.history
    assert H.data.shape == (400, 2, 3, 3)
    assert H.is_monotone()
    assert H.seeds[1, 2, 0] == run_seed(5, 0, 2, 1)
    assert all(r["status"] == "ok" and r["evaluations"] == 400 for r in res.records)


def test_parallel_matches_sequential():
    a = execute(_small_config(workers=1)).history
    b = execute(_small_config(workers=2)).history
    np.testing.assert_array_equal(a.data, b.data)


def test_failed_run_is_isolated(monkeypatch):
    real = harness.solve

    def flaky(solver, problem, budget, seed):
        if solver == "nms" and problem.name == "booth-2":
            raise FloatingPointError("boom")
        return real(solver, problem, budget, seed)

    monkeypatch.setattr(harness, "solve", flaky)
    res = execute(_small_config())
    bad = [r for r in res.records if r["status"] == "failed"]
    assert len(bad) == 2 and all("boom" in r["error"] for r in bad)
    assert np.all(np.isinf(res.history.data[:, :, 1, 1]))
    assert np.all(np.isfinite(res.history.data[:, :, 0, :]))


# --- persistence ------------------------------------------------------------

def test_trace_roundtrip(tmp_path):
    tr = RunTrace.from_values([3.0, 1.0 / 3.0, 0.5, 1e-300, 1e-300])
    write_trace(tmp_path / "t.trace", tr, {"solver": "bso", "seed": 9})
    back, header = read_trace(tmp_path / "t.trace")
    assert back == tr and header == {"solver": "bso", "seed": "9"}
    inf = RunTrace([1], [math.inf], 10)
    write_trace(tmp_path / "f.trace", inf, {})
    assert read_trace(tmp_path / "f.trace")[0] == inf


def test_run_experiment_layout(tmp_path):
    cfg = _small_config(tmp_path / "r")
    res = run_experiment(cfg)
    root = tmp_path / "r"
    assert len(list((root / "traces").rglob("*.trace"))) == 3 * 3 * 2
    assert (root / "traces" / "sbso" / "booth-2" / "run-001.trace").exists()
    manifest = json.loads((root / "manifest.json").read_text())
    assert len(manifest["runs"]) == 18 and manifest["config"]["runs"] == 2
    H = load_history(root)
    np.testing.assert_array_equal(H.data, res.history.data)
    assert H.solvers == ["bso", "nms", "sbso"]
    np.testing.assert_array_equal(H.seeds, res.history.seeds)


def test_rerun_is_byte_identical(tmp_path):
    run_experiment(_small_config(tmp_path / "a"))
    run_experiment(_small_config(tmp_path / "b"))
    files = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*")
                   if p.is_file() and p.name != "manifest.json")
    assert len(files) > 20
    for f in files:
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_unimodal_suite_file_count(tmp_path):
    cfg = ExperimentConfig(suite="hedar-unimodal", runs=2, budget=130, out=str(tmp_path),
                           workers=1)
    run_experiment(cfg)
    assert len(list((tmp_path / "traces").rglob("*.trace"))) == 96


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError):
        run_experiment(_small_config(blocker / "sub"))


# --- derived outputs --------------------------------------------------------

def test_lcurves(tmp_path):
    run_experiment(_small_config(tmp_path / "r"))
    files = emit_lcurves(tmp_path / "r", tmp_path / "lc", stride=50)
    assert len(files) == 9
    rows = (tmp_path / "lc" / "sphere-2__nms.csv").read_text().splitlines()
    assert rows[0] == "evaluation,mean_error"
    evals = [int(r.split(",")[0]) for r in rows[1:]]
    assert evals[0] == 1 and evals[-1] == 400 and evals[1] == 51
    errs = [float(r.split(",")[1]) for r in rows[1:]]
    assert min(errs) >= 1e-30 and all(b <= a for a, b in zip(errs, errs[1:]))
    only = emit_lcurves(tmp_path / "r", tmp_path / "lc2", problems=["booth-2"])
    assert len(only) == 3
    with pytest.raises(KeyError):
        emit_lcurves(tmp_path / "r", tmp_path / "lc3", problems=["nope-2"])


def test_lcurve_floor():
    H = execute(_small_config(solvers="nms")).history
    H.data[:] = 0.0
    import tempfile
    with tempfile.TemporaryDirectory() as d:
        files = emit_lcurves(H, d)
        vals = {float(r.split(",")[1]) for r in files[0].read_text().splitlines()[1:]}
        assert vals == {1e-30}


def test_profiles(tmp_path):
    run_experiment(_small_config(tmp_path / "r"))
    files = emit_profiles(tmp_path / "r", [1e-7, 1e-3], tmp_path / "pf")
    assert len(files) == 10
    for tau in ("tau-1e-07", "tau-0.001"):
        tdir = tmp_path / "pf" / tau
        rep = json.loads((tdir / "report.json").read_text())
        assert rep["winner"] in ("bso", "nms", "sbso")
        assert rep["verdict"] in ("significant", "average-only")
        rows = (tdir / "step1.csv").read_text().splitlines()
        assert rows[0] == "solver,kappa,fraction" and len(rows) == 1 + 3 * 200


# --- command line -----------------------------------------------------------

def test_parse_cli_examples():
    args, cfg = parse_cli(["run", "--suite", "hedar-unimodal", "--solvers", "bso,sbso",
                           "--runs", "3", "--budget", "10000n", "--out", "x"])
    assert cfg.solvers == ["bso", "sbso"] and cfg.runs == 3 and cfg.budget == "10000n"
    args, cfg = parse_cli(["sweep", "--lambdas", "20,40", "--out", "y"])
    assert cfg.solvers == ["sbso-20", "sbso-40"]
    args, cfg = parse_cli(["profiles", "--results", "r", "--out", "o", "--tau", "1e-3,1e-7"])
    assert cfg is None and args.tau == [1e-3, 1e-7]


@pytest.mark.parametrize("argv", [
    ["run", "--runs", "0", "--out", "x"],
    ["run", "--solvers", "cmaes", "--out", "x"],
    ["run", "--suite", "cec", "--out", "x"],
    ["run", "--budget", "abc", "--out", "x"],
    ["run"],
    ["frobnicate"],
])
def test_cli_usage_errors(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_cli_list(capsys):
    assert main(["list", "--suite", "hedar-unimodal"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert len(out) == 17 and out[0].startswith("family,")


def test_cli_end_to_end(tmp_path, capsys):
    r = str(tmp_path / "r")
    assert main(["run", "--suite", "hedar-unimodal", "--solvers", "nms", "--runs", "2",
                 "--budget", "150", "--out", r, "--workers", "1"]) == 0
    assert main(["lcurves", "--results", r, "--out", str(tmp_path / "lc")]) == 0
    assert len(list((tmp_path / "lc").glob("*.csv"))) == 16
    assert main(["lcurves", "--results", r, "--out", str(tmp_path / "lc"),
                 "--problems", "nope-3"]) == 1
    assert main(["profiles", "--results", str(tmp_path / "missing"),
                 "--out", str(tmp_path / "pf")]) == 1
