import io
import os
from dataclasses import replace

import numpy as np
import pytest

from ogdcontrol.errors import ConvergenceError
from ogdcontrol.harness import (EXIT_OK, EXIT_SOLVER, EXIT_VALIDATION, benchmark_scenario,
                                execute, integrator_scenario, load_scenario, prepare,
                                random_scenario, run_scenario, scenario_from_dict,
                                scenario_to_toml, stable_scalar_scenario, sweep, sweep_csv,
                                validate_scenario)
from ogdcontrol.harness import runner
from ogdcontrol.harness.cli import main
from ogdcontrol.harness.scenario import tomllib

HERE = os.path.dirname(__file__)
SCENARIO_FILE = os.path.join(HERE, "..", "scenarios", "three_state.toml")


def check(rep, name):
    return [c for c in rep.checks if c.name.startswith(name)]


def test_benchmark_validation_narrative():
    rep = validate_scenario(benchmark_scenario())
    raw = check(rep, "reachability on raw state set")[0]
    assert not raw.passed and not raw.required
    assert check(rep, "reachability on derived state set")[0].passed
    assert check(rep, "reachability with configured mu=6")[0].passed
    assert rep.passed


def test_validation_order():
    names = [c.name for c in validate_scenario(integrator_scenario()).checks]
    first = {k: next(i for i, n in enumerate(names) if n.startswith(k))
             for k in ("sets", "costs", "setpoints", "system",
                       "step sizes")}
    assert first["costs"] < first["setpoints"] < first["system"] < first["step sizes"]


def test_toy_scenario_passes_everything():
    rep = validate_scenario(integrator_scenario())
    assert all(c.passed for c in rep.checks)


def test_step_size_above_window_fails():
    s = integrator_scenario()
    s = replace(s, controller={**s.controller, "gamma_x": 1.5})
    rep = validate_scenario(s)
    assert not rep.passed
    assert [c.name for c in rep.failures()] == ["step sizes inside admissible window"]


def test_raw_template_none_refuses():
    s = replace(benchmark_scenario(), derive={"template": "none", "mu_max": 4})
    rep = validate_scenario(s)
    assert not rep.passed
    assert [c.name for c in rep.failures()] == ["reachability on raw state set"]


def test_dimension_mismatch_reported():
    s = replace(integrator_scenario(), x0=np.zeros(2))
    rep = validate_scenario(s)
    assert not rep.passed and rep.checks[0].name == "dimensions consistent"


def test_scenario_file_matches_builtin():
    s = load_scenario(SCENARIO_FILE)
    b = benchmark_scenario()
    np.testing.assert_array_equal(s.system.A, b.system.A)
    assert s.controller == b.controller
    assert prepare(s).report.passed


def test_toml_round_trip():
    s = random_scenario(7)
    text = scenario_to_toml(s)
    again = scenario_from_dict(tomllib.loads(text))
    assert scenario_to_toml(again) == text


def test_random_scenarios_are_deterministic_and_valid():
    a, b = random_scenario(3), random_scenario(3)
    assert scenario_to_toml(a) == scenario_to_toml(b)
    assert a.system.n <= 3 and a.horizon <= 100
    assert prepare(a).report.passed


def test_run_scenario_artifacts(tmp_path):
    res = run_scenario(benchmark_scenario(horizon=40), str(tmp_path))
    assert res.status == EXIT_OK, res.error
    for key in ("validation", "trace", "diagnostics", "summary"):
        assert os.path.exists(res.artifacts[key])
    assert not [f for f in os.listdir(tmp_path) if f.startswith(".tmp")]
    summary = open(res.artifacts["summary"]).read()
    assert "bound_satisfied = true" in summary
    assert "constant_C_theta = " in summary
    assert res.audit.passed


def test_run_zero_horizon(tmp_path):
    res = run_scenario(integrator_scenario(horizon=0), str(tmp_path))
    assert res.status == EXIT_OK
    lines = open(res.artifacts["trace"]).read().splitlines()
    assert len(lines) == 2


def test_run_refuses_invalid(tmp_path):
    s = integrator_scenario()
    s = replace(s, controller={**s.controller, "gamma_x": 1.5})
    res = run_scenario(s, str(tmp_path))
    assert res.status == EXIT_VALIDATION
    assert "trace" not in res.artifacts
    assert 'error = "validation failed' in open(res.artifacts["summary"]).read()


def test_solver_failure_exit_code(monkeypatch):
    def boom(*args, **kwargs):
        raise ConvergenceError("iteration cap", {"stationarity": 1.0})
    monkeypatch.setattr(runner, "hindsight_optimum", boom)
    res = execute(integrator_scenario(horizon=5))
    assert res.status == EXIT_SOLVER and "ConvergenceError" in res.error


def test_post_hoc_checker_flags_violations():
    res = execute(integrator_scenario(horizon=10))
    tr = res.trace
    tr.xs[4] = np.array([1.5])
    audit = runner.check_trace(res.setup, tr)
    failed = {c.name for c in audit.failures()}
    assert "states inside state set" in failed


def test_sweep_plateau_on_constant_setpoint():
    rows = sweep(stable_scalar_scenario(), [50, 100, 200])
    regrets = [r["regret"] for r in rows]
    assert max(regrets) - min(regrets) < 1e-3
    assert all(r["bound_satisfied"] for r in rows)


def test_sweep_linear_path_length():
    s = stable_scalar_scenario(horizon=200)
    segs = [{"t_from": t, "theta": [0.3 if t % 2 else -0.3], "eta": [0.15 if t % 2 else -0.15]}
            for t in range(201)]
    s = replace(s, costs={**s.costs, "segments": segs})
    rows = sweep(s, [50, 100, 200])
    assert all(r["status"] == EXIT_OK for r in rows)
    ratio = rows[2]["regret"] / rows[1]["regret"]
    assert 1.7 < ratio < 2.3
    assert rows[2]["state_variation"] / rows[1]["state_variation"] == pytest.approx(2.0, rel=0.02)


def test_sweep_empty_and_parallel():
    assert sweep(integrator_scenario(), []) == []
    assert sweep_csv([]).count("\n") == 1
    s = integrator_scenario()
    assert sweep(s, [10, 20], workers=2) == sweep(s, [10, 20])


def test_cli_verbs(tmp_path):
    out = io.StringIO()
    assert main(["validate", "--scenario", SCENARIO_FILE], out) == EXIT_OK
    assert "[NOTE] reachability on raw state set" in out.getvalue()
    out = io.StringIO()
    assert main(["dump-constants", "--seed", "2"], out) == EXIT_OK
    assert out.getvalue().startswith("mu = ")
    out = io.StringIO()
    assert main(["sweep", "--seed", "2", "--horizons", "10,20", "--out", str(tmp_path)], out) == EXIT_OK
    assert (tmp_path / "sweep.csv").read_text() == out.getvalue()
    d = tmp_path / "run"
    assert main(["run", "--seed", "4", "--horizon", "15", "--out", str(d)], io.StringIO()) == EXIT_OK
    assert (d / "trace.csv").exists() and (d / "scenario.toml").exists()
    again = load_scenario(str(d / "scenario.toml"))
    assert again.horizon == 15


def test_cli_validation_exit(tmp_path):
    bad = tmp_path / "bad.toml"
    text = open(SCENARIO_FILE).read().replace("gamma_x = 0.98", "gamma_x = 1.5")
    bad.write_text(text)
    assert main(["validate", "--scenario", str(bad)], io.StringIO()) == EXIT_VALIDATION
    assert main(["run", "--scenario", str(bad), "--out", str(tmp_path / "o")], io.StringIO()) \
        == EXIT_VALIDATION
    assert main(["validate", "--scenario", str(tmp_path / "missing.toml")], io.StringIO()) \
        == EXIT_VALIDATION


def test_double_integrator_file_runs(tmp_path):
    path = os.path.join(HERE, "..", "scenarios", "double_integrator.toml")
    res = run_scenario(load_scenario(path), str(tmp_path))
    assert res.status == EXIT_OK, res.error
    raw = check(res.report, "reachability on raw state set")[0]
    assert not raw.passed and not raw.required
