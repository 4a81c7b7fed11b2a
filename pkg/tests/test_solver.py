import sys
import time

import pytest

from aspcop import solver
from aspcop.solver import (CANCELLED, OPTIMUM, SAT, TIMEOUT, UNSAT,
                           SolveHandle, SolveRequest, SolverConfig,
                           SolverError, SolverNotFound, solve)

SLOW_STUB = """\
import sys, time
print("Answer: 1"); print("a b"); sys.stdout.flush()
print("Optimization: 10"); sys.stdout.flush()
time.sleep(0.4)
print("Answer: 2"); print("a"); sys.stdout.flush()
print("Optimization: 5"); sys.stdout.flush()
time.sleep(30)
print("OPTIMUM FOUND")
"""


def stub_config(tmp_path, script):
    path = tmp_path / "stub_solver.py"
    path.write_text(script)
    return SolverConfig(command=[sys.executable, str(path)])


def test_satisfiable(solver_config):
    result = solve(SolveRequest("a. b :- a."), solver_config)
    assert result.status == SAT
    assert set(result.atoms) == {"a", "b"}
    assert result.cost is None


def test_optimum(solver_config):
    program = "{a; b}. :- not a, not b. :~ a. [2] :~ b. [3]"
    result = solve(SolveRequest(program), solver_config)
    assert result.status == OPTIMUM
    assert result.costs == (2,)
    assert result.atoms == ["a"]


def test_unsatisfiable(solver_config):
    result = solve(SolveRequest("a. :- a."), solver_config)
    assert result.status == UNSAT
    assert not result.has_model


def test_cancel_keeps_best_model(tmp_path):
    handle = SolveHandle(SolveRequest("ignored."), stub_config(tmp_path, SLOW_STUB))
    time.sleep(1.0)
    handle.cancel()
    handle.cancel()  # idempotent
    result = handle.result()
    assert result.status == CANCELLED
    assert result.atoms == ["a"]
    assert result.costs == (5,)
    assert handle.cost_history == [(10,), (5,)]


def test_timeout_keeps_best_model(tmp_path):
    result = solve(SolveRequest("ignored.", timeout=1.0),
                   stub_config(tmp_path, SLOW_STUB))
    assert result.status == TIMEOUT
    assert result.atoms == ["a"]
    assert result.cost == 5


def test_multi_level_costs(tmp_path):
    script = """\
print("Answer: 1"); print("x")
print("Optimization: 29 1")
print("OPTIMUM FOUND")
"""
    result = solve(SolveRequest("ignored."), stub_config(tmp_path, script))
    assert result.status == OPTIMUM
    assert result.costs == (29, 1)
    assert result.cost == 29


def test_empty_model_line(tmp_path):
    script = """\
print("Answer: 1"); print("")
print("SATISFIABLE")
"""
    result = solve(SolveRequest("ignored."), stub_config(tmp_path, script))
    assert result.status == SAT
    assert result.atoms == []


def test_no_verdict_raises(tmp_path):
    script = "print('gibberish')"
    with pytest.raises(SolverError):
        solve(SolveRequest("ignored."), stub_config(tmp_path, script))


def test_unlaunchable_command(tmp_path):
    config = SolverConfig(command=[str(tmp_path / "does-not-exist")])
    with pytest.raises(SolverError):
        SolveHandle(SolveRequest("a."), config)


def test_invalid_timeout():
    with pytest.raises(ValueError):
        SolveRequest("a.", timeout=0)


def test_default_solver_not_found(monkeypatch):
    monkeypatch.delenv("ASP_SOLVER", raising=False)
    monkeypatch.setattr(solver.shutil, "which", lambda name: None)
    with pytest.raises(SolverNotFound):
        solver.default_solver_command()


def test_default_solver_env_override(monkeypatch):
    monkeypatch.setenv("ASP_SOLVER", "my-solver --flag")
    assert solver.default_solver_command() == ["my-solver", "--flag"]
