"""Subprocess driver for an external ASP-Core-2 solver.

Talks the classic clingo text protocol: programs go in as files, models and
``Optimization:`` lines are parsed incrementally from stdout, so a solve can
be cancelled at any time and still hand back the best intermediate model.
"""

from __future__ import annotations

import os
import shlex
import shutil
import subprocess
import tempfile
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

SAT = "sat"
OPTIMUM = "optimum"
UNSAT = "unsat"
TIMEOUT = "timeout"
CANCELLED = "cancelled"


class SolverError(Exception):
    pass


class SolverNotFound(SolverError):
    pass


@dataclass
class SolveRequest:
    program: str
    extra_args: list[str] = field(default_factory=list)
    timeout: float | None = None
    models: int = 0              # 0 = enumerate until optimum proven
    label: str = "program"

    def __post_init__(self):
        if self.timeout is not None and self.timeout <= 0:
            raise ValueError("timeout must be positive")


@dataclass
class SolveResult:
    status: str
    atoms: list[str] | None = None
    costs: tuple[int, ...] | None = None
    wall_time: float = 0.0
    raw_status_line: str | None = None

    @property
    def cost(self) -> int | None:
        """Top-priority optimization value (action costs live at level 0)."""
        return self.costs[0] if self.costs else None

    @property
    def has_model(self) -> bool:
        return self.atoms is not None


def default_solver_command() -> list[str]:
    """Locate a solver: $ASP_SOLVER, a clingo on PATH, or the bundled wasm wrapper."""
    env = os.environ.get("ASP_SOLVER")
    if env:
        return shlex.split(env)
    clingo = shutil.which("clingo")
    if clingo:
        return [clingo]
    node = shutil.which("node")
    if node:
        here = Path(__file__).resolve()
        for root in [Path.cwd(), *here.parents]:
            wrapper = root / "solver" / "clingo_wasm_cli.js"
            if wrapper.exists():
                return [node, str(wrapper)]
    raise SolverNotFound(
        "no ASP solver found: set ASP_SOLVER, install clingo, or run "
        "'npm install' in the repository's solver/ directory")


@dataclass
class SolverConfig:
    command: list[str] = field(default_factory=default_solver_command)
    work_dir: str | None = None
    keep_files: bool = False


class SolveHandle:
    """One in-flight solver subprocess; cancellable from any thread."""

    def __init__(self, request: SolveRequest, config: SolverConfig | None = None):
        self.request = request
        self.config = config or SolverConfig()
        self._lock = threading.Lock()
        self._cancelled = False
        self._atoms: list[str] | None = None
        self._costs: tuple[int, ...] | None = None
        self._cost_history: list[tuple[int, ...]] = []
        self._status_line: str | None = None
        self._stderr = ""
        self._start = time.monotonic()

        work_dir = self.config.work_dir or tempfile.mkdtemp(prefix="aspcop-")
        os.makedirs(work_dir, exist_ok=True)
        self._file = os.path.join(work_dir, "%s.lp" % request.label)
        with open(self._file, "w") as fh:
            fh.write(request.program)

        cmd = [arg.replace("{file}", self._file) for arg in self.config.command]
        if not any("{file}" in arg for arg in self.config.command):
            cmd.append(self._file)
        cmd.append(str(request.models))
        cmd += request.extra_args
        self._cmd = cmd
        try:
            self._proc = subprocess.Popen(
                cmd, stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True)
        except OSError as exc:
            raise SolverError("cannot launch solver %r: %s" % (cmd[0], exc))
        self._reader = threading.Thread(target=self._read_stdout, daemon=True)
        self._reader.start()
        self._stderr_lines: list[str] = []
        self._err_reader = threading.Thread(target=self._read_stderr, daemon=True)
        self._err_reader.start()

    def _read_stdout(self):
        expect_atoms = False
        try:
            for line in self._proc.stdout:
                line = line.rstrip("\n")
                if expect_atoms:
                    with self._lock:
                        self._atoms = line.split() if line else []
                    expect_atoms = False
                elif line.startswith("Answer:"):
                    expect_atoms = True
                elif line.startswith("Optimization:"):
                    values = tuple(int(x) for x in line.split()[1:])
                    with self._lock:
                        self._costs = values
                        self._cost_history.append(values)
                elif line.strip() in ("SATISFIABLE", "UNSATISFIABLE", "OPTIMUM FOUND", "UNKNOWN"):
                    with self._lock:
                        self._status_line = line.strip()
        except ValueError:
            pass  # stream closed during kill

    def _read_stderr(self):
        try:
            for line in self._proc.stderr:
                self._stderr_lines.append(line)
        except ValueError:
            pass

    def cancel(self):
        """Terminate the subprocess; idempotent."""
        with self._lock:
            self._cancelled = True
        self._kill()

    def _kill(self):
        try:
            self._proc.kill()
        except OSError:
            pass

    def result(self) -> SolveResult:
        """Wait for the solve (honoring the request timeout) and classify the outcome."""
        timed_out = False
        try:
            self._proc.wait(timeout=self.request.timeout)
        except subprocess.TimeoutExpired:
            timed_out = True
            self._kill()
            self._proc.wait()
        self._reader.join(timeout=10)
        self._err_reader.join(timeout=10)
        self._stderr = "".join(self._stderr_lines)
        wall = time.monotonic() - self._start
        if not self.config.keep_files:
            try:
                os.unlink(self._file)
            except OSError:
                pass
        with self._lock:
            atoms, costs, status_line = self._atoms, self._costs, self._status_line
            cancelled = self._cancelled
        if cancelled:
            return SolveResult(CANCELLED, atoms, costs, wall, status_line)
        if timed_out:
            return SolveResult(TIMEOUT, atoms, costs, wall, status_line)
        if status_line == "UNSATISFIABLE":
            return SolveResult(UNSAT, None, None, wall, status_line)
        if status_line == "OPTIMUM FOUND":
            return SolveResult(OPTIMUM, atoms, costs, wall, status_line)
        if status_line == "SATISFIABLE":
            return SolveResult(SAT, atoms, costs, wall, status_line)
        raise SolverError(
            "solver %r exited with code %s and no verdict; stderr:\n%s"
            % (self._cmd[0], self._proc.returncode, self._stderr.strip()))

    @property
    def cost_history(self) -> list[tuple[int, ...]]:
        with self._lock:
            return list(self._cost_history)


def solve(request: SolveRequest, config: SolverConfig | None = None) -> SolveResult:
    return SolveHandle(request, config).result()
