"""Isolated execution of assembled programs with outcome classification.

Each program runs in a fresh interpreter process (own process group, own
temporary working directory, address-space cap, network calls disabled)
under a small driver that compiles and execs the program, then reports the
terminal exception type on a machine-readable sentinel line. The sentinel
carries a per-run nonce so program output cannot spoof it.

Classification: compile failure -> SyntaxError (never executed); clean exit
-> Correct; unhandled AssertionError -> TestFailure; any other unhandled
exception -> RuntimeError; wall-clock expiry -> Timeout (process tree
killed). Sandbox infrastructure faults raise SandboxError and are never
recorded as program outcomes.
"""

from __future__ import annotations

import json
import os
import secrets
import shutil
import signal
import subprocess
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

DEFAULT_WALL_TIMEOUT = 10.0
DEFAULT_MEMORY_CAP = 512 * 1024 * 1024
STDERR_TAIL_LIMIT = 2048


class Outcome(Enum):
    SYNTAX_ERROR = "SyntaxError"
    RUNTIME_ERROR = "RuntimeError"
    TEST_FAILURE = "TestFailure"
    TIMEOUT = "Timeout"
    CORRECT = "Correct"


@dataclass(frozen=True)
class ExecLimits:
    wall_timeout: float = DEFAULT_WALL_TIMEOUT
    memory_cap: int = DEFAULT_MEMORY_CAP
    interpreter: str = sys.executable

    def __post_init__(self):
        if self.wall_timeout <= 0:
            raise ValueError("wall_timeout must be positive")


@dataclass(frozen=True)
class ExecutionResult:
    task_id: str
    sample_index: int
    temperature: float
    outcome: Outcome
    exception_name: str | None
    duration: float
    stderr_tail: str = ""

    def as_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "sample_index": self.sample_index,
            "temperature": self.temperature,
            "outcome": self.outcome.value,
            "exception": self.exception_name,
            "duration_s": round(self.duration, 4),
        }


@dataclass(frozen=True)
class SandboxJob:
    task_id: str
    sample_index: int
    temperature: float
    source: str


@dataclass(frozen=True)
class HarnessFailure:
    task_id: str
    sample_index: int
    temperature: float
    message: str


class SandboxError(Exception):
    """Sandbox infrastructure fault (spawn/tempdir), not a program outcome."""


def check_syntax(source: str) -> str | None:
    """Compile-phase check only; no program statement is executed.

    Returns None when the source compiles, else the rejecting exception's
    class name (SyntaxError subclasses, ValueError for NUL bytes, and the
    pathological compile-time RecursionError)."""
    try:
        compile(source, "<candidate>", "exec")
    except (SyntaxError, ValueError, RecursionError) as exc:
        return type(exc).__name__
    return None


# The driver is static; program path, sentinel nonce, and memory cap arrive
# via argv so no source templating is needed.
_DRIVER_SOURCE = """\
import json, sys, traceback

def main():
    prog, nonce, mem_cap = sys.argv[1], sys.argv[2], int(sys.argv[3])
    if mem_cap > 0:
        try:
            import resource
            resource.setrlimit(resource.RLIMIT_AS, (mem_cap, mem_cap))
        except (ImportError, ValueError, OSError):
            pass
    import socket
    def _deny(*args, **kwargs):
        raise OSError("network access is disabled in the sandbox")
    socket.socket = _deny
    socket.create_connection = _deny
    socket.socketpair = _deny

    with open(prog, encoding="utf-8") as fh:
        source = fh.read()

    def report(phase, exception):
        sys.stdout.write("\\n" + nonce + json.dumps(
            {"phase": phase, "exception": exception}) + "\\n")
        sys.stdout.flush()

    try:
        code = compile(source, "prog.py", "exec")
    except BaseException as exc:
        report("compile", type(exc).__name__)
        return
    namespace = {"__name__": "__main__"}
    try:
        exec(code, namespace)
    except SystemExit as exc:
        if exc.code in (0, None):
            report("run", None)
        else:
            report("run", "SystemExit")
    except BaseException as exc:
        traceback.print_exc()
        report("run", type(exc).__name__)
    else:
        report("run", None)

main()
"""


def _classify_sentinel(payload: dict) -> tuple[Outcome, str | None]:
    exception = payload.get("exception")
    if payload.get("phase") == "compile":
        return Outcome.SYNTAX_ERROR, exception
    if exception is None:
        return Outcome.CORRECT, None
    if exception == "AssertionError":
        return Outcome.TEST_FAILURE, exception
    return Outcome.RUNTIME_ERROR, exception


def execute(
    source: str,
    limits: ExecLimits | None = None,
    task_id: str = "",
    sample_index: int = 0,
    temperature: float = 0.0,
) -> ExecutionResult:
    """Run one program under limits in a throwaway directory."""
    if limits is None:
        limits = ExecLimits()
    nonce = "@@sandbox-" + secrets.token_hex(16) + "@@"
    try:
        workdir = tempfile.mkdtemp(prefix="sbx-")
    except OSError as exc:
        raise SandboxError(f"cannot create working directory: {exc}") from exc
    try:
        prog_path = os.path.join(workdir, "prog.py")
        driver_path = os.path.join(workdir, "driver.py")
        with open(prog_path, "w", encoding="utf-8") as fh:
            fh.write(source)
        with open(driver_path, "w", encoding="utf-8") as fh:
            fh.write(_DRIVER_SOURCE)

        cmd = [
            limits.interpreter,
            "-I",
            "-B",
            driver_path,
            prog_path,
            nonce,
            str(limits.memory_cap),
        ]
        env = {
            "PATH": os.environ.get("PATH", ""),
            "HOME": workdir,
            "TMPDIR": workdir,
            "LC_ALL": "C.UTF-8",
        }
        start = time.monotonic()
        try:
            proc = subprocess.Popen(
                cmd,
                stdout=subprocess.PIPE,
                stderr=subprocess.PIPE,
                cwd=workdir,
                env=env,
                start_new_session=True,
                text=True,
                errors="replace",
            )
        except OSError as exc:
            raise SandboxError(f"cannot spawn sandbox interpreter: {exc}") from exc
        try:
            stdout, stderr = proc.communicate(timeout=limits.wall_timeout)
        except subprocess.TimeoutExpired:
            try:
                os.killpg(proc.pid, signal.SIGKILL)
            except (ProcessLookupError, PermissionError):
                proc.kill()
            proc.wait()
            duration = time.monotonic() - start
            return ExecutionResult(
                task_id, sample_index, temperature, Outcome.TIMEOUT, None, duration
            )
        duration = time.monotonic() - start

        payload = None
        for line in reversed(stdout.splitlines()):
            if line.startswith(nonce):
                try:
                    payload = json.loads(line[len(nonce):])
                except json.JSONDecodeError:
                    payload = None
                break
        tail = stderr[-STDERR_TAIL_LIMIT:]
        if payload is not None:
            outcome, exc_name = _classify_sentinel(payload)
            return ExecutionResult(
                task_id, sample_index, temperature, outcome, exc_name, duration, tail
            )
        # No sentinel: the interpreter died hard (OOM kill, segfault) or the
        # program bypassed the driver (os._exit). Program behavior, not ours.
        exc_name = f"HardExit({proc.returncode})"
        return ExecutionResult(
            task_id,
            sample_index,
            temperature,
            Outcome.RUNTIME_ERROR,
            exc_name,
            duration,
            tail,
        )
    finally:
        shutil.rmtree(workdir, ignore_errors=True)


def run_batch(
    jobs: Sequence[SandboxJob],
    limits: ExecLimits | None = None,
    workers: int = 1,
    harness_failures: list[HarnessFailure] | None = None,
) -> list[ExecutionResult]:
    """Execute all jobs with at most ``workers`` concurrent sandboxes.

    Output order is canonical (task_id, temperature, sample_index) regardless
    of completion order. Harness faults go to ``harness_failures`` and the
    batch continues; results + failures always account for every job.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if limits is None:
        limits = ExecLimits()
    if harness_failures is None:
        harness_failures = []

    def run_one(job: SandboxJob) -> ExecutionResult | HarnessFailure:
        syntax_fail = check_syntax(job.source)
        if syntax_fail is not None:
            return ExecutionResult(
                job.task_id,
                job.sample_index,
                job.temperature,
                Outcome.SYNTAX_ERROR,
                syntax_fail,
                0.0,
            )
        try:
            return execute(
                job.source,
                limits,
                task_id=job.task_id,
                sample_index=job.sample_index,
                temperature=job.temperature,
            )
        except SandboxError as exc:
            return HarnessFailure(
                job.task_id, job.sample_index, job.temperature, str(exc)
            )

    results: list[ExecutionResult] = []

    def consume(outcomes) -> None:
        for item in outcomes:
            if isinstance(item, HarnessFailure):
                harness_failures.append(item)
            else:
                results.append(item)

    if workers == 1:
        consume(map(run_one, jobs))
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            consume(pool.map(run_one, jobs))

    results.sort(key=lambda r: (r.task_id, r.temperature, r.sample_index))
    return results


def write_results(path: str, results: Iterable[ExecutionResult]) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for result in results:
            fh.write(json.dumps(result.as_dict()) + "\n")
            count += 1
    return count


def load_results(path: str) -> list[ExecutionResult]:
    results: list[ExecutionResult] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            try:
                results.append(
                    ExecutionResult(
                        task_id=str(obj["task_id"]),
                        sample_index=int(obj["sample_index"]),
                        temperature=float(obj["temperature"]),
                        outcome=Outcome(obj["outcome"]),
                        exception_name=obj.get("exception"),
                        duration=float(obj.get("duration_s", 0.0)),
                    )
                )
            except (KeyError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad result line: {exc}") from None
    return results
