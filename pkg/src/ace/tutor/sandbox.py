"""Syntax gate and isolated execution for learner/reference code.

The gate is parse-only (AST compilation; zero statements execute) and runs
before anything reaches the sandbox. The sandbox executes the program as a
separate interpreter process in a fresh temporary directory with: a
wall-clock timeout, an address-space cap, a file-size cap, stdin closed
unless data is supplied, and a guard module that disables socket creation
and blocks writes outside the sandbox directory. Output streams are capped
at 64 KiB each.
"""

from __future__ import annotations

import ast
import os
import shutil
import signal
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass
from enum import Enum

from ace.errors import SandboxSetupError

OUTPUT_CAP = 64 * 1024
TRUNCATION_MARK = "\n...[truncated]"

DEFAULT_TIMEOUT = 5.0
DEFAULT_MEMORY_MIB = 256
FSIZE_CAP = 8 * 1024 * 1024


class ExitStatus(str, Enum):
    OK = "ok"
    NONZERO_EXIT = "nonzero_exit"
    TIMEOUT = "timeout"
    KILLED = "killed"


@dataclass(frozen=True)
class SandboxResult:
    exit_status: ExitStatus
    stdout: str
    stderr: str
    wall_time: float

    @property
    def ok(self) -> bool:
        return self.exit_status == ExitStatus.OK


@dataclass(frozen=True)
class GateResult:
    ok: bool
    line: int | None = None
    message: str | None = None


def syntax_gate(code: str) -> GateResult:
    """Parse-only validation of a full program; nothing is executed."""
    try:
        compile(code, "main.py", "exec", flags=ast.PyCF_ONLY_AST)
    except SyntaxError as exc:  # IndentationError and TabError included
        return GateResult(ok=False, line=exc.lineno, message=exc.msg)
    except ValueError as exc:  # e.g. null bytes in source
        return GateResult(ok=False, line=None, message=str(exc))
    return GateResult(ok=True)


# Installed as the child's entry point: caps done via preexec, guards here.
_GUARD_RUNNER = r'''
import builtins, os, runpy, socket, sys

SANDBOX = os.path.realpath(os.getcwd())
_ALLOWED = (os.devnull,)


def _deny_socket(*args, **kwargs):
    raise PermissionError("network access is disabled in the sandbox")


socket.socket = _deny_socket
socket.socketpair = _deny_socket
socket.create_connection = _deny_socket
socket.create_server = _deny_socket

_real_open = builtins.open
_real_os_open = os.open
_WRITE_FLAGS = os.O_WRONLY | os.O_RDWR | os.O_APPEND | os.O_CREAT | os.O_TRUNC


def _check_write(path):
    real = os.path.realpath(os.fspath(path))
    if real in _ALLOWED:
        return
    if real != SANDBOX and not real.startswith(SANDBOX + os.sep):
        raise PermissionError("write outside the sandbox directory blocked: %r" % (path,))


def _guard_open(file, mode="r", *args, **kwargs):
    if isinstance(file, (str, bytes, os.PathLike)) and any(c in "wax+" for c in str(mode)):
        _check_write(file)
    return _real_open(file, mode, *args, **kwargs)


def _guard_os_open(path, flags, *args, **kwargs):
    if flags & _WRITE_FLAGS:
        _check_write(path)
    return _real_os_open(path, flags, *args, **kwargs)


builtins.open = _guard_open
os.open = _guard_os_open

sys.argv = ["main.py"]
runpy.run_path(os.path.join(SANDBOX, "main.py"), run_name="__main__")
'''


def _cap(data: bytes) -> str:
    text = data.decode("utf-8", errors="replace")
    if len(text) > OUTPUT_CAP:
        return text[:OUTPUT_CAP] + TRUNCATION_MARK
    return text


def sandbox_run(
    code: str,
    stdin_data: str | None = None,
    timeout: float = DEFAULT_TIMEOUT,
    memory_mib: int = DEFAULT_MEMORY_MIB,
    semaphore=None,
) -> SandboxResult:
    """Run the program in an isolated child process and report the outcome.

    Timeout and kill are results, not exceptions; only failure to stand up
    the sandbox itself raises.
    """
    import resource

    memory_bytes = memory_mib * 1024 * 1024
    cpu_seconds = max(1, int(timeout) + 1)

    def _limits():
        resource.setrlimit(resource.RLIMIT_AS, (memory_bytes, memory_bytes))
        resource.setrlimit(resource.RLIMIT_CPU, (cpu_seconds, cpu_seconds + 1))
        resource.setrlimit(resource.RLIMIT_FSIZE, (FSIZE_CAP, FSIZE_CAP))

    if semaphore is not None:
        semaphore.acquire()
    try:
        workdir = tempfile.mkdtemp(prefix="ace-sandbox-")
    except OSError as exc:
        if semaphore is not None:
            semaphore.release()
        raise SandboxSetupError(f"could not create sandbox directory: {exc}") from exc
    try:
        try:
            with open(os.path.join(workdir, "main.py"), "w", encoding="utf-8") as fh:
                fh.write(code)
            runner = os.path.join(workdir, "_runner.py")
            with open(runner, "w", encoding="utf-8") as fh:
                fh.write(_GUARD_RUNNER)
        except OSError as exc:
            raise SandboxSetupError(f"could not stage sandbox files: {exc}") from exc

        env = {
            "PATH": "/usr/bin:/bin",
            "HOME": workdir,
            "TMPDIR": workdir,
            "LANG": "C.UTF-8",
        }
        started = time.monotonic()
        try:
            proc = subprocess.Popen(
                [sys.executable, "-I", "-B", runner],
                cwd=workdir,
                env=env,
                stdin=subprocess.PIPE if stdin_data is not None else subprocess.DEVNULL,
                stdout=subprocess.PIPE,
                stderr=subprocess.PIPE,
                preexec_fn=_limits,
                start_new_session=True,
            )
        except OSError as exc:
            raise SandboxSetupError(f"could not spawn sandbox process: {exc}") from exc

        timed_out = False
        stdin_bytes = stdin_data.encode("utf-8") if stdin_data is not None else None
        try:
            out, err = proc.communicate(input=stdin_bytes, timeout=timeout)
        except subprocess.TimeoutExpired:
            timed_out = True
            try:
                os.killpg(proc.pid, signal.SIGKILL)
            except (ProcessLookupError, PermissionError):
                proc.kill()
            out, err = proc.communicate()
        wall_time = time.monotonic() - started

        if timed_out:
            status = ExitStatus.TIMEOUT
        elif proc.returncode == 0:
            status = ExitStatus.OK
        elif proc.returncode < 0:
            status = ExitStatus.KILLED
        else:
            status = ExitStatus.NONZERO_EXIT
        return SandboxResult(
            exit_status=status,
            stdout=_cap(out),
            stderr=_cap(err),
            wall_time=wall_time,
        )
    finally:
        shutil.rmtree(workdir, ignore_errors=True)
        if semaphore is not None:
            semaphore.release()
