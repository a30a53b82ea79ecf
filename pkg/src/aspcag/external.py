"""Adapter for off-the-shelf ASP systems driven over a text pipe."""
from __future__ import annotations

import shlex
import subprocess
import time
from typing import Optional, Sequence, Union

from .errors import AspError, ExternalEngineError, ModelParseError
from .parser import parse_atoms

SAT_CODES = (10, 30)
UNSAT_CODE = 20


def _model_line(lines: list[str]) -> Optional[str]:
    for i, line in enumerate(lines):
        if line.startswith("Answer:"):
            return lines[i + 1] if i + 1 < len(lines) else ""
    for line in lines:
        if line.strip():
            return line
    return None


def run_external_engine(program_text: str, cmd: Union[str, Sequence[str]],
                        timeout: Optional[float] = None) -> tuple[str, Optional[frozenset], float]:
    """Run ``cmd`` with the program on stdin.

    Returns ``(status, model, elapsed)`` with status 'sat', 'unsat' or
    'timeout'.  Exit codes 10/30 mean satisfiable and 20 unsatisfiable, as
    do the words SATISFIABLE/UNSATISFIABLE on stdout.
    """
    argv = shlex.split(cmd) if isinstance(cmd, str) else list(cmd)
    start = time.perf_counter()
    try:
        proc = subprocess.run(argv, input=program_text, capture_output=True, text=True,
                              timeout=timeout)
    except subprocess.TimeoutExpired:
        return "timeout", None, time.perf_counter() - start
    except OSError as exc:
        raise ExternalEngineError(f"cannot start {argv[0]!r}: {exc}") from exc
    elapsed = time.perf_counter() - start
    lines = proc.stdout.splitlines()
    words = {line.strip() for line in lines}
    if proc.returncode == UNSAT_CODE or "UNSATISFIABLE" in words:
        return "unsat", None, elapsed
    if proc.returncode not in SAT_CODES and proc.returncode != 0:
        raise ExternalEngineError(f"{argv[0]} exited with code {proc.returncode}",
                                  proc.returncode, proc.stderr[-500:])
    line = _model_line([l for l in lines if l.strip() not in ("SATISFIABLE",)])
    if line is None:
        if proc.returncode in SAT_CODES:
            return "sat", frozenset(), elapsed
        raise ExternalEngineError(f"{argv[0]} produced no model", proc.returncode, proc.stderr[-500:])
    try:
        model = frozenset(parse_atoms(line))
    except AspError as exc:
        raise ModelParseError(line) from exc
    return "sat", model, elapsed
