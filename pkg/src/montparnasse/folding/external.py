"""Adapter for an external folding tool speaking a line protocol.

The tool is a long-lived child process. One request per line on stdin:

    FOLD <sequence> <target-dotbracket>

One reply per line on stdout:

    OK <mfe-structure> <mfe-energy> <ensemble-free-energy> <target-probability> <ensemble-defect>
    ERR <message>

Anything else, a dead process or a blown deadline raises EngineFailure
with whatever the tool wrote to stderr attached.
"""

from __future__ import annotations

import os
import select
import shlex
import subprocess
import time

from ..structure import StructureError, parse_dotbracket
from .base import EngineFailure, FoldResult


class ExternalFolder:
    """One running external folder process plus its line buffering."""

    def __init__(self, command: str | list[str], timeout: float = 30.0):
        args = shlex.split(command) if isinstance(command, str) else list(command)
        self.timeout = timeout
        self._args = args
        self._buffer = bytearray()
        try:
            self._proc = subprocess.Popen(
                args,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.PIPE,
                bufsize=0,
            )
        except OSError as exc:
            raise EngineFailure(f"could not start external folder {args!r}: {exc}") from exc

    def fold(self, sequence: str, target_dotbracket: str) -> FoldResult:
        request = f"FOLD {sequence} {target_dotbracket}\n".encode("ascii")
        proc = self._proc
        if proc.poll() is not None:
            raise self._death("external folder exited before request")
        try:
            proc.stdin.write(request)
            proc.stdin.flush()
        except (BrokenPipeError, OSError):
            raise self._death("external folder closed stdin pipe") from None
        line = self._read_line(time.monotonic() + self.timeout)
        return self._parse_reply(line, sequence)

    def close(self) -> None:
        proc = self._proc
        if proc.poll() is None:
            try:
                proc.stdin.close()
            except OSError:
                pass
            try:
                proc.wait(timeout=2.0)
            except subprocess.TimeoutExpired:
                proc.kill()
                proc.wait()
        for stream in (proc.stdout, proc.stderr):
            if stream:
                stream.close()

    def __enter__(self) -> "ExternalFolder":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()

    def _read_line(self, deadline: float) -> str:
        fd = self._proc.stdout.fileno()
        while b"\n" not in self._buffer:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                self._proc.kill()
                raise self._death(f"external folder timed out after {self.timeout}s")
            ready, _, _ = select.select([fd], [], [], remaining)
            if not ready:
                continue
            chunk = os.read(fd, 65536)
            if not chunk:
                raise self._death("external folder closed stdout")
            self._buffer.extend(chunk)
        line, _, rest = bytes(self._buffer).partition(b"\n")
        self._buffer = bytearray(rest)
        return line.decode("ascii", errors="replace").strip()

    def _parse_reply(self, line: str, sequence: str) -> FoldResult:
        fields = line.split()
        if not fields:
            raise self._death("external folder sent an empty reply line")
        if fields[0] == "ERR":
            raise EngineFailure(f"external folder error: {line[4:].strip()}", self._drain_stderr())
        if fields[0] != "OK" or len(fields) != 6:
            raise self._death(f"malformed reply from external folder: {line!r}")
        structure = fields[1]
        try:
            parse_dotbracket(structure)
        except StructureError as exc:
            raise self._death(f"external folder sent a bad structure: {exc}") from exc
        if len(structure) != len(sequence):
            raise self._death(
                f"external folder structure length {len(structure)} != sequence length {len(sequence)}"
            )
        try:
            energy, free_energy, probability, defect = (float(f) for f in fields[2:])
        except ValueError:
            raise self._death(f"non-numeric fields in reply: {line!r}") from None
        if not 0.0 <= probability <= 1.0:
            raise self._death(f"target probability {probability} outside [0, 1]")
        if not 0.0 <= defect <= len(sequence):
            raise self._death(f"ensemble defect {defect} outside [0, {len(sequence)}]")
        return FoldResult(
            mfe_structure=structure,
            mfe_energy=energy,
            ensemble_free_energy=free_energy,
            target_probability=probability,
            ensemble_defect=defect,
            pair_probabilities=None,
        )

    def _death(self, message: str) -> EngineFailure:
        return EngineFailure(message, self._drain_stderr())

    def _drain_stderr(self) -> str | None:
        stream = self._proc.stderr
        if stream is None:
            return None
        try:
            os.set_blocking(stream.fileno(), False)
            data = stream.read()
        except OSError:
            return None
        return data.decode("utf-8", errors="replace") if data else None
