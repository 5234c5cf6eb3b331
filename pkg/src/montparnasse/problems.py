"""Problem files: tab-separated target structures with ids and names."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .structure import StructureError, TargetStructure, parse_dotbracket

HEADER = ("id", "name", "structure")


class ParseError(ValueError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class InvalidStructure(ValueError):
    def __init__(self, problem_id: int, reason: Exception):
        self.problem_id = problem_id
        self.reason = reason
        super().__init__(f"problem {problem_id}: {reason}")


@dataclass(frozen=True)
class Problem:
    id: int
    name: str
    target: TargetStructure


@dataclass(frozen=True)
class ProblemSet:
    entries: tuple[Problem, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def by_id(self, problem_id: int) -> Problem:
        for problem in self.entries:
            if problem.id == problem_id:
                return problem
        raise KeyError(f"no problem with id {problem_id}")


def load_problems(path) -> ProblemSet:
    """Read a problem file: header `id\\tname\\tstructure`, one per line."""
    text = Path(path).read_text()
    lines = text.splitlines()
    if not lines:
        raise ParseError(1, "empty problem file")
    if tuple(lines[0].split("\t")) != HEADER:
        wanted = "\t".join(HEADER)
        raise ParseError(1, f"expected header {wanted!r}, got {lines[0]!r}")

    problems: list[Problem] = []
    seen: set[int] = set()
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ParseError(lineno, f"expected 3 tab-separated fields, got {len(fields)}")
        raw_id, name, structure = fields
        try:
            problem_id = int(raw_id)
        except ValueError:
            raise ParseError(lineno, f"id {raw_id!r} is not an integer") from None
        if problem_id in seen:
            raise ParseError(lineno, f"duplicate problem id {problem_id}")
        seen.add(problem_id)
        try:
            target = parse_dotbracket(structure)
        except StructureError as exc:
            raise InvalidStructure(problem_id, exc) from exc
        problems.append(Problem(problem_id, name, target))
    return ProblemSet(tuple(problems))
