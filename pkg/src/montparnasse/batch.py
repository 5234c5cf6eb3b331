"""Seeded experiment batches: parallel runs, artifacts, distribution reports.

Artifacts for one batch live in a single directory (the CLI maps a batch
to <out>/<problem_id>/<algorithm>/):

    run_<seed>.json        final result of one run
    run_<seed>.trace.csv   best-BPD checkpoints of that run
    batch.json             batch inputs and failure list
    dataset.csv            all traces padded to full budget, for tuning

Reports derive from artifacts alone so they can be rebuilt later:

    histogram.csv, curve.csv, summary.txt, histogram.png, curve.png

Nothing written here contains a timestamp; rerunning a batch with the
same inputs reproduces every file byte for byte.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .folding.base import EngineConfig
from .localsearch import (
    CHECKPOINT_EVERY,
    NarrowingProfile,
    SearchState,
    mogrls,
    progressive_narrowing,
)
from .mcts import solve
from .objectives import ScoreVector
from .problems import Problem
from .structure import parse_dotbracket
from .tuning import load_dataset

ALGORITHMS = ("mogrls", "pn", "mognrpalr")


class MissingArtifacts(RuntimeError):
    def __init__(self, path):
        self.path = Path(path)
        super().__init__(f"no run artifacts under {path}")


@dataclass(frozen=True)
class RunRecord:
    problem_id: int
    algorithm: str
    seed: int
    level: int | None
    nevals: int
    solved: bool
    best_bpd: int
    best_sequence: str
    score_vector: ScoreVector
    trace: tuple[tuple[int, int], ...]

    def result_json(self) -> dict:
        return {
            "problem_id": self.problem_id,
            "algorithm": self.algorithm,
            "seed": self.seed,
            "level": self.level,
            "nevals": self.nevals,
            "solved": self.solved,
            "best_bpd": self.best_bpd,
            "best_sequence": self.best_sequence,
            "score_vector": self.score_vector.as_dict(),
        }


@dataclass(frozen=True)
class _RunSpec:
    problem_id: int
    dotbracket: str
    algorithm: str
    seed: int
    budget: int
    level: int
    alpha: float
    profile: tuple[int, ...] | None
    restarts: int
    gc_target: float
    config: EngineConfig | None


def _execute_run(spec: _RunSpec) -> RunRecord:
    target = parse_dotbracket(spec.dotbracket)
    level: int | None = None
    if spec.algorithm == "mogrls":
        state = mogrls(target, spec.budget, spec.seed, spec.config, spec.gc_target)
    elif spec.algorithm == "pn":
        profile = NarrowingProfile(spec.profile, spec.restarts)
        state = progressive_narrowing(target, profile, spec.seed, spec.config, spec.gc_target)
    elif spec.algorithm == "mognrpalr":
        state = solve(
            target,
            level=spec.level,
            config=spec.config,
            alpha=spec.alpha,
            budget=spec.budget,
            rng_seed=spec.seed,
            gc_target=spec.gc_target,
        )
        level = spec.level
    else:
        raise ValueError(f"unknown algorithm {spec.algorithm!r}")
    return _record_from_state(spec, state, level)


def _record_from_state(spec: _RunSpec, state: SearchState, level: int | None) -> RunRecord:
    return RunRecord(
        problem_id=spec.problem_id,
        algorithm=spec.algorithm,
        seed=spec.seed,
        level=level,
        nevals=state.nevals,
        solved=state.solved,
        best_bpd=state.best_score.bpd,
        best_sequence=state.best_sequence,
        score_vector=state.best_score,
        trace=state.trace,
    )


@dataclass(frozen=True)
class BatchReport:
    problem_id: int
    algorithm: str
    budget: int
    records: tuple[RunRecord, ...]
    failures: tuple[tuple[int, str], ...]

    @property
    def solved_count(self) -> int:
        return sum(1 for r in self.records if r.solved)

    @property
    def histogram(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for record in self.records:
            counts[record.best_bpd] = counts.get(record.best_bpd, 0) + 1
        return dict(sorted(counts.items()))

    @property
    def checkpoints(self) -> int:
        return self.budget // CHECKPOINT_EVERY

    def padded_trace(self, record: RunRecord) -> list[int]:
        """Checkpoint BPDs extended to the full budget: a solved run
        stays at 0, an unsolved run keeps its last best."""
        values = [bpd for _, bpd in record.trace]
        if len(values) < self.checkpoints:
            fill = 0 if record.solved else (values[-1] if values else record.best_bpd)
            values.extend([fill] * (self.checkpoints - len(values)))
        return values[: self.checkpoints]

    def curve(self) -> tuple[tuple[int, float], ...]:
        if not self.records:
            return ()
        padded = [self.padded_trace(r) for r in self.records]
        points = []
        for c in range(self.checkpoints):
            mean = sum(p[c] for p in padded) / len(padded)
            points.append(((c + 1) * CHECKPOINT_EVERY, mean))
        return tuple(points)


def run_batch(
    problem: Problem,
    algorithm: str,
    runs: int,
    budget: int,
    base_seed: int,
    config: EngineConfig | None = None,
    parallelism: int = 1,
    output_dir=None,
    level: int = 3,
    alpha: float = 1.0,
    profile: NarrowingProfile | None = None,
    gc_target: float = 0.5,
) -> BatchReport:
    """Run one algorithm `runs` times with seeds base_seed.. and collect.

    A run that raises is recorded under failures and left out of the
    statistics; the batch itself still completes. With output_dir set,
    all artifacts are written there.
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    if runs < 1:
        raise ValueError("runs must be >= 1")
    if algorithm == "pn":
        if profile is None:
            raise ValueError("pn needs a narrowing profile")
        effective_budget = profile.restarts * profile.per_restart_budget
    else:
        effective_budget = budget

    specs = [
        _RunSpec(
            problem_id=problem.id,
            dotbracket=problem.target.dotbracket,
            algorithm=algorithm,
            seed=base_seed + offset,
            budget=budget,
            level=level,
            alpha=alpha,
            profile=profile.thresholds if profile else None,
            restarts=profile.restarts if profile else 1,
            gc_target=gc_target,
            config=config,
        )
        for offset in range(runs)
    ]

    records: list[RunRecord] = []
    failures: list[tuple[int, str]] = []
    if parallelism > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            futures = {pool.submit(_execute_run, spec): spec.seed for spec in specs}
            for future, seed in futures.items():
                try:
                    records.append(future.result())
                except Exception as exc:
                    failures.append((seed, f"{type(exc).__name__}: {exc}"))
    else:
        for spec in specs:
            try:
                records.append(_execute_run(spec))
            except Exception as exc:
                failures.append((spec.seed, f"{type(exc).__name__}: {exc}"))

    records.sort(key=lambda r: r.seed)
    failures.sort()
    report_data = BatchReport(
        problem_id=problem.id,
        algorithm=algorithm,
        budget=effective_budget,
        records=tuple(records),
        failures=tuple(failures),
    )
    if output_dir is not None:
        _write_batch(Path(output_dir), problem, report_data, specs[0])
    return report_data


def _write_batch(directory: Path, problem: Problem, report_data: BatchReport, spec: _RunSpec) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    for record in report_data.records:
        _write_json(directory / f"run_{record.seed}.json", record.result_json())
        with open(directory / f"run_{record.seed}.trace.csv", "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["run_id", "checkpoint", "best_bpd"])
            for checkpoint, bpd in record.trace:
                writer.writerow([record.seed, checkpoint, bpd])

    engine = (spec.config or EngineConfig())
    _write_json(
        directory / "batch.json",
        {
            "problem_id": problem.id,
            "problem_name": problem.name,
            "structure": problem.target.dotbracket,
            "algorithm": report_data.algorithm,
            "runs": len(report_data.records) + len(report_data.failures),
            "base_seed": spec.seed,
            "budget": report_data.budget,
            "level": spec.level if report_data.algorithm == "mognrpalr" else None,
            "alpha": spec.alpha if report_data.algorithm == "mognrpalr" else None,
            "profile": list(spec.profile) if spec.profile else None,
            "restarts": spec.restarts if report_data.algorithm == "pn" else None,
            "gc_target": spec.gc_target,
            "engine": {
                "engine_kind": engine.engine_kind,
                "min_hairpin": engine.min_hairpin,
                "kT": engine.kT,
                "external_command": engine.external_command,
            },
            "failures": [list(f) for f in report_data.failures],
        },
    )

    with open(directory / "dataset.csv", "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["run_id", "checkpoint", "best_bpd"])
        for record in report_data.records:
            for index, bpd in enumerate(report_data.padded_trace(record)):
                writer.writerow([record.seed, (index + 1) * CHECKPOINT_EVERY, bpd])


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _load_record(path: Path) -> RunRecord:
    payload = json.loads(path.read_text())
    trace_path = path.with_name(path.name.replace(".json", ".trace.csv"))
    trace: tuple[tuple[int, int], ...] = ()
    if trace_path.exists():
        loaded = load_dataset(trace_path)
        if loaded:
            trace = tuple(
                ((i + 1) * CHECKPOINT_EVERY, bpd) for i, bpd in enumerate(loaded[0].checkpoints)
            )
    return RunRecord(
        problem_id=payload["problem_id"],
        algorithm=payload["algorithm"],
        seed=payload["seed"],
        level=payload["level"],
        nevals=payload["nevals"],
        solved=payload["solved"],
        best_bpd=payload["best_bpd"],
        best_sequence=payload["best_sequence"],
        score_vector=ScoreVector(**payload["score_vector"]),
        trace=trace,
    )


def report(output_dir) -> BatchReport:
    """Rebuild the batch report from artifacts and render it.

    Writes histogram.csv, curve.csv, summary.txt and the matching png
    figures next to the run artifacts. Raises MissingArtifacts when the
    directory has no runs to report on.
    """
    directory = Path(output_dir)
    run_files = sorted(directory.glob("run_*.json"), key=_seed_of)
    if not run_files:
        raise MissingArtifacts(directory)
    records = tuple(_load_record(path) for path in run_files)

    failures: tuple[tuple[int, str], ...] = ()
    budget = None
    batch_meta = directory / "batch.json"
    if batch_meta.exists():
        meta = json.loads(batch_meta.read_text())
        budget = meta.get("budget")
        failures = tuple((int(s), str(m)) for s, m in meta.get("failures", []))
    if budget is None:
        budget = max((len(r.trace) for r in records), default=0) * CHECKPOINT_EVERY

    report_data = BatchReport(
        problem_id=records[0].problem_id,
        algorithm=records[0].algorithm,
        budget=budget,
        records=records,
        failures=failures,
    )
    _write_report_files(directory, report_data)
    return report_data


def _seed_of(path: Path) -> int:
    return int(path.stem.split("_")[1])


def _write_report_files(directory: Path, report_data: BatchReport) -> None:
    with open(directory / "histogram.csv", "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["bpd", "count"])
        for bpd, count in report_data.histogram.items():
            writer.writerow([bpd, count])

    curve = report_data.curve()
    with open(directory / "curve.csv", "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["checkpoint", "mean_bpd"])
        for checkpoint, mean in curve:
            writer.writerow([checkpoint, repr(mean)])

    total = len(report_data.records)
    lines = [
        f"problem {report_data.problem_id}, algorithm {report_data.algorithm}",
        f"runs: {total} ({len(report_data.failures)} failed)",
    ]
    if total:
        pct = 100.0 * report_data.solved_count / total
        lines.append(f"solved: {report_data.solved_count}/{total} ({pct:.1f}%)")
        lines.append("final bpd histogram:")
        for bpd, count in report_data.histogram.items():
            lines.append(f"  {bpd}: {count}")
    (directory / "summary.txt").write_text("\n".join(lines) + "\n")

    _render_figures(directory, report_data, curve)


def _render_figures(directory: Path, report_data: BatchReport, curve) -> None:
    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    histogram = report_data.histogram
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if histogram:
        ax.bar(list(histogram.keys()), list(histogram.values()), color="#336699")
        ax.set_xticks(list(histogram.keys()))
    ax.set_xlabel("final base pair distance")
    ax.set_ylabel("runs")
    ax.set_title(f"problem {report_data.problem_id}: {report_data.algorithm}")
    fig.tight_layout()
    fig.savefig(directory / "histogram.png", dpi=120)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if curve:
        ax.plot([c for c, _ in curve], [m for _, m in curve], color="#336699")
    ax.set_xlabel("evaluations")
    ax.set_ylabel("mean best base pair distance")
    ax.set_title(f"problem {report_data.problem_id}: {report_data.algorithm}")
    fig.tight_layout()
    fig.savefig(directory / "curve.png", dpi=120)
    plt.close(fig)
