"""Command line entry point.

Subcommands: solve (one run), batch (many seeded runs), tune (replay
recorded traces), fold (debug a single fold), report (render artifacts).

Any flag can also come from a key=value config file (--config) or, for
the external folder command, the MONTPARNASSE_EXTERNAL_CMD environment
variable. Explicit flags beat the environment, which beats the config
file. Exit codes: 0 on success, 1 on runtime failure, 2 on bad usage.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from pathlib import Path

from .batch import ALGORITHMS, MissingArtifacts, report, run_batch
from .folding.base import BUILTIN, ENGINE_KINDS, EngineConfig, EngineFailure
from .folding.engine import FoldingEngine
from .localsearch import NarrowingProfile
from .problems import Problem, load_problems
from .structure import StructureError, parse_dotbracket
from .tuning import load_dataset, tune

ENV_EXTERNAL_CMD = "MONTPARNASSE_EXTERNAL_CMD"


def _parse_counts(text: str) -> tuple[int, ...]:
    """Comma-separated counts; a token may be a range lo-hi or lo-hi:step."""
    values: list[int] = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        if "-" in token[1:]:
            span, _, step_text = token.partition(":")
            lo_text, _, hi_text = span.partition("-")
            lo, hi = int(lo_text), int(hi_text)
            step = int(step_text) if step_text else 1
            if step < 1 or hi < lo:
                raise ValueError(f"bad range {token!r}")
            values.extend(range(lo, hi + 1, step))
        else:
            values.append(int(token))
    if not values:
        raise ValueError("no counts given")
    return tuple(values)


def _engine_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("engine")
    group.add_argument("--engine", choices=ENGINE_KINDS, default=BUILTIN)
    group.add_argument("--external-cmd", help="external folder command line")
    group.add_argument("--external-timeout", type=float, default=30.0)
    group.add_argument("--min-hairpin", type=int, default=3)
    group.add_argument("--kT", type=float, default=1.0)


def _target_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("target")
    group.add_argument("--problems", help="problem TSV file (id, name, structure)")
    group.add_argument("--problem-id", type=int, help="problem id within --problems")
    group.add_argument("--target", help="dot-bracket target given directly")


def _search_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("search")
    group.add_argument("--algorithm", choices=ALGORITHMS, default="mogrls")
    group.add_argument("--budget", type=int, default=10_000)
    group.add_argument("--gc-target", type=float, default=0.5)
    group.add_argument("--level", type=int, default=3, help="nesting level (mognrpalr)")
    group.add_argument("--alpha", type=float, default=1.0, help="adapt step (mognrpalr)")
    group.add_argument(
        "--profile", type=_parse_counts, help="narrowing thresholds in evaluations (pn)"
    )
    group.add_argument("--restarts", type=int, default=1, help="narrowing restarts (pn)")


#: Flag value types, for converting config-file strings.
_CONFIG_TYPES = {
    "problem_id": int,
    "budget": int,
    "gc_target": float,
    "level": int,
    "alpha": float,
    "profile": _parse_counts,
    "restarts": int,
    "external_timeout": float,
    "min_hairpin": int,
    "kT": float,
    "seed": int,
    "base_seed": int,
    "runs": int,
    "parallelism": int,
    "samples": int,
    "max_slots": int,
    "total_budget": int,
    "restart_options": _parse_counts,
    "possible": _parse_counts,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="montparnasse",
        description="Inverse RNA folding by multi-objective search.",
    )
    parser.add_argument("--config", help="key=value file supplying flag defaults")
    commands = parser.add_subparsers(dest="command", required=True)

    solve = commands.add_parser("solve", help="run one seeded search")
    _target_flags(solve)
    _search_flags(solve)
    _engine_flags(solve)
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--out", help="also write run artifacts under this directory")
    solve.set_defaults(func=_cmd_solve)

    batch = commands.add_parser("batch", help="run many seeded searches and record artifacts")
    _target_flags(batch)
    _search_flags(batch)
    _engine_flags(batch)
    batch.add_argument("--runs", type=int, required=True)
    batch.add_argument("--base-seed", type=int, default=0)
    batch.add_argument("--parallelism", type=int, default=1)
    batch.add_argument("--out", required=True, help="artifact root directory")
    batch.set_defaults(func=_cmd_batch)

    tune_cmd = commands.add_parser("tune", help="search narrowing schedules over a trace dataset")
    tune_cmd.add_argument("--dataset", required=True, help="run_id,checkpoint,best_bpd CSV")
    tune_cmd.add_argument(
        "--restart-options", type=_parse_counts, required=True,
        help="restart budgets in checkpoints, e.g. 1350,2700",
    )
    tune_cmd.add_argument("--max-slots", type=int, default=5)
    tune_cmd.add_argument(
        "--possible", type=_parse_counts, required=True,
        help="allowed threshold values in checkpoints, e.g. 100-2300:100",
    )
    tune_cmd.add_argument("--samples", type=int, default=1000)
    tune_cmd.add_argument("--seed", type=int, default=0)
    tune_cmd.add_argument("--total-budget", type=int, help="checkpoints per trace to replay")
    tune_cmd.set_defaults(func=_cmd_tune)

    fold = commands.add_parser("fold", help="fold one sequence against a target")
    fold.add_argument("--sequence", required=True)
    fold.add_argument("--target", required=True)
    _engine_flags(fold)
    fold.set_defaults(func=_cmd_fold)

    report_cmd = commands.add_parser("report", help="render reports from batch artifacts")
    report_cmd.add_argument("--dir", required=True, help="directory with run_*.json artifacts")
    report_cmd.set_defaults(func=_cmd_report)

    return parser


def _load_config_file(path: str) -> dict:
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {stripped!r}")
        key, _, value = stripped.partition("=")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _apply_overlays(parser: argparse.ArgumentParser, argv: list[str]) -> None:
    """Feed config-file values and the environment in as defaults.

    Values land on the chosen subparser via set_defaults, so explicit
    flags still win while subparser defaults lose.
    """
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    pre_args, rest = pre.parse_known_args(argv)

    overlay: dict = {}
    if pre_args.config:
        try:
            raw = _load_config_file(pre_args.config)
        except OSError as exc:
            parser.error(f"cannot read config file: {exc}")
        except ValueError as exc:
            parser.error(str(exc))
        for key, value in raw.items():
            converter = _CONFIG_TYPES.get(key)
            try:
                overlay[key] = converter(value) if converter else value
            except ValueError as exc:
                parser.error(f"config value {key}={value!r}: {exc}")
    env_cmd = os.environ.get(ENV_EXTERNAL_CMD)
    if env_cmd:
        overlay["external_cmd"] = env_cmd
    if not overlay:
        return

    command = next((token for token in rest if not token.startswith("-")), None)
    subparsers = next(
        action for action in parser._actions
        if isinstance(action, argparse._SubParsersAction)
    )
    if command in subparsers.choices:
        subparsers.choices[command].set_defaults(**overlay)


def _engine_config(args: argparse.Namespace, parser: argparse.ArgumentParser) -> EngineConfig:
    try:
        return EngineConfig(
            engine_kind=args.engine,
            min_hairpin=args.min_hairpin,
            kT=args.kT,
            external_command=args.external_cmd,
            external_timeout=args.external_timeout,
        )
    except ValueError as exc:
        parser.error(str(exc))


def _resolve_problem(args: argparse.Namespace, parser: argparse.ArgumentParser) -> Problem:
    if args.target is not None:
        if args.problems is not None:
            parser.error("give either --target or --problems, not both")
        try:
            target = parse_dotbracket(args.target)
        except StructureError as exc:
            parser.error(f"bad --target: {exc}")
        return Problem(id=args.problem_id or 0, name="ad hoc", target=target)
    if args.problems is None or args.problem_id is None:
        parser.error("need --target, or --problems with --problem-id")
    try:
        problems = load_problems(args.problems)
        return problems.by_id(args.problem_id)
    except (OSError, ValueError, KeyError) as exc:
        parser.error(str(exc))


def _narrowing_profile(args: argparse.Namespace, parser: argparse.ArgumentParser):
    if args.algorithm != "pn":
        return None
    if args.profile is None:
        parser.error("algorithm pn needs --profile")
    try:
        return NarrowingProfile(args.profile, args.restarts)
    except ValueError as exc:
        parser.error(str(exc))


def _cmd_solve(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    problem = _resolve_problem(args, parser)
    config = _engine_config(args, parser)
    profile = _narrowing_profile(args, parser)
    out = Path(args.out) / str(problem.id) / args.algorithm if args.out else None
    batch = run_batch(
        problem,
        args.algorithm,
        runs=1,
        budget=args.budget,
        base_seed=args.seed,
        config=config,
        parallelism=1,
        output_dir=out,
        level=args.level,
        alpha=args.alpha,
        profile=profile,
        gc_target=args.gc_target,
    )
    if batch.failures:
        print(f"run failed: {batch.failures[0][1]}", file=sys.stderr)
        return 1
    print(json.dumps(batch.records[0].result_json(), indent=2, sort_keys=True))
    return 0


def _cmd_batch(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    problem = _resolve_problem(args, parser)
    config = _engine_config(args, parser)
    profile = _narrowing_profile(args, parser)
    out = Path(args.out) / str(problem.id) / args.algorithm
    batch = run_batch(
        problem,
        args.algorithm,
        runs=args.runs,
        budget=args.budget,
        base_seed=args.base_seed,
        config=config,
        parallelism=args.parallelism,
        output_dir=out,
        level=args.level,
        alpha=args.alpha,
        profile=profile,
        gc_target=args.gc_target,
    )
    total = len(batch.records)
    print(f"artifacts: {out}")
    print(f"completed runs: {total}, failed: {len(batch.failures)}")
    if total:
        print(f"solved: {batch.solved_count}/{total}")
    return 0


def _cmd_tune(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    try:
        dataset = load_dataset(args.dataset)
    except (OSError, ValueError) as exc:
        parser.error(str(exc))
    rng = random.Random(args.seed)
    best, score = tune(
        dataset,
        restart_options=args.restart_options,
        max_slots=args.max_slots,
        possible=args.possible,
        samples=args.samples,
        rng=rng,
        total_budget=args.total_budget,
    )
    print(
        json.dumps(
            {
                "thresholds": list(best.thresholds),
                "restart_budget": best.restart_budget,
                "solved_fraction": score,
            },
            indent=2,
            sort_keys=True,
        )
    )
    return 0


def _cmd_fold(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    config = _engine_config(args, parser)
    try:
        target = parse_dotbracket(args.target)
    except StructureError as exc:
        parser.error(f"bad --target: {exc}")
    try:
        with FoldingEngine(config) as engine:
            result = engine.fold(args.sequence, target)
    except (StructureError, ValueError) as exc:
        parser.error(str(exc))
    print(f"mfe_structure        {result.mfe_structure}")
    print(f"mfe_energy           {result.mfe_energy}")
    print(f"ensemble_free_energy {result.ensemble_free_energy}")
    print(f"target_probability   {result.target_probability}")
    print(f"ensemble_defect      {result.ensemble_defect}")
    return 0


def _cmd_report(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    try:
        report(args.dir)
    except MissingArtifacts as exc:
        print(str(exc), file=sys.stderr)
        return 1
    print((Path(args.dir) / "summary.txt").read_text(), end="")
    return 0


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    _apply_overlays(parser, argv)
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except EngineFailure as exc:
        print(f"engine failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
