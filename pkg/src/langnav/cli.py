"""Command-line interface: run one command, evaluate a corpus, serve the API."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import data as bundled
from .evalharness import aggregate, emit_report, load_records, run_live_eval, table_to_csv
from .pipeline import CodegenConfig, NavCommand, World, report_json, run_command


def _print_table(table) -> None:
    sys.stdout.write(table_to_csv(table))


def cmd_run(args: argparse.Namespace) -> int:
    world = World.load(bundled.scene_path(args.scene))
    codegen = CodegenConfig(
        mode="live" if args.live else "fixture",
        endpoint=args.endpoint,
        token_env=args.token_env,
    )
    cmd = NavCommand(
        text=args.command,
        scene=world.scene.name,
        category=args.category,
        representation=args.rep,
        fixture_id=args.fixture,
        target_object_id=args.target,
        seed=args.seed,
    )
    report = run_command(cmd, world, codegen)
    for name, outcome in report.stages.to_dict().items():
        status = "PASS" if outcome["passed"] else "FAIL"
        print(f"{name:>9}: {status}  {outcome['detail']}")
    if args.report:
        Path(args.report).write_text(report_json(report))
        print(f"report written to {args.report}")
    return 0 if all(report.stages.flags()) else 1


def cmd_eval(args: argparse.Namespace) -> int:
    if args.mode == "records":
        records = load_records(bundled.records_path(args.corpus))
        table = aggregate(records, args.group)
    else:
        result = run_live_eval(
            bundled.corpus_path(args.corpus),
            representation=args.rep,
            seed=args.seed,
            grouping=args.group,
        )
        records, table = result.records, result.table
        for bad in result.invalid:
            print(f"invalid entry skipped: {bad['id']}: {bad['reason']}", file=sys.stderr)
    _print_table(table)
    if args.report:
        fmt = args.format or ("json" if args.report.endswith(".json") else "csv")
        emit_report(table, records, fmt, args.report)
        print(f"report written to {args.report}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    world = World.load(bundled.scene_path(args.scene))
    codegen = CodegenConfig(
        mode="live" if args.live else "fixture",
        endpoint=args.endpoint,
        token_env=args.token_env,
    )
    app = create_app(world, codegen, static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="langnav",
        description="Language-commanded navigation on a simulated multi-camera robot",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_run = sub.add_parser("run", help="run one command through the full stage chain")
    p_run.add_argument("--scene", required=True, help="scene file or bundled scene name")
    p_run.add_argument("--command", required=True, help="natural-language command text")
    p_run.add_argument("--fixture", default=None, help="program fixture id")
    p_run.add_argument("--rep", default="A", choices=["A", "B"], help="input representation")
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--report", default=None, help="write the full report JSON here")
    p_run.add_argument("--category", default="Generic")
    p_run.add_argument("--target", default=None, help="target object id for stage scoring")
    p_run.add_argument("--live", action="store_true", help="use the live codegen endpoint")
    p_run.add_argument("--endpoint", default=None)
    p_run.add_argument("--token-env", default=None, help="env var holding the API token")
    p_run.set_defaults(func=cmd_run)

    p_eval = sub.add_parser("eval", help="aggregate stage records or run the sim corpus")
    p_eval.add_argument(
        "--corpus",
        required=True,
        help="records/corpus file, or bundled name "
        "(appendix-records, classroom-records, sim, crossframe)",
    )
    p_eval.add_argument("--mode", default="records", choices=["records", "live-sim"])
    p_eval.add_argument("--report", default=None, help="write the aggregate table here")
    p_eval.add_argument("--format", default=None, choices=["csv", "json"])
    p_eval.add_argument("--group", default="category", choices=["category", "scene", "representation"])
    p_eval.add_argument("--rep", default="A", choices=["A", "B"])
    p_eval.add_argument("--seed", type=int, default=0)
    p_eval.set_defaults(func=cmd_eval)

    p_serve = sub.add_parser("serve", help="serve the HTTP/WebSocket API")
    p_serve.add_argument("--scene", required=True)
    p_serve.add_argument("--port", type=int, default=8080)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--static", default=None, help="directory with the built console")
    p_serve.add_argument("--live", action="store_true")
    p_serve.add_argument("--endpoint", default=None)
    p_serve.add_argument("--token-env", default=None)
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
