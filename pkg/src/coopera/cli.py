"""Command-line front end.

Thin wrapper over Engine: each subcommand maps to one engine call, and
output stays script-friendly (ids and exported text on stdout, status
notes on stderr). Exit codes tell shells what went wrong:

    0  success
    2  validation failure
    3  stage-order violation
    4  provider or provider-output failure
    5  storage failure
    1  anything else
"""

from __future__ import annotations

import argparse
import json
import sys

from . import analytics
from .engine import Engine, demo, resolve_provider, stage_from_key
from .errors import CooperaError
from .model import Stage
from .store import FileStore

EXIT_CODES = {
    "VALIDATION": 2,
    "STAGE_ORDER": 3,
    "PROVIDER": 4,
    "SCHEMA_INVALID": 4,
    "STORAGE": 5,
}


def _engine(args: argparse.Namespace) -> Engine:
    store = FileStore(args.data_dir) if args.data_dir else FileStore()
    provider = resolve_provider(force_mock=args.mock, mock_seed=args.mock_seed)
    return Engine(store=store, provider=provider)


def _status_line(project, stage: Stage) -> str:
    count = 1 if stage == Stage.LOGLINE else len(project.elements_of(stage))
    return (
        f"{stage.key}: {project.state_of(stage).value}"
        f" ({count} element{'s' if count != 1 else ''}), revision {project.revision}"
    )


def cmd_new(args: argparse.Namespace) -> int:
    project = _engine(args).create_project(logline_draft=args.logline or "", title=args.title or "")
    print(project.id)
    return 0


def cmd_list(args: argparse.Namespace) -> int:
    print(json.dumps(_engine(args).list_projects(), indent=2))
    return 0


def cmd_generate(args: argparse.Namespace) -> int:
    stage = stage_from_key(args.stage)
    project = _engine(args).generate(
        args.project,
        stage,
        seed=args.seed,
        count_hint=args.count,
        style_notes=args.notes,
        expected_revision=args.expect_revision,
    )
    print(_status_line(project, stage), file=sys.stderr)
    return 0


def cmd_confirm(args: argparse.Namespace) -> int:
    payload = None
    if args.text is not None:
        payload = args.text
    elif args.payload is not None:
        with open(args.payload, encoding="utf-8") as fh:
            payload = json.load(fh)
    stage = stage_from_key(args.stage)
    project = _engine(args).confirm(
        args.project, stage, payload, expected_revision=args.expect_revision
    )
    print(_status_line(project, stage), file=sys.stderr)
    return 0


def cmd_cascade(args: argparse.Namespace) -> int:
    project = _engine(args).cascade(
        args.project,
        stage_from_key(args.from_stage),
        seed=args.seed,
        expected_revision=args.expect_revision,
    )
    for stage in Stage:
        print(_status_line(project, stage), file=sys.stderr)
    return 0


def cmd_edit(args: argparse.Namespace) -> int:
    patch = json.loads(args.patch)
    project = _engine(args).edit(
        args.project, args.element, patch, expected_revision=args.expect_revision
    )
    print(f"revision {project.revision}", file=sys.stderr)
    return 0


def cmd_export(args: argparse.Namespace) -> int:
    text = _engine(args).export(args.project, args.format)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_staleness(args: argparse.Namespace) -> int:
    print(json.dumps(_engine(args).staleness(args.project).to_dict(), indent=2))
    return 0


def cmd_diff(args: argparse.Namespace) -> int:
    report = _engine(args).diff(args.project, stage_from_key(args.stage))
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        print(report.as_table())
    return 0


def cmd_sus(args: argparse.Namespace) -> int:
    report = analytics.sus_score(analytics.load_sus_csv(args.csv))
    print(json.dumps(report.to_dict(), indent=2))
    return 0


def cmd_demo(args: argparse.Namespace) -> int:
    _, _, lines = demo(seed=args.seed)
    print("\n".join(lines))
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(_engine(args))
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _stage_arg(parser: argparse.ArgumentParser, flag: str = "--stage", **kwargs) -> None:
    parser.add_argument(flag, required=True, choices=[s.key for s in Stage], **kwargs)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coopera",
        description="Staged script co-writing: logline, characters, plots, scenes, dialogues.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--data-dir", default=None, help="project directory (default $COOPERA_DATA_DIR or ./data)")
    common.add_argument("--mock", action="store_true", help="use the offline deterministic provider")
    common.add_argument("--mock-seed", type=int, default=0, help="seed for the offline provider")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("new", parents=[common], help="create a project, print its id")
    p.add_argument("--title", default="")
    p.add_argument("--logline", default="", help="initial logline draft")
    p.set_defaults(func=cmd_new)

    p = sub.add_parser("list", parents=[common], help="list projects")
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("generate", parents=[common], help="generate a stage draft")
    p.add_argument("--project", required=True)
    _stage_arg(p)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--count", type=int, default=None, help="how many elements to aim for")
    p.add_argument("--notes", default=None, help="style notes passed to the agent")
    p.add_argument("--expect-revision", type=int, default=None)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("confirm", parents=[common], help="confirm a stage")
    p.add_argument("--project", required=True)
    _stage_arg(p)
    p.add_argument("--text", default=None, help="logline text to confirm")
    p.add_argument("--payload", default=None, help="JSON file with replacement elements")
    p.add_argument("--expect-revision", type=int, default=None)
    p.set_defaults(func=cmd_confirm)

    p = sub.add_parser("cascade", parents=[common], help="regenerate a stage and everything after it")
    p.add_argument("--project", required=True)
    _stage_arg(p, "--from", dest="from_stage")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--expect-revision", type=int, default=None)
    p.set_defaults(func=cmd_cascade)

    p = sub.add_parser("edit", parents=[common], help="patch one element (or the logline)")
    p.add_argument("--project", required=True)
    p.add_argument("--element", required=True, help='element id, or "logline"')
    p.add_argument("--patch", required=True, help="JSON object of field changes")
    p.add_argument("--expect-revision", type=int, default=None)
    p.set_defaults(func=cmd_edit)

    p = sub.add_parser("export", parents=[common], help="print the project")
    p.add_argument("--project", required=True)
    p.add_argument("--format", choices=("json", "screenplay"), default="json")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("staleness", parents=[common], help="per-stage freshness flags")
    p.add_argument("--project", required=True)
    p.set_defaults(func=cmd_staleness)

    p = sub.add_parser("diff", parents=[common], help="first generated draft vs current text")
    p.add_argument("--project", required=True)
    _stage_arg(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("sus", parents=[common], help="score questionnaires from a CSV (columns id,Q1..Q10)")
    p.add_argument("--csv", required=True)
    p.set_defaults(func=cmd_sus)

    p = sub.add_parser("demo", parents=[common], help="run the full flow offline and print a screenplay")
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("serve", parents=[common], help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8750)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CooperaError as exc:
        print(f"error [{exc.code}]: {exc.message}", file=sys.stderr)
        return EXIT_CODES.get(exc.code, 1)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())
