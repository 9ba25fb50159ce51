"""Command line interface: replay, validate, export, serve."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import PosynError, ValidationFailedError
from .project import export_xmi, load_project, save_project
from .session import final_document, parse_script, replay


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="posyn", description="Positional modeling editor engine"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_replay = sub.add_parser("replay", help="replay a scripted session")
    p_replay.add_argument("--project", required=True, help="project file (.posyn.json)")
    p_replay.add_argument("--script", required=True, help="session script (JSONL)")
    p_replay.add_argument("--out", help="write the final project here")
    p_replay.add_argument("--trace", help="write the JSONL trace here")

    p_validate = sub.add_parser("validate", help="validate a project file")
    p_validate.add_argument("--project", required=True)

    p_export = sub.add_parser("export", help="export the model")
    p_export.add_argument("--project", required=True)
    p_export.add_argument("--format", default="xmi", choices=["xmi"])
    p_export.add_argument("--out", help="output file (stdout when omitted)")

    p_serve = sub.add_parser("serve", help="serve interactive sessions")
    p_serve.add_argument("--project", required=True)
    p_serve.add_argument("--port", type=int, default=8765)
    p_serve.add_argument("--host", default="127.0.0.1")
    return parser


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _load(path: str):
    return load_project(_read(path))


def _fail(message: str) -> int:
    print(message, file=sys.stderr)
    return 1


def _cmd_replay(args) -> int:
    try:
        doc = _load(args.project)
    except (OSError, PosynError) as err:
        return _fail(f"project: {err}")
    try:
        events = parse_script(_read(args.script))
    except (OSError, PosynError) as err:
        return _fail(f"script: {err}")

    result = replay(doc, events)
    if args.trace:
        Path(args.trace).write_text(result.trace_text(), encoding="utf-8")
    if args.out:
        Path(args.out).write_text(
            save_project(final_document(doc, result.engine)), encoding="utf-8"
        )
    violations = result.violation_count
    print(f"replayed {len(events)} events, {violations} violations")
    return 2 if violations else 0


def _cmd_validate(args) -> int:
    try:
        _load(args.project)
    except OSError as err:
        return _fail(str(err))
    except ValidationFailedError as err:
        for row in err.report:
            print(row, file=sys.stderr)
        return _fail(f"invalid: {len(err.report)} problems")
    except PosynError as err:
        return _fail(f"invalid: [{err.code}] {err}")
    print("ok")
    return 0


def _cmd_export(args) -> int:
    try:
        doc = _load(args.project)
        text = export_xmi(doc.model, doc.metamodel)
    except (OSError, PosynError) as err:
        return _fail(str(err))
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_serve(args) -> int:
    try:
        text = _read(args.project)
        load_project(text)  # fail fast on an invalid project
    except (OSError, PosynError) as err:
        return _fail(str(err))
    import uvicorn

    from .server import create_app

    uvicorn.run(
        create_app(text), host=args.host, port=args.port, log_level="warning"
    )
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {
        "replay": _cmd_replay,
        "validate": _cmd_validate,
        "export": _cmd_export,
        "serve": _cmd_serve,
    }[args.command]
    return handler(args)


if __name__ == "__main__":
    raise SystemExit(main())
