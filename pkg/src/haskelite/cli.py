"""Command-line interface.

``haskelite run FILE -e EXPR`` prints a full trace (plain text in the
textbook layout, or JSON), ``haskelite type -e EXPR`` prints an inferred
type, and ``haskelite serve`` starts the stepping service.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional

from .program import LoadError, load_program, prepare_entry
from .tracer import (
    STATUS_DONE,
    STATUS_FAILED,
    STATUS_FUEL,
    TraceEntry,
    TraceOptions,
    Tracer,
)
from .typecheck import render_scheme

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_RUNTIME = 2
EXIT_TYPE = 3
EXIT_SYNTAX = 4
EXIT_FUEL = 5


def build_arg_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="haskelite", description="tracing interpreter")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="trace the evaluation of an expression")
    run.add_argument("file", help="program file (Haskell subset)")
    run.add_argument("-e", "--expr", required=True, help="expression to evaluate")
    run.add_argument("--json", action="store_true", help="emit the trace as JSON")
    run.add_argument("--fuel", type=int, default=100_000, help="machine step budget")
    run.add_argument("--dots", type=int, default=4, help="dots per hidden level")
    run.add_argument(
        "--no-force",
        action="store_true",
        help="stop at weak head normal form instead of forcing the result",
    )
    run.add_argument(
        "--machine-steps",
        action="store_true",
        help="debug mode: show every machine transition",
    )

    tq = sub.add_parser("type", help="infer the type of an expression")
    tq.add_argument("-e", "--expr", required=True, help="expression to type")
    tq.add_argument("file", nargs="?", help="optional program file for context")

    serve = sub.add_parser("serve", help="start the HTTP stepping service")
    serve.add_argument(
        "--port",
        type=int,
        default=None,
        help="port to listen on (default: $HASKELITE_PORT or 8000)",
    )
    serve.add_argument("--host", default="127.0.0.1")
    return p


def format_plain(entries: List[TraceEntry]) -> str:
    lines: List[str] = []
    for i, entry in enumerate(entries):
        if i == 0:
            lines.append(f"  {entry.rendered}")
        else:
            lines.append(f"  {{ {entry.justification} }}")
            lines.append(f"= {entry.rendered}")
    return "\n".join(lines)


def format_json(entries: List[TraceEntry]) -> str:
    return json.dumps([e.to_json() for e in entries], indent=2)


def _read_program(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as err:
        print(f"haskelite: cannot read {path}: {err}", file=sys.stderr)
        raise SystemExit(EXIT_SYNTAX)


def _load(source: str):
    try:
        return load_program(source)
    except LoadError as err:
        d = err.diagnostic
        pos = f" at line {d.line}" if d.line else ""
        print(f"haskelite: {d.kind} error{pos}: {d.message}", file=sys.stderr)
        raise SystemExit(EXIT_SYNTAX if d.kind == "syntax" else EXIT_TYPE)


def cmd_run(args) -> int:
    program = _load(_read_program(args.file))
    for w in program.warnings:
        print(f"haskelite: warning: {w}", file=sys.stderr)
    try:
        entry, _scheme = prepare_entry(program, args.expr)
    except LoadError as err:
        d = err.diagnostic
        print(f"haskelite: {d.kind} error in expression: {d.message}", file=sys.stderr)
        return EXIT_SYNTAX if d.kind == "syntax" else EXIT_TYPE

    opts = TraceOptions(
        show_machine_steps=args.machine_steps,
        force_result=not args.no_force,
        dots_per_level=args.dots,
        fuel=args.fuel,
    )
    tracer = Tracer(program.heap, program.global_names, entry, opts, program.supply)
    entries = list(tracer.entries_iter())

    print(format_json(entries) if args.json else format_plain(entries))

    if tracer.status == STATUS_FUEL:
        print("haskelite: fuel exhausted", file=sys.stderr)
        return EXIT_FUEL
    if tracer.status == STATUS_FAILED:
        print(f"haskelite: {entries[-1].justification}", file=sys.stderr)
        return EXIT_RUNTIME
    if tracer.status == STATUS_DONE:
        return EXIT_OK
    return EXIT_INTERNAL


def cmd_type(args) -> int:
    source = _read_program(args.file) if args.file else ""
    program = _load(source)
    try:
        _entry, scheme = prepare_entry(program, args.expr)
    except LoadError as err:
        d = err.diagnostic
        print(f"haskelite: {d.kind} error: {d.message}", file=sys.stderr)
        return EXIT_SYNTAX if d.kind == "syntax" else EXIT_TYPE
    print(render_scheme(scheme))
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    port = args.port
    if port is None:
        port = int(os.environ.get("HASKELITE_PORT", "8000"))
    uvicorn.run(create_app(), host=args.host, port=port)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = build_arg_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "type":
            return cmd_type(args)
        if args.command == "serve":
            return cmd_serve(args)
    except SystemExit as err:
        return err.code if isinstance(err.code, int) else EXIT_INTERNAL
    return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
