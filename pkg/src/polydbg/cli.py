"""Command line front end.

    polydbg run FILE [--port N] [--headless] [--trace-out PATH] [--no-pause]
    polydbg tags FILE
    polydbg trace dump PATH [--format text|json|dot]

Exit codes: 0 success, 1 runtime error, 2 parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from polydbg.lang import ParseError, SourceUnit
from polydbg.protocol import tracebin as tb
from polydbg.session import DebugSession
from polydbg.tracefile import TraceFileError, read_trace_file, write_trace_file


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polydbg",
                                     description="multi-model concurrency debugger")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a program, debugged or headless")
    run.add_argument("file")
    run.add_argument("--port", type=int, default=7777)
    run.add_argument("--headless", action="store_true",
                     help="run without a debugger client")
    run.add_argument("--trace-out", metavar="PATH",
                     help="write a self-describing trace file")
    run.add_argument("--no-pause", action="store_true",
                     help="do not wait for a Launch message")

    tags = sub.add_parser("tags", help="dump the tagged-location table")
    tags.add_argument("file")

    trace = sub.add_parser("trace", help="offline trace inspection")
    trace_sub = trace.add_subparsers(dest="trace_command", required=True)
    dump = trace_sub.add_parser("dump", help="decode a trace file")
    dump.add_argument("path")
    dump.add_argument("--format", choices=("text", "json", "dot"), default="text")
    return parser


def load_unit(path: str) -> SourceUnit:
    return SourceUnit(path, Path(path).read_text())


def make_session(path: str) -> DebugSession:
    try:
        return DebugSession(load_unit(path), printer=print)
    except ParseError as e:
        sys.stderr.write(f"{path}:{e.location.line}:{e.location.column}: {e.message}\n")
        raise SystemExit(2) from None


def cmd_run(args) -> int:
    session = make_session(args.file)
    if args.headless:
        session.launch()
        status = session.wait_exit()
        if args.trace_out:
            write_trace_file(args.trace_out, session.catalog,
                             session.symbols.snapshot(), session.trace_bytes())
        return status

    from polydbg.server import DebugServer
    server = DebugServer(session, port=args.port,
                         pause_for_launch=not args.no_pause)
    print(f"listening on ws://127.0.0.1:{server.port}/control "
          f"and ws://127.0.0.1:{server.port}/trace", file=sys.stderr)
    status = server.run()
    if args.trace_out:
        write_trace_file(args.trace_out, session.catalog,
                         session.symbols.snapshot(), session.trace_bytes())
    return status


def cmd_tags(args) -> int:
    session = make_session(args.file)
    for tagged in session.tagged_locations():
        loc = tagged.location
        print(f"{loc.line}:{loc.column}:{loc.length} {','.join(sorted(tagged.tags))}")
    return 0


def _event_json(aid: int, event, symbols: dict[int, str]):
    record = {"activity": aid, "event": type(event).__name__}
    for field, value in vars(event).items():
        if field == "location":
            record["location"] = {"file": symbols.get(value.file_symbol, "?"),
                                  "line": value.line, "column": value.column,
                                  "length": value.length}
        elif field == "name_symbol":
            record["name"] = symbols.get(value, f"#{value}")
        else:
            record[field] = value
    return record


def _dump_text(pairs, symbols):
    for aid, event in pairs:
        if isinstance(event, tb.ActivityContext):
            continue
        record = _event_json(aid, event, symbols)
        kind = record.pop("event")
        record.pop("activity")
        fields = " ".join(f"{k}={v}" for k, v in record.items())
        print(f"[{aid}] {kind} {fields}".rstrip())


def _dump_dot(pairs, symbols, catalog):
    activity_labels = {t.id: t.label for t in catalog.activity_types}
    passive_labels = {t.id: t.label for t in catalog.passive_entity_types}
    nodes: dict[int, str] = {}
    creation_edges: list[tuple[int, int]] = []
    send_edges: dict[tuple[int, int], int] = {}
    send_types = {t.label: t for t in catalog.send_op_types}
    for aid, event in pairs:
        if isinstance(event, tb.ActivityCreation):
            name = symbols.get(event.name_symbol, "?")
            kind = activity_labels.get(event.activity_type_id, "?")
            nodes[event.activity_id] = f'"{event.activity_id}" [shape=box style=rounded label="{kind} {name}"]'
            if aid != event.activity_id:
                creation_edges.append((aid, event.activity_id))
        elif isinstance(event, tb.PassiveEntityCreation):
            kind = passive_labels.get(event.entity_type_id, "?")
            nodes[event.entity_id] = f'"{event.entity_id}" [shape=ellipse label="{kind} {event.entity_id}"]'
            creation_edges.append((aid, event.entity_id))
        elif isinstance(event, tb.SendOperation):
            op = send_types.get(event.op_label)
            target = event.target_id if op else event.target_id
            key = (aid, target)
            send_edges[key] = send_edges.get(key, 0) + 1
    print("digraph trace {")
    for line in nodes.values():
        print(f"  {line}")
    for src, dst in creation_edges:
        print(f'  "{src}" -> "{dst}" [style=dashed color=gray]')
    for (src, dst), count in sorted(send_edges.items()):
        label = f' [label="{count}"]' if count > 1 else ""
        print(f'  "{src}" -> "{dst}"{label}')
    print("}")


def cmd_trace_dump(args) -> int:
    try:
        catalog, symbols, raw = read_trace_file(args.path)
    except (TraceFileError, OSError) as e:
        sys.stderr.write(f"cannot read trace: {e}\n")
        return 1
    codec = tb.TraceCodec(catalog)
    try:
        pairs = codec.decode_stream(raw)
    except (tb.UnknownMarker, tb.TruncatedStream) as e:
        sys.stderr.write(f"decode error: {e}\n")
        return 1
    if args.format == "text":
        _dump_text(pairs, symbols)
    elif args.format == "json":
        records = [_event_json(aid, event, symbols) for aid, event in pairs
                   if not isinstance(event, tb.ActivityContext)]
        print(json.dumps(records, indent=2))
    else:
        _dump_dot(pairs, symbols, catalog)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return cmd_run(args)
    if args.command == "tags":
        return cmd_tags(args)
    return cmd_trace_dump(args)


if __name__ == "__main__":
    sys.exit(main())
