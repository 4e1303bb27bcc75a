"""CLI behavior: exit codes, tag dumps, trace files, dump-vs-live equality."""

import json
import threading

import pytest

from helpers import SAMPLES, sample_source
from polydbg import cli
from polydbg.protocol import messages as msg
from polydbg.protocol import tracebin as tb
from polydbg.tracefile import read_trace_file
from wsclient import WsClient


def run_cli(argv):
    return cli.main(argv)


def test_headless_run_writes_decodable_trace(tmp_path, capsys):
    out = tmp_path / "t.bin"
    status = run_cli(["run", str(SAMPLES / "pingpong.pd"), "--headless",
                      "--trace-out", str(out)])
    assert status == 0
    catalog, symbols, raw = read_trace_file(out)
    pairs = tb.TraceCodec(catalog).decode_stream(raw)
    creations = [e for _, e in pairs if isinstance(e, tb.ActivityCreation)]
    assert len(creations) >= 2
    assert symbols[0] == ""


def test_parse_error_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.pd"
    bad.write_text("fn main() {\n  let x = ;\n}\n")
    with pytest.raises(SystemExit) as err:
        run_cli(["run", str(bad), "--headless"])
    assert err.value.code == 2
    assert "2:" in capsys.readouterr().err  # message cites line:col


def test_runtime_error_exit_1(tmp_path, capsys):
    bad = tmp_path / "boom.pd"
    bad.write_text("fn main() {\n  let l = lock();\n  release(l);\n}\n")
    assert run_cli(["run", str(bad), "--headless"]) == 1


def test_tags_output(capsys):
    assert run_cli(["tags", str(SAMPLES / "atomic_update.pd")]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert any(line.endswith("Atomic,Keyword") for line in lines)
    for line in lines:
        coords, tags = line.split(" ", 1)
        line_no, col, length = coords.split(":")
        assert int(line_no) >= 1 and int(col) >= 1 and int(length) >= 1
        assert tags


def test_trace_dump_text_empty_main(tmp_path, capsys):
    src = tmp_path / "e.pd"
    src.write_text("fn main() {}\n")
    out = tmp_path / "e.bin"
    run_cli(["run", str(src), "--headless", "--trace-out", str(out)])
    capsys.readouterr()
    assert run_cli(["trace", "dump", str(out)]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 2
    assert "ActivityCreation" in lines[0]
    assert "ActivityCompletion" in lines[1]


def test_trace_dump_json(tmp_path, capsys):
    out = tmp_path / "p.bin"
    run_cli(["run", str(SAMPLES / "promise_chain.pd"), "--headless",
             "--trace-out", str(out)])
    capsys.readouterr()
    assert run_cli(["trace", "dump", str(out), "--format", "json"]) == 0
    records = json.loads(capsys.readouterr().out)
    kinds = {r["event"] for r in records}
    assert "ActivityCreation" in kinds and "SendOperation" in kinds


def test_trace_dump_dot_pingpong(tmp_path, capsys):
    out = tmp_path / "pp.bin"
    run_cli(["run", str(SAMPLES / "pingpong.pd"), "--headless",
             "--trace-out", str(out)])
    capsys.readouterr()
    assert run_cli(["trace", "dump", str(out), "--format", "dot"]) == 0
    dot = capsys.readouterr().out
    assert dot.startswith("digraph")
    assert dot.count("shape=box") == 3  # main + two actors
    assert "style=dashed" in dot  # creation edges
    assert "->" in dot


def test_trace_dump_reports_decode_offset(tmp_path, capsys):
    out = tmp_path / "c.bin"
    run_cli(["run", str(SAMPLES / "empty.pd"), "--headless", "--trace-out", str(out)])
    data = out.read_bytes()
    out.write_bytes(data + bytes([0xEE]))
    capsys.readouterr()
    assert run_cli(["trace", "dump", str(out)]) == 1
    err = capsys.readouterr().err
    assert "byte" in err and "0xEE" in err


def test_dump_equals_live_stream_single_activity(tmp_path, capsys):
    """Headless trace == what a recording client sees, for one activity."""
    program = SAMPLES / "atomic_update.pd"
    out = tmp_path / "w.bin"
    assert run_cli(["run", str(program), "--headless", "--trace-out", str(out)]) == 0
    catalog, _, raw = read_trace_file(out)
    headless_events = tb.TraceCodec(catalog).decode_stream(raw)

    from polydbg.lang import SourceUnit
    from polydbg.server import DebugServer
    from polydbg.session import DebugSession
    session = DebugSession(SourceUnit(str(program), program.read_text()))
    server = DebugServer(session, port=0)
    server.start()
    client = WsClient(server.port)
    client.next_message(msg.Metadata)
    client.send(msg.Launch())
    client.next_message(msg.ProgramExit, timeout=20)
    import time
    time.sleep(0.3)
    live_events = session.codec.decode_stream(client.snapshot_trace())
    client.close()
    server.close()

    strip = lambda pairs: [(aid, e) for aid, e in pairs
                           if not isinstance(e, tb.ActivityContext)]
    assert strip(headless_events) == strip(live_events)
