"""Produce the browser client's test fixtures from real runs.

Writes frontend/fixtures/pingpong_trace.json (headless trace with its
catalog and symbols) and frontend/fixtures/recorded_session.json (a full
debug session recorded at the WebSocket boundary, preserving per-channel
arrival order).
"""

from __future__ import annotations

import base64
import json
import sys
import threading
import time
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

from polydbg.lang import SourceUnit
from polydbg.protocol import messages as msg
from polydbg.protocol.messages import catalog_to_json
from polydbg.server import DebugServer
from polydbg.session import DebugSession

FIXTURES = ROOT / "frontend" / "fixtures"


def gen_pingpong():
    src = (ROOT / "samples" / "pingpong.pd").read_text()
    session = DebugSession(SourceUnit("pingpong.pd", src))
    session.launch()
    status = session.wait_exit()
    assert status == 0
    payload = {
        "catalog": catalog_to_json(session.catalog),
        "symbols": {str(k): v for k, v in session.symbols.snapshot().items()},
        "traceBase64": base64.b64encode(session.trace_bytes()).decode(),
    }
    (FIXTURES / "pingpong_trace.json").write_text(json.dumps(payload, indent=1))
    print("pingpong_trace.json written")


def gen_recorded_session():
    from wsclient import WsClient

    src = (ROOT / "samples" / "atomic_update.pd").read_text()
    session = DebugSession(SourceUnit("atomic_update.pd", src))
    server = DebugServer(session, port=0)
    server.start()

    control: list[str] = []
    chunks: list[bytes] = []
    client = WsClient.__new__(WsClient)
    from polydbg.wsutil import connect_websocket
    client.control = connect_websocket("127.0.0.1", server.port, "/control",
                                       "kompos-control")
    client.trace = connect_websocket("127.0.0.1", server.port, "/trace",
                                     "kompos-trace")
    done = threading.Event()
    stops_seen = [0]

    def read_control():
        while True:
            got = client.control.recv()
            if got is None:
                done.set()
                return
            control.append(got[1].decode())
            message = msg.decode_control(got[1].decode())
            if isinstance(message, msg.Stopped):
                stops_seen[0] += 1
                step = "step-into" if stops_seen[0] == 1 else "resume"
                if stops_seen[0] == 2:
                    client.control.send_text(msg.encode_control(
                        msg.BreakpointUpdate("before-transaction", atomic_loc, False)))
                client.control.send_text(msg.encode_control(
                    msg.Step(message.activity_id, step)))
            if isinstance(message, msg.ProgramExit):
                done.set()
                return

    def read_trace():
        while True:
            got = client.trace.recv()
            if got is None:
                return
            chunks.append(got[1])

    threading.Thread(target=read_control, daemon=True).start()
    threading.Thread(target=read_trace, daemon=True).start()

    time.sleep(0.2)
    source = msg.decode_control(control[1])
    atomic_loc = next(t.location for t in source.tagged_locations if "Atomic" in t.tags)
    client.control.send_text(msg.encode_control(
        msg.BreakpointUpdate("before-transaction", atomic_loc, True)))
    client.control.send_text(msg.encode_control(msg.Launch()))
    assert done.wait(timeout=20)
    time.sleep(0.4)  # final trace flush
    client.control.close()
    client.trace.close()
    server.close()

    payload = {
        "control": control,
        "traceChunksBase64": [base64.b64encode(c).decode() for c in chunks],
    }
    (FIXTURES / "recorded_session.json").write_text(json.dumps(payload, indent=1))
    stops = sum(1 for c in control if '"type":"stopped"' in c)
    print(f"recorded_session.json written ({len(control)} control messages, "
          f"{stops} stops, {len(chunks)} trace chunks)")


if __name__ == "__main__":
    FIXTURES.mkdir(parents=True, exist_ok=True)
    gen_pingpong()
    gen_recorded_session()
