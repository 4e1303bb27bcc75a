"""Session host: one debugger client over two WebSocket endpoints.

Control channel (`/control`, subprotocol "kompos-control") carries JSON
messages; the trace channel (`/trace`, "kompos-trace") carries the binary
stream. The two channels race by construction: each has its own writer
and no cross-channel ordering is guaranteed.
"""

from __future__ import annotations

import socket
import sys
import threading

from polydbg.debugger.controller import DebugApiError, SuspensionEvent
from polydbg.protocol import messages as msg
from polydbg.session import DebugSession
from polydbg.wsutil import (
    WebSocketError,
    complete_upgrade,
    read_upgrade_request,
    refuse_connection,
)

CONTROL_SUBPROTOCOL = "kompos-control"
TRACE_SUBPROTOCOL = "kompos-trace"

FLUSH_INTERVAL = 0.1  # seconds


class DebugServer:
    """Bridges exactly one client to a DebugSession."""

    def __init__(self, session: DebugSession, port: int = 7777,
                 host: str = "127.0.0.1", pause_for_launch: bool = True):
        self.session = session
        self.host = host
        self.pause_for_launch = pause_for_launch
        self._listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._listener.bind((host, port))
        self._listener.listen(4)
        self.port = self._listener.getsockname()[1]
        self._lock = threading.Lock()
        self._control = None
        self._trace = None
        self._trace_backlog = bytearray()
        self._shipped = 0  # prefix of the session's cumulative trace already sent
        self._state = "AwaitingClient"
        self._exit_status: int | None = None
        self._done = threading.Event()
        self._shutdown = False
        session.stopped_listener = self._on_stopped
        self._threads: list[threading.Thread] = []

    # --- lifecycle ----------------------------------------------------------

    def start(self):
        for target in (self._accept_loop, self._flush_loop, self._exit_watch):
            thread = threading.Thread(target=target, daemon=True)
            thread.start()
            self._threads.append(thread)
        if not self.pause_for_launch:
            self.session.launch()

    def run(self) -> int:
        """Serve until the program exits; returns its status."""
        self.start()
        self._done.wait()
        return self._exit_status if self._exit_status is not None else 1

    def wait(self, timeout: float | None = None) -> bool:
        return self._done.wait(timeout)

    def close(self):
        self._shutdown = True
        try:
            self._listener.close()
        except OSError:
            pass
        with self._lock:
            for conn in (self._control, self._trace):
                if conn is not None:
                    conn.close()

    # --- connection handling ---------------------------------------------------

    def _accept_loop(self):
        while not self._shutdown:
            try:
                sock, _ = self._listener.accept()
            except OSError:
                return
            threading.Thread(target=self._handle_client, args=(sock,),
                             daemon=True).start()

    def _handle_client(self, sock: socket.socket):
        try:
            path, headers = read_upgrade_request(sock)
        except (WebSocketError, OSError) as e:
            sys.stderr.write(f"handshake failed: {e}\n")
            sock.close()
            return
        if path == "/control":
            with self._lock:
                taken = self._control is not None
            if taken:
                refuse_connection(sock, "a debugger is already attached")
                return
            conn = complete_upgrade(sock, headers)
            with self._lock:
                self._control = conn
            self._init_client()
            self._control_reader(conn)
        elif path == "/trace":
            with self._lock:
                taken = self._trace is not None
            if taken:
                refuse_connection(sock, "a trace client is already attached")
                return
            conn = complete_upgrade(sock, headers)
            with self._lock:
                self._trace = conn
                backlog = bytes(self._trace_backlog)
                self._trace_backlog.clear()
            if backlog:
                self._send_trace(backlog)
        else:
            refuse_connection(sock, f"unknown endpoint {path}")

    def _init_client(self):
        """Metadata, then sources, then the initial symbol batch."""
        session = self.session
        self._send_control(msg.Metadata(session.catalog))
        self._send_control(msg.Source(session.unit.uri, session.unit.text,
                                      tuple(session.tagged_locations())))
        self._send_symbols()
        self._state = "Initialized"

    def _control_reader(self, conn):
        while True:
            received = conn.recv()
            if received is None:
                self._client_gone()
                return
            opcode, payload = received
            try:
                message = msg.decode_control(payload.decode())
            except (msg.MalformedMessage, UnicodeDecodeError) as e:
                sys.stderr.write(f"bad control message: {e}\n")
                continue
            self._dispatch(message)

    def _dispatch(self, message):
        session = self.session
        try:
            if isinstance(message, msg.Launch):
                if self._state == "Initialized":
                    self._state = "Launched"
                    session.launch()
            elif isinstance(message, msg.BreakpointUpdate):
                if message.enabled:
                    session.install_breakpoint(message.name, message.location)
                else:
                    session.remove_breakpoint(message.name, message.location)
            elif isinstance(message, msg.Step):
                session.step(message.activity_id, message.step)
            elif isinstance(message, msg.StackTraceRequest):
                state, frames = session.stack_trace(message.activity_id)
                self._send_control(msg.StackTraceResponse(
                    message.activity_id, state, tuple(frames)))
            elif isinstance(message, msg.VariablesRequest):
                variables = session.variables(message.activity_id, message.frame_index)
                self._send_control(msg.VariablesResponse(
                    message.activity_id, message.frame_index, tuple(variables)))
        except DebugApiError as e:
            sys.stderr.write(f"debug request failed: {e}\n")

    def _client_gone(self):
        """Program continues headless: breakpoints cleared, all resumed."""
        with self._lock:
            self._control = None
        self.session.controller.clear_breakpoints()
        self.session.controller.resume_all()
        if self._state in ("AwaitingClient", "Initialized"):
            self._state = "Launched"
            self.session.launch()

    # --- outbound ---------------------------------------------------------------

    def _send_control(self, message):
        with self._lock:
            conn = self._control
        if conn is None:
            return
        try:
            conn.send_text(msg.encode_control(message))
        except WebSocketError:
            pass

    def _send_trace(self, data: bytes):
        with self._lock:
            conn = self._trace
            if conn is None:
                self._trace_backlog.extend(data)
                return
        try:
            conn.send_binary(data)
        except WebSocketError:
            with self._lock:
                self._trace = None
                self._trace_backlog.extend(data)

    def _send_symbols(self):
        entries = self.session.symbols.drain_new()
        if entries:
            self._send_control(msg.Symbols(tuple(entries)))

    def _flush_trace(self):
        data = self.session.trace_bytes()  # cumulative; drains safely anywhere
        with self._lock:
            new = data[self._shipped:]
            self._shipped = len(data)
        if new:
            self._send_trace(new)

    def _flush_loop(self):
        while not self._done.is_set() and not self._shutdown:
            self._flush_trace()
            self._done.wait(FLUSH_INTERVAL)

    def _on_stopped(self, event: SuspensionEvent):
        # the client's trace view must be current at every halt
        self._flush_trace()
        self._send_symbols()
        self._send_control(msg.Stopped(event.activity_id, event.activity_type,
                                       event.location, event.scopes))

    def _exit_watch(self):
        self.session.launched.wait()
        status = self.session.wait_exit()
        self._flush_trace()
        self._send_symbols()
        self._send_control(msg.ProgramExit(status))
        self._exit_status = status
        self._state = "Exited"
        self._done.set()
        # give the OS a moment to flush, then drop the client
        threading.Timer(0.2, self.close).start()
