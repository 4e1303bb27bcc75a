"""One debuggable program run: parse, execute, suspend, trace.

The session is the in-process debug API. The WebSocket server is a thin
bridge over it; tests drive it directly.
"""

from __future__ import annotations

import queue
import threading

from polydbg.debugger.controller import DebugController, SuspensionEvent
from polydbg.debugger.tracebuf import TraceRecorder
from polydbg.lang import SourceUnit, collect_tagged_locations, parse
from polydbg.location import SourceLocation
from polydbg.protocol.catalog import MetaDataCatalog, shipped_catalog
from polydbg.protocol.messages import StackFrame
from polydbg.protocol.symbols import SymbolTable
from polydbg.protocol.tracebin import TraceCodec
from polydbg.runtime.entities import EntityRegistry, StopToken
from polydbg.runtime.interpreter import Interpreter, value_str


class DebugSession:
    def __init__(self, unit: SourceUnit, printer=None,
                 catalog: MetaDataCatalog | None = None):
        self.unit = unit
        self.symbols = SymbolTable()
        self.catalog = catalog or shipped_catalog()
        self.program = parse(unit, self.symbols)
        self.registry = EntityRegistry()
        self.stop_token = StopToken()
        self.codec = TraceCodec(self.catalog)
        self.recorder = TraceRecorder(self.codec)
        self.controller = DebugController(self.program, self.catalog, self.symbols,
                                          self.registry, self.recorder, self.stop_token)
        self.output: list[str] = []
        self._print_lock = threading.Lock()
        self.interp = Interpreter(self.program, self.registry, self.controller,
                                  self.stop_token, printer or self._collect_print)
        self.stopped_events: queue.Queue[SuspensionEvent] = queue.Queue()
        self.stopped_listener = None  # extra callback, e.g. the server
        self.controller.on_stopped = self._on_stopped
        self.main_record = None
        self.launched = threading.Event()
        self._trace_all = bytearray()
        self._trace_lock = threading.Lock()

    def _collect_print(self, text: str):
        with self._print_lock:
            self.output.append(text)

    @property
    def errors(self):
        return self.interp.errors

    def _on_stopped(self, event: SuspensionEvent):
        self.stopped_events.put(event)
        if self.stopped_listener:
            self.stopped_listener(event)

    # --- program control ---------------------------------------------------

    def launch(self):
        if self.main_record is None:
            self.main_record = self.interp.start_main()
            self.launched.set()
        return self.main_record

    def wait_exit(self, timeout: float | None = None) -> int:
        status = self.interp.wait_exit(timeout)
        self.drain_trace()
        return status

    def stop_program(self):
        self.stop_token.set()
        self.controller.resume_all()

    # --- debug API -----------------------------------------------------------

    def tagged_locations(self):
        return collect_tagged_locations(self.program)

    def install_breakpoint(self, name: str, location: SourceLocation, enabled=True):
        self.controller.install_breakpoint(name, location, enabled)

    def remove_breakpoint(self, name: str, location: SourceLocation):
        self.controller.remove_breakpoint(name, location)

    def step(self, activity_id: int, step_name: str):
        self.controller.request_step(activity_id, step_name)

    def next_stop(self, timeout: float = 10.0) -> SuspensionEvent:
        return self.stopped_events.get(timeout=timeout)

    def stack_trace(self, activity_id: int) -> tuple[str, list[StackFrame]]:
        record = self.registry.activity(activity_id)
        if record is None:
            return "Unknown", []
        if record.state == "Completed":
            state = "Completed"
        elif record.state == "Suspended":
            state = "Suspended"
        elif record.blocked_on is not None:
            state = "Blocked"
        else:
            state = "Running"
        frames = [StackFrame(self.symbols.intern(f.fn.name), f.loc)
                  for f in reversed(record.frames)]
        return state, frames

    def variables(self, activity_id: int, frame_index: int) -> list[tuple[str, str]]:
        record = self.registry.activity(activity_id)
        if record is None:
            return []
        frames = list(reversed(record.frames))
        if not 0 <= frame_index < len(frames):
            return []
        env = frames[frame_index].env
        return [(name, value_str(value)) for name, value in list(env.items())]

    # --- trace access ---------------------------------------------------------

    def drain_trace(self) -> bytes:
        chunk = self.recorder.drain()
        with self._trace_lock:
            self._trace_all.extend(chunk)
        return chunk

    def trace_bytes(self) -> bytes:
        self.drain_trace()
        with self._trace_lock:
            return bytes(self._trace_all)

    def trace_events(self) -> list:
        return self.codec.decode_stream(self.trace_bytes())
