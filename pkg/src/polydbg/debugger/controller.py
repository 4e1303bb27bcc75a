"""Suspension controller: breakpoints, stepping requests, one-shot flags.

The runtime calls `hook` at every halt-point phase. A hook suspends its
own activity only; everything else keeps running. Cross-activity stepping
is realized by planting one-shot flags (in the registry here, or as marks
on runtime objects such as messages and promises) that force a later hook
to halt exactly once.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

from polydbg.debugger import phases
from polydbg.debugger.tracebuf import TraceRecorder
from polydbg.lang.ast import Program
from polydbg.location import SourceLocation
from polydbg.protocol import tracebin
from polydbg.protocol.applicability import applicable_stepping_ops
from polydbg.protocol.catalog import MetaDataCatalog
from polydbg.protocol.symbols import SymbolTable
from polydbg.runtime.entities import (
    ActivityRecord,
    ActivityTerminated,
    EntityRegistry,
    ScopeInstance,
    StopToken,
    wait_for,
)

SEQUENTIAL_STEPS = ("step-into", "step-over", "return")


class DebugApiError(Exception):
    pass


class UnknownBreakpointType(DebugApiError):
    pass


class IncompatibleLocation(DebugApiError):
    pass


class NotSuspended(DebugApiError):
    pass


class UnknownSteppingType(DebugApiError):
    pass


class NotApplicable(DebugApiError):
    pass


@dataclass(frozen=True)
class SuspensionEvent:
    activity_id: int
    activity_type: str
    location: SourceLocation  # where execution stands
    scopes: tuple[tuple[str, int], ...]  # (scope type, scope id), innermost last
    phase: str
    match_location: SourceLocation  # the tagged location breakpoints matched on
    tags: frozenset[str]


@dataclass(frozen=True)
class OneShotFlag:
    phase: str
    target: int  # entity or activity id the flagged hook must involve
    requester: int


@dataclass
class _Gate:
    cond: threading.Condition = field(default_factory=threading.Condition)
    resumed: bool = True


class DebugController:
    def __init__(self, program: Program, catalog: MetaDataCatalog,
                 symbols: SymbolTable, registry: EntityRegistry,
                 recorder: TraceRecorder, stop: StopToken):
        self.program = program
        self.catalog = catalog
        self.symbols = symbols
        self.registry = registry
        self.recorder = recorder
        self.stop = stop
        self.on_stopped = None  # callable(SuspensionEvent), set by the session
        self._lock = threading.Lock()
        self._bp_index: dict[tuple[str, tuple], list[str]] = {}
        self._installed: dict[tuple[str, tuple], bool] = {}  # (name, loc key) -> enabled
        self._flags: dict[tuple[str, int], OneShotFlag] = {}
        self._seq: dict[int, tuple[str, int]] = {}  # activity -> (kind, base depth)
        self._pause: set[int] = set()
        self._gates: dict[int, _Gate] = {}
        self._suspensions: dict[int, SuspensionEvent] = {}
        self._activity_type_ids = {t.label: t.id for t in catalog.activity_types}
        self._scope_type_ids = {t.label: t.id for t in catalog.dynamic_scope_types}
        self._send_labels = {t.label for t in catalog.send_op_types}
        self._recv_labels = {t.label for t in catalog.receive_op_types}

    # --- breakpoints -------------------------------------------------------

    def install_breakpoint(self, name: str, location: SourceLocation, enabled: bool = True):
        bp_type = self.catalog.breakpoint_type(name)
        if bp_type is None:
            raise UnknownBreakpointType(name)
        tags = self.program.tags_at(location)
        if not set(bp_type.applicable_tags) & tags:
            raise IncompatibleLocation(
                f"{name} needs one of {bp_type.applicable_tags}, location has {sorted(tags)}")
        with self._lock:
            self._installed[(name, location.key())] = enabled
            self._rebuild_index()

    def remove_breakpoint(self, name: str, location: SourceLocation):
        with self._lock:
            self._installed.pop((name, location.key()), None)
            self._rebuild_index()

    def clear_breakpoints(self):
        with self._lock:
            self._installed.clear()
            self._rebuild_index()

    def _rebuild_index(self):
        index: dict[tuple[str, tuple], list[str]] = {}
        for (name, key), enabled in self._installed.items():
            if enabled:
                index.setdefault((phases.BREAKPOINT_PHASE[name], key), []).append(name)
        self._bp_index = index  # atomic replace; hook reads without the lock

    # --- one-shot flags ----------------------------------------------------

    def plant_flag(self, phase: str, target: int, requester: int):
        with self._lock:
            self._flags[(phase, target)] = OneShotFlag(phase, target, requester)

    def _take_flags(self, phase: str, ids: tuple[int, ...]) -> bool:
        if not self._flags:
            return False
        with self._lock:
            hit = False
            for entity_id in ids:
                if self._flags.pop((phase, entity_id), None) is not None:
                    hit = True
            return hit

    # --- the hook ----------------------------------------------------------

    def hook(self, record: ActivityRecord, phase: str, match_loc: SourceLocation,
             report_loc: SourceLocation | None = None,
             involved: tuple[int, ...] = (), forced: bool = False):
        self.stop.check()
        report_loc = report_loc or match_loc
        key = (phase, match_loc.key())
        want_attention = record.id in self._pause or record.id in self._seq
        if not (forced or want_attention or self._flags or key in self._bp_index):
            return

        halt = forced
        if key in self._bp_index:
            halt = True
        if self._take_flags(phase, involved + (record.id,)):
            halt = True
        if record.id in self._pause:
            halt = True
            with self._lock:
                self._pause.discard(record.id)
        seq = self._seq.get(record.id)
        if seq and phase == phases.STATEMENT:
            kind, base = seq
            depth = len(record.frames)
            if (kind == "step-into"
                    or (kind == "step-over" and depth <= base)
                    or (kind == "return" and depth < base)):
                halt = True
                with self._lock:
                    self._seq.pop(record.id, None)
        if halt:
            self._suspend(record, phase, match_loc, report_loc)

    def _suspend(self, record: ActivityRecord, phase: str,
                 match_loc: SourceLocation, report_loc: SourceLocation):
        event = SuspensionEvent(
            activity_id=record.id,
            activity_type=record.kind,
            location=report_loc,
            scopes=tuple(record.scope_labels()),
            phase=phase,
            match_location=match_loc,
            tags=self.program.tags_at(match_loc),
        )
        gate = self._gate(record.id)
        with gate.cond:
            gate.resumed = False
            record.state = "Suspended"
            self._suspensions[record.id] = event
            if self.on_stopped:
                self.on_stopped(event)
            try:
                wait_for(gate.cond, lambda: gate.resumed, self.stop)
            finally:
                record.state = "Running"
                self._suspensions.pop(record.id, None)

    def _gate(self, activity_id: int) -> _Gate:
        with self._lock:
            if activity_id not in self._gates:
                self._gates[activity_id] = _Gate()
            return self._gates[activity_id]

    def _resume_gate(self, activity_id: int):
        gate = self._gate(activity_id)
        with gate.cond:
            gate.resumed = True
            gate.cond.notify_all()

    def resume_all(self):
        with self._lock:
            gates = list(self._gates.values())
        for gate in gates:
            with gate.cond:
                gate.resumed = True
                gate.cond.notify_all()

    def suspension_of(self, activity_id: int) -> SuspensionEvent | None:
        return self._suspensions.get(activity_id)

    # --- stepping ----------------------------------------------------------

    def request_step(self, activity_id: int, step_name: str):
        step_type = self.catalog.stepping_type(step_name)
        if step_type is None:
            raise UnknownSteppingType(step_name)
        if step_name == "stop":
            self.stop.set()
            self.resume_all()
            return
        record = self.registry.activity(activity_id)
        if record is None:
            raise NotApplicable(f"no activity {activity_id}")

        if step_name == "pause":
            if record.state != "Running":
                raise NotSuspended(f"activity {activity_id} is not running")
            with self._lock:
                self._pause.add(activity_id)
            return

        suspension = self._suspensions.get(activity_id)
        if record.state != "Suspended" or suspension is None:
            raise NotSuspended(f"activity {activity_id} is not suspended")

        applicable = applicable_stepping_ops(
            suspension.tags, record.kind,
            [label for label, _ in suspension.scopes], self.catalog)
        if step_name not in applicable:
            raise NotApplicable(f"{step_name} does not apply here")

        if step_name == "resume":
            with self._lock:
                self._seq.pop(activity_id, None)
                self._pause.discard(activity_id)
        elif step_name in SEQUENTIAL_STEPS:
            with self._lock:
                self._seq[activity_id] = (step_name, len(record.frames))
        elif step_name == "step-into-activity":
            record.flag_next_spawn = True
        elif step_name == "return-from-activity":
            self.plant_flag(phases.AFTER_JOIN, record.id, record.id)
        elif step_name == "step-to-message-receiver":
            record.flag_next_send = "receiver"
        elif step_name == "step-to-promise-resolver":
            record.flag_next_send = "resolver"
        elif step_name == "step-to-promise-resolution":
            record.flag_next_send = "resolution"
        elif step_name == "step-to-next-turn":
            record.halt_next_turn = True
        elif step_name == "return-from-turn-to-resolution":
            turn = record.innermost_scope("Turn")
            msg = turn.extra if turn else None
            promise = getattr(msg, "promise", None)
            if promise is None:
                raise NotApplicable("current turn resolves no promise")
            promise.halt_handlers = True
        elif step_name == "step-to-channel-receiver":
            record.flag_next_channel_send = True
        elif step_name == "step-to-channel-sender":
            record.flag_next_channel_receive = True
        elif step_name == "step-to-next-transaction":
            self.plant_flag(phases.BEFORE_TRANSACTION, record.id, record.id)
        elif step_name == "step-to-commit":
            self.plant_flag(phases.BEFORE_COMMIT, record.id, record.id)
        elif step_name == "step-after-commit":
            self.plant_flag(phases.AFTER_COMMIT, record.id, record.id)
        elif step_name == "step-to-release":
            monitor = record.innermost_scope("Monitor")
            if monitor is None:
                raise NotApplicable("no monitor scope active")
            self.plant_flag(phases.BEFORE_RELEASE, monitor.extra.id, record.id)
        elif step_name == "step-to-next-acquire":
            monitor = record.innermost_scope("Monitor")
            if monitor is None:
                raise NotApplicable("no monitor scope active")
            self.plant_flag(phases.AFTER_ACQUIRE, monitor.extra.id, record.id)

        self._resume_gate(activity_id)

    # --- trace emission ------------------------------------------------------

    def emit_activity_creation(self, emitter_id: int, record: ActivityRecord):
        self.recorder.emit(emitter_id, tracebin.ActivityCreation(
            self._activity_type_ids[record.kind], record.id,
            self.symbols.intern(record.name), record.creation_loc))

    def emit_activity_completion(self, record: ActivityRecord):
        self.recorder.emit(record.id, tracebin.ActivityCompletion(
            self._activity_type_ids[record.kind]))

    def emit_scope_start(self, record: ActivityRecord, scope: ScopeInstance):
        self.recorder.emit(record.id, tracebin.ScopeStart(
            self._scope_type_ids[scope.scope_type], scope.scope_id, scope.location))

    def emit_scope_end(self, record: ActivityRecord, scope: ScopeInstance):
        self.recorder.emit(record.id, tracebin.ScopeEnd(
            self._scope_type_ids[scope.scope_type]))

    def emit_passive_creation(self, record: ActivityRecord, type_label: str,
                              entity_id: int, location: SourceLocation):
        self.recorder.emit(record.id, tracebin.PassiveEntityCreation(
            self.catalog.passive_type(type_label).id, entity_id, location))

    def emit_send(self, record: ActivityRecord, op_label: str, entity_id: int, target_id: int):
        assert op_label in self._send_labels
        self.recorder.emit(record.id, tracebin.SendOperation(op_label, entity_id, target_id))

    def emit_receive(self, record: ActivityRecord, op_label: str, source_id: int):
        assert op_label in self._recv_labels
        self.recorder.emit(record.id, tracebin.ReceiveOperation(op_label, source_id))
