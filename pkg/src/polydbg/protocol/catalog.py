"""The runtime's machine-readable self-description.

Everything a client needs to offer breakpoints, stepping, and trace
decoding lives here: entity types with their marker bytes, breakpoint
types keyed by source tags, and stepping types with their applicability
criteria. The client treats all names, labels, and tags as opaque.
"""

from __future__ import annotations

from dataclasses import dataclass, field

RESERVED_CONTEXT_MARKER = 0x01  # prefixes the activity-context record


@dataclass(frozen=True)
class ActivityType:
    id: int
    label: str
    creation_marker: int
    completion_marker: int
    icon: str


@dataclass(frozen=True)
class PassiveEntityType:
    id: int
    label: str
    creation_marker: int


@dataclass(frozen=True)
class DynamicScopeType:
    id: int
    label: str
    start_marker: int
    end_marker: int


@dataclass(frozen=True)
class SendOpType:
    marker: int
    label: str
    entity_type_id: int  # 0 = anonymous ids (e.g. actor messages)
    target_type_id: int


@dataclass(frozen=True)
class ReceiveOpType:
    marker: int
    label: str
    source_type_id: int


@dataclass(frozen=True)
class BreakpointType:
    name: str
    label: str
    applicable_tags: tuple[str, ...]


@dataclass(frozen=True)
class SteppingType:
    name: str
    label: str
    applicable_tags: tuple[str, ...] = ()
    applicable_activity_type_ids: tuple[int, ...] = ()
    applicable_scope_type_ids: tuple[int, ...] = ()


class CatalogError(ValueError):
    pass


@dataclass(frozen=True)
class MetaDataCatalog:
    activity_types: tuple[ActivityType, ...]
    passive_entity_types: tuple[PassiveEntityType, ...]
    dynamic_scope_types: tuple[DynamicScopeType, ...]
    send_op_types: tuple[SendOpType, ...]
    receive_op_types: tuple[ReceiveOpType, ...]
    breakpoint_types: tuple[BreakpointType, ...]
    stepping_types: tuple[SteppingType, ...]

    def __post_init__(self):
        markers = list(self.all_markers())
        if len(markers) != len(set(markers)):
            raise CatalogError("trace markers must be distinct")
        if RESERVED_CONTEXT_MARKER in markers:
            raise CatalogError("marker 0x01 is reserved for the context record")
        if any(m < 0 or m > 0xFF for m in markers):
            raise CatalogError("markers must fit one byte")
        ids = [t.id for t in self.activity_types + self.passive_entity_types + self.dynamic_scope_types]
        if len(ids) != len(set(ids)) or 0 in ids:
            raise CatalogError("entity type ids must be distinct and non-zero")
        names = [b.name for b in self.breakpoint_types] + [s.name for s in self.stepping_types]
        if len(names) != len(set(names)):
            raise CatalogError("breakpoint/stepping names must be distinct")

    def all_markers(self):
        for t in self.activity_types:
            yield t.creation_marker
            yield t.completion_marker
        for t in self.dynamic_scope_types:
            yield t.start_marker
            yield t.end_marker
        for t in self.passive_entity_types:
            yield t.creation_marker
        for t in self.send_op_types:
            yield t.marker
        for t in self.receive_op_types:
            yield t.marker

    # --- lookup helpers (all label/name based) ---------------------------

    def activity_type(self, label: str) -> ActivityType:
        return _by_label(self.activity_types, label)

    def scope_type(self, label: str) -> DynamicScopeType:
        return _by_label(self.dynamic_scope_types, label)

    def passive_type(self, label: str) -> PassiveEntityType:
        return _by_label(self.passive_entity_types, label)

    def send_op(self, label: str) -> SendOpType:
        return _by_label(self.send_op_types, label)

    def receive_op(self, label: str) -> ReceiveOpType:
        return _by_label(self.receive_op_types, label)

    def breakpoint_type(self, name: str) -> BreakpointType | None:
        for b in self.breakpoint_types:
            if b.name == name:
                return b
        return None

    def stepping_type(self, name: str) -> SteppingType | None:
        for s in self.stepping_types:
            if s.name == name:
                return s
        return None


def _by_label(items, label):
    for item in items:
        if item.label == label:
            return item
    raise KeyError(label)


def _kebab(label: str) -> str:
    return "-".join(part for part in "".join(
        ch if ch.isalnum() else " " for ch in label.lower()).split())


def _bp(label: str, *tags: str) -> BreakpointType:
    return BreakpointType(_kebab(label), label, tags)


ANONYMOUS_TYPE_ID = 0

_THREAD, _ACTOR, _PROCESS, _TASK = 1, 2, 3, 4
_MONITOR, _TURN, _TRANSACTION = 5, 6, 7
_LOCK, _CONDITION, _CHANNEL, _PROMISE = 8, 9, 10, 11


def shipped_catalog() -> MetaDataCatalog:
    """The catalog for the five concurrency models this runtime supports."""
    activity_types = (
        ActivityType(_THREAD, "Thread", 0x02, 0x03, "thread"),
        ActivityType(_ACTOR, "Actor", 0x04, 0x05, "actor"),
        ActivityType(_PROCESS, "Process", 0x06, 0x07, "process"),
        ActivityType(_TASK, "Task", 0x08, 0x09, "task"),
    )
    scope_types = (
        DynamicScopeType(_MONITOR, "Monitor", 0x0A, 0x0B),
        DynamicScopeType(_TURN, "Turn", 0x0C, 0x0D),
        DynamicScopeType(_TRANSACTION, "Transaction", 0x0E, 0x0F),
    )
    passive_types = (
        PassiveEntityType(_LOCK, "Lock", 0x10),
        PassiveEntityType(_CONDITION, "Condition", 0x11),
        PassiveEntityType(_CHANNEL, "Channel", 0x12),
        PassiveEntityType(_PROMISE, "Promise", 0x13),
    )
    send_ops = (
        SendOpType(0x14, "ActorMessageSend", ANONYMOUS_TYPE_ID, _ACTOR),
        SendOpType(0x15, "PromiseResolve", _PROMISE, _PROMISE),
        SendOpType(0x16, "ChannelSend", _CHANNEL, _CHANNEL),
        SendOpType(0x17, "LockAcquire", _LOCK, _LOCK),
        SendOpType(0x18, "ConditionSignal", _CONDITION, _CONDITION),
    )
    receive_ops = (
        ReceiveOpType(0x19, "ChannelReceive", _CHANNEL),
        ReceiveOpType(0x1A, "ThreadJoin", _THREAD),
        ReceiveOpType(0x1B, "ProcessJoin", _PROCESS),
        ReceiveOpType(0x1C, "TaskJoin", _TASK),
        ReceiveOpType(0x1D, "LockRelease", _LOCK),
        ReceiveOpType(0x1E, "ConditionWait", _CONDITION),
    )
    breakpoints = (
        _bp("activity creation", "ActivityCreation"),
        _bp("activity execution", "ActivityCreation"),
        _bp("before join", "ActivityJoin"),
        _bp("after join", "ActivityJoin"),
        _bp("actor message send", "EventualMessageSend"),
        _bp("actor message receiver", "EventualMessageSend"),
        _bp("before async. method activation", "EventualMessageSend"),
        _bp("after async. method activation", "EventualMessageSend"),
        _bp("before promise resolution", "PromiseCreation"),
        _bp("on promise resolution", "PromiseCreation"),
        _bp("before channel send", "ChannelWrite"),
        _bp("after channel receive", "ChannelWrite"),
        _bp("before channel receive", "ChannelRead"),
        _bp("after channel send", "ChannelRead"),
        _bp("before transaction", "Atomic"),
        _bp("before commit", "Atomic"),
        _bp("after commit", "Atomic"),
        _bp("before acquire", "AcquireLock"),
        _bp("after acquire", "AcquireLock"),
        _bp("before release", "ReleaseLock"),
        _bp("after release", "ReleaseLock"),
    )

    def step(label: str, tags=(), activities=(), scopes=()) -> SteppingType:
        return SteppingType(_kebab(label), label, tuple(tags), tuple(activities), tuple(scopes))

    stepping = (
        step("resume"),
        step("pause"),
        step("stop"),
        step("step into"),
        step("step over"),
        step("return"),
        step("step into activity", tags=("ActivityCreation",)),
        step("return from activity", activities=(_PROCESS, _TASK)),
        step("step to message receiver", tags=("EventualMessageSend",)),
        step("step to promise resolver", tags=("PromiseCreation",)),
        step("step to promise resolution", tags=("PromiseCreation",)),
        step("step to next turn", activities=(_ACTOR,)),
        step("return from turn to resolution", activities=(_ACTOR,)),
        step("step to channel receiver", tags=("ChannelWrite",)),
        step("step to channel sender", tags=("ChannelRead",)),
        step("step to next transaction", scopes=(_TRANSACTION,)),
        step("step to commit", scopes=(_TRANSACTION,)),
        step("step after commit", scopes=(_TRANSACTION,)),
        step("step to release", scopes=(_MONITOR,)),
        step("step to next acquire", scopes=(_MONITOR,)),
    )
    return MetaDataCatalog(
        activity_types=activity_types,
        passive_entity_types=passive_types,
        dynamic_scope_types=scope_types,
        send_op_types=send_ops,
        receive_op_types=receive_ops,
        breakpoint_types=breakpoints,
        stepping_types=stepping,
    )
