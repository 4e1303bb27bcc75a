"""Binary trace codec. Little-endian, fixed-width, marker-prefixed.

Record layouts (loc = fileSymbol u16 + line u32 + column u16 + length u16):

    ActivityContext       0x01 + activityId u64
    ActivityCreation      marker + id u64 + nameSymbol u16 + loc
    ActivityCompletion    marker
    ScopeStart            marker + scopeId u64 + loc
    ScopeEnd              marker
    PassiveEntityCreation marker + entityId u64 + loc
    SendOperation         marker + entityId u64 + targetId u64
    ReceiveOperation      marker + sourceId u64

Decoding is driven entirely by the catalog's marker table; events carry
stable type ids / op labels so that streams produced under catalogs with
permuted markers decode to identical event objects.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from polydbg.location import SourceLocation
from polydbg.protocol.catalog import RESERVED_CONTEXT_MARKER, MetaDataCatalog

_LOC = struct.Struct("<HIHH")
_U64 = struct.Struct("<Q")
_U16 = struct.Struct("<H")


class UnknownMarker(ValueError):
    def __init__(self, marker: int, offset: int):
        super().__init__(f"unknown trace marker 0x{marker:02X} at byte {offset}")
        self.marker = marker
        self.offset = offset


class TruncatedStream(ValueError):
    def __init__(self, offset: int):
        super().__init__(f"trace stream truncated at byte {offset}")
        self.offset = offset


@dataclass(frozen=True)
class ActivityContext:
    activity_id: int


@dataclass(frozen=True)
class ActivityCreation:
    activity_type_id: int
    activity_id: int
    name_symbol: int
    location: SourceLocation


@dataclass(frozen=True)
class ActivityCompletion:
    activity_type_id: int


@dataclass(frozen=True)
class ScopeStart:
    scope_type_id: int
    scope_id: int
    location: SourceLocation


@dataclass(frozen=True)
class ScopeEnd:
    scope_type_id: int


@dataclass(frozen=True)
class PassiveEntityCreation:
    entity_type_id: int
    entity_id: int
    location: SourceLocation


@dataclass(frozen=True)
class SendOperation:
    op_label: str
    entity_id: int
    target_id: int


@dataclass(frozen=True)
class ReceiveOperation:
    op_label: str
    source_id: int


TraceEvent = (
    ActivityContext | ActivityCreation | ActivityCompletion | ScopeStart
    | ScopeEnd | PassiveEntityCreation | SendOperation | ReceiveOperation
)


def _pack_loc(loc: SourceLocation) -> bytes:
    return _LOC.pack(loc.file_symbol, loc.line, loc.column, loc.length)


def _unpack_loc(data: bytes, offset: int) -> tuple[SourceLocation, int]:
    if offset + _LOC.size > len(data):
        raise TruncatedStream(offset)
    fs, line, col, length = _LOC.unpack_from(data, offset)
    return SourceLocation(fs, line, col, length), offset + _LOC.size


class TraceCodec:
    """Encoder/decoder bound to one catalog's marker assignment."""

    def __init__(self, catalog: MetaDataCatalog):
        self.catalog = catalog
        self._act_create = {t.id: t.creation_marker for t in catalog.activity_types}
        self._act_complete = {t.id: t.completion_marker for t in catalog.activity_types}
        self._scope_start = {t.id: t.start_marker for t in catalog.dynamic_scope_types}
        self._scope_end = {t.id: t.end_marker for t in catalog.dynamic_scope_types}
        self._passive = {t.id: t.creation_marker for t in catalog.passive_entity_types}
        self._send = {t.label: t.marker for t in catalog.send_op_types}
        self._receive = {t.label: t.marker for t in catalog.receive_op_types}
        self._decoders: dict[int, tuple[str, object]] = {}
        for t in catalog.activity_types:
            self._decoders[t.creation_marker] = ("activity-creation", t.id)
            self._decoders[t.completion_marker] = ("activity-completion", t.id)
        for t in catalog.dynamic_scope_types:
            self._decoders[t.start_marker] = ("scope-start", t.id)
            self._decoders[t.end_marker] = ("scope-end", t.id)
        for t in catalog.passive_entity_types:
            self._decoders[t.creation_marker] = ("passive-creation", t.id)
        for t in catalog.send_op_types:
            self._decoders[t.marker] = ("send", t.label)
        for t in catalog.receive_op_types:
            self._decoders[t.marker] = ("receive", t.label)

    # --- encoding ---------------------------------------------------------

    def encode(self, event: TraceEvent) -> bytes:
        if isinstance(event, ActivityContext):
            return bytes([RESERVED_CONTEXT_MARKER]) + _U64.pack(event.activity_id)
        if isinstance(event, ActivityCreation):
            return (bytes([self._act_create[event.activity_type_id]])
                    + _U64.pack(event.activity_id)
                    + _U16.pack(event.name_symbol)
                    + _pack_loc(event.location))
        if isinstance(event, ActivityCompletion):
            return bytes([self._act_complete[event.activity_type_id]])
        if isinstance(event, ScopeStart):
            return (bytes([self._scope_start[event.scope_type_id]])
                    + _U64.pack(event.scope_id)
                    + _pack_loc(event.location))
        if isinstance(event, ScopeEnd):
            return bytes([self._scope_end[event.scope_type_id]])
        if isinstance(event, PassiveEntityCreation):
            return (bytes([self._passive[event.entity_type_id]])
                    + _U64.pack(event.entity_id)
                    + _pack_loc(event.location))
        if isinstance(event, SendOperation):
            return (bytes([self._send[event.op_label]])
                    + _U64.pack(event.entity_id)
                    + _U64.pack(event.target_id))
        if isinstance(event, ReceiveOperation):
            return bytes([self._receive[event.op_label]]) + _U64.pack(event.source_id)
        raise TypeError(f"not a trace event: {event!r}")

    # --- decoding ---------------------------------------------------------

    def decode_stream(self, data: bytes) -> list[tuple[int, TraceEvent]]:
        """Decode a whole stream into (activityId, event) pairs.

        Context records are returned too; events that follow them belong to
        the context's activity. Events before any context record get
        activity id 0.
        """
        out: list[tuple[int, TraceEvent]] = []
        current = 0
        offset = 0
        n = len(data)

        def u64(at: int) -> tuple[int, int]:
            if at + 8 > n:
                raise TruncatedStream(at)
            return _U64.unpack_from(data, at)[0], at + 8

        while offset < n:
            marker = data[offset]
            offset += 1
            if marker == RESERVED_CONTEXT_MARKER:
                current, offset = u64(offset)
                out.append((current, ActivityContext(current)))
                continue
            entry = self._decoders.get(marker)
            if entry is None:
                raise UnknownMarker(marker, offset - 1)
            kind, key = entry
            if kind == "activity-creation":
                aid, offset = u64(offset)
                if offset + 2 > n:
                    raise TruncatedStream(offset)
                sym = _U16.unpack_from(data, offset)[0]
                offset += 2
                loc, offset = _unpack_loc(data, offset)
                out.append((current, ActivityCreation(key, aid, sym, loc)))
            elif kind == "activity-completion":
                out.append((current, ActivityCompletion(key)))
            elif kind == "scope-start":
                sid, offset = u64(offset)
                loc, offset = _unpack_loc(data, offset)
                out.append((current, ScopeStart(key, sid, loc)))
            elif kind == "scope-end":
                out.append((current, ScopeEnd(key)))
            elif kind == "passive-creation":
                eid, offset = u64(offset)
                loc, offset = _unpack_loc(data, offset)
                out.append((current, PassiveEntityCreation(key, eid, loc)))
            elif kind == "send":
                eid, offset = u64(offset)
                tid, offset = u64(offset)
                out.append((current, SendOperation(key, eid, tid)))
            else:
                sid, offset = u64(offset)
                out.append((current, ReceiveOperation(key, sid)))
        return out
