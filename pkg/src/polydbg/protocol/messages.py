"""Control-channel codec: JSON text messages, one object per message.

Every message is a JSON object whose "type" field names the kind in
kebab-case. decode(encode(m)) == m for all well-formed messages.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from polydbg.lang.ast import TaggedLocation
from polydbg.location import SourceLocation
from polydbg.protocol.catalog import (
    ActivityType,
    BreakpointType,
    DynamicScopeType,
    MetaDataCatalog,
    PassiveEntityType,
    ReceiveOpType,
    SendOpType,
    SteppingType,
)


class MalformedMessage(ValueError):
    pass


@dataclass(frozen=True)
class Metadata:
    catalog: MetaDataCatalog


@dataclass(frozen=True)
class Source:
    uri: str
    text: str
    tagged_locations: tuple[TaggedLocation, ...]


@dataclass(frozen=True)
class BreakpointUpdate:
    name: str
    location: SourceLocation
    enabled: bool


@dataclass(frozen=True)
class Stopped:
    activity_id: int
    activity_type: str
    location: SourceLocation
    scopes: tuple[tuple[str, int], ...]  # (scope type label, scope id), innermost last


@dataclass(frozen=True)
class Step:
    activity_id: int
    step: str


@dataclass(frozen=True)
class Symbols:
    entries: tuple[tuple[int, str], ...]


@dataclass(frozen=True)
class Launch:
    pass


@dataclass(frozen=True)
class StackTraceRequest:
    activity_id: int


@dataclass(frozen=True)
class StackFrame:
    method_name_symbol: int
    location: SourceLocation


@dataclass(frozen=True)
class StackTraceResponse:
    activity_id: int
    state: str  # Running | Suspended | Blocked | Completed
    frames: tuple[StackFrame, ...]  # innermost first


@dataclass(frozen=True)
class VariablesRequest:
    activity_id: int
    frame_index: int


@dataclass(frozen=True)
class VariablesResponse:
    activity_id: int
    frame_index: int
    variables: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class ProgramExit:
    status: int


ControlMessage = (
    Metadata | Source | BreakpointUpdate | Stopped | Step | Symbols | Launch
    | StackTraceRequest | StackTraceResponse | VariablesRequest
    | VariablesResponse | ProgramExit
)


def _loc_json(loc: SourceLocation) -> dict:
    return {"fileSymbol": loc.file_symbol, "line": loc.line,
            "column": loc.column, "length": loc.length}


def _loc_parse(obj) -> SourceLocation:
    try:
        return SourceLocation(obj["fileSymbol"], obj["line"], obj["column"], obj["length"])
    except (KeyError, TypeError) as e:
        raise MalformedMessage(f"bad location: {e}") from None


def catalog_to_json(catalog: MetaDataCatalog) -> dict:
    return {
        "activityTypes": [
            {"id": t.id, "label": t.label, "creationMarker": t.creation_marker,
             "completionMarker": t.completion_marker, "icon": t.icon}
            for t in catalog.activity_types],
        "passiveEntityTypes": [
            {"id": t.id, "label": t.label, "creationMarker": t.creation_marker}
            for t in catalog.passive_entity_types],
        "dynamicScopeTypes": [
            {"id": t.id, "label": t.label, "startMarker": t.start_marker,
             "endMarker": t.end_marker}
            for t in catalog.dynamic_scope_types],
        "sendOpTypes": [
            {"marker": t.marker, "label": t.label, "entityTypeId": t.entity_type_id,
             "targetTypeId": t.target_type_id}
            for t in catalog.send_op_types],
        "receiveOpTypes": [
            {"marker": t.marker, "label": t.label, "sourceTypeId": t.source_type_id}
            for t in catalog.receive_op_types],
        "breakpointTypes": [
            {"name": t.name, "label": t.label, "applicableTags": list(t.applicable_tags)}
            for t in catalog.breakpoint_types],
        "steppingTypes": [
            {"name": t.name, "label": t.label, "applicableTags": list(t.applicable_tags),
             "applicableActivityTypeIds": list(t.applicable_activity_type_ids),
             "applicableScopeTypeIds": list(t.applicable_scope_type_ids)}
            for t in catalog.stepping_types],
    }


def catalog_from_json(obj) -> MetaDataCatalog:
    try:
        return MetaDataCatalog(
            activity_types=tuple(
                ActivityType(t["id"], t["label"], t["creationMarker"],
                             t["completionMarker"], t["icon"])
                for t in obj["activityTypes"]),
            passive_entity_types=tuple(
                PassiveEntityType(t["id"], t["label"], t["creationMarker"])
                for t in obj["passiveEntityTypes"]),
            dynamic_scope_types=tuple(
                DynamicScopeType(t["id"], t["label"], t["startMarker"], t["endMarker"])
                for t in obj["dynamicScopeTypes"]),
            send_op_types=tuple(
                SendOpType(t["marker"], t["label"], t["entityTypeId"], t["targetTypeId"])
                for t in obj["sendOpTypes"]),
            receive_op_types=tuple(
                ReceiveOpType(t["marker"], t["label"], t["sourceTypeId"])
                for t in obj["receiveOpTypes"]),
            breakpoint_types=tuple(
                BreakpointType(t["name"], t["label"], tuple(t["applicableTags"]))
                for t in obj["breakpointTypes"]),
            stepping_types=tuple(
                SteppingType(t["name"], t["label"], tuple(t["applicableTags"]),
                             tuple(t["applicableActivityTypeIds"]),
                             tuple(t["applicableScopeTypeIds"]))
                for t in obj["steppingTypes"]),
        )
    except (KeyError, TypeError) as e:
        raise MalformedMessage(f"bad catalog: {e}") from None


def encode_control(msg: ControlMessage) -> str:
    if isinstance(msg, Metadata):
        obj = {"type": "metadata", **catalog_to_json(msg.catalog)}
    elif isinstance(msg, Source):
        obj = {"type": "source", "uri": msg.uri, "text": msg.text,
               "taggedLocations": [
                   {"location": _loc_json(t.location), "tags": sorted(t.tags)}
                   for t in msg.tagged_locations]}
    elif isinstance(msg, BreakpointUpdate):
        obj = {"type": "breakpoint-update", "name": msg.name,
               "location": _loc_json(msg.location), "enabled": msg.enabled}
    elif isinstance(msg, Stopped):
        obj = {"type": "stopped", "activityId": msg.activity_id,
               "activityType": msg.activity_type, "location": _loc_json(msg.location),
               "scopes": [{"type": label, "id": sid} for label, sid in msg.scopes]}
    elif isinstance(msg, Step):
        obj = {"type": "step", "activityId": msg.activity_id, "step": msg.step}
    elif isinstance(msg, Symbols):
        obj = {"type": "symbols",
               "symbols": [{"id": sym, "text": text} for sym, text in msg.entries]}
    elif isinstance(msg, Launch):
        obj = {"type": "launch"}
    elif isinstance(msg, StackTraceRequest):
        obj = {"type": "stack-trace-request", "activityId": msg.activity_id}
    elif isinstance(msg, StackTraceResponse):
        obj = {"type": "stack-trace-response", "activityId": msg.activity_id,
               "state": msg.state,
               "frames": [{"methodNameSymbol": f.method_name_symbol,
                           "location": _loc_json(f.location)} for f in msg.frames]}
    elif isinstance(msg, VariablesRequest):
        obj = {"type": "variables-request", "activityId": msg.activity_id,
               "frameIndex": msg.frame_index}
    elif isinstance(msg, VariablesResponse):
        obj = {"type": "variables-response", "activityId": msg.activity_id,
               "frameIndex": msg.frame_index,
               "variables": [{"name": n, "value": v} for n, v in msg.variables]}
    elif isinstance(msg, ProgramExit):
        obj = {"type": "program-exit", "status": msg.status}
    else:
        raise TypeError(f"not a control message: {msg!r}")
    return json.dumps(obj, separators=(",", ":"))


def decode_control(text: str) -> ControlMessage:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise MalformedMessage(f"invalid JSON: {e}") from None
    if not isinstance(obj, dict) or "type" not in obj:
        raise MalformedMessage("message must be an object with a 'type' field")
    kind = obj["type"]
    try:
        if kind == "metadata":
            return Metadata(catalog_from_json(obj))
        if kind == "source":
            return Source(obj["uri"], obj["text"], tuple(
                TaggedLocation(_loc_parse(t["location"]), frozenset(t["tags"]))
                for t in obj["taggedLocations"]))
        if kind == "breakpoint-update":
            return BreakpointUpdate(obj["name"], _loc_parse(obj["location"]), obj["enabled"])
        if kind == "stopped":
            return Stopped(obj["activityId"], obj["activityType"],
                           _loc_parse(obj["location"]),
                           tuple((s["type"], s["id"]) for s in obj["scopes"]))
        if kind == "step":
            return Step(obj["activityId"], obj["step"])
        if kind == "symbols":
            return Symbols(tuple((s["id"], s["text"]) for s in obj["symbols"]))
        if kind == "launch":
            return Launch()
        if kind == "stack-trace-request":
            return StackTraceRequest(obj["activityId"])
        if kind == "stack-trace-response":
            return StackTraceResponse(obj["activityId"], obj["state"], tuple(
                StackFrame(f["methodNameSymbol"], _loc_parse(f["location"]))
                for f in obj["frames"]))
        if kind == "variables-request":
            return VariablesRequest(obj["activityId"], obj["frameIndex"])
        if kind == "variables-response":
            return VariablesResponse(obj["activityId"], obj["frameIndex"],
                                     tuple((v["name"], v["value"]) for v in obj["variables"]))
        if kind == "program-exit":
            return ProgramExit(obj["status"])
    except (KeyError, TypeError) as e:
        raise MalformedMessage(f"missing field in {kind!r} message: {e}") from None
    raise MalformedMessage(f"unknown message type {kind!r}")
