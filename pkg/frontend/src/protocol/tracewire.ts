/**
 * Binary trace decoder. Little-endian, marker-prefixed records; the
 * marker table comes entirely from the catalog, so streams from runtimes
 * with different marker assignments decode with the same code.
 */

import { Catalog } from "./catalog.js";

export const CONTEXT_MARKER = 0x01;

export interface SourceLoc {
  fileSymbol: number;
  line: number;
  column: number;
  length: number;
}

export type TraceEvent =
  | { kind: "context"; activityId: number }
  | { kind: "creation"; activityTypeId: number; activityId: number;
      nameSymbol: number; location: SourceLoc }
  | { kind: "completion"; activityTypeId: number }
  | { kind: "scope-start"; scopeTypeId: number; scopeId: number; location: SourceLoc }
  | { kind: "scope-end"; scopeTypeId: number }
  | { kind: "passive"; entityTypeId: number; entityId: number;
      location: SourceLoc }
  | { kind: "send"; opLabel: string; entityId: number; targetId: number }
  | { kind: "receive"; opLabel: string; sourceId: number };

export interface ActivityEvent {
  activityId: number;
  event: TraceEvent;
}

type Decoder = { kind: string; key: number | string };

function markerTable(catalog: Catalog): Map<number, Decoder> {
  const table = new Map<number, Decoder>();
  for (const t of catalog.activityTypes) {
    table.set(t.creationMarker, { kind: "creation", key: t.id });
    table.set(t.completionMarker, { kind: "completion", key: t.id });
  }
  for (const t of catalog.dynamicScopeTypes) {
    table.set(t.startMarker, { kind: "scope-start", key: t.id });
    table.set(t.endMarker, { kind: "scope-end", key: t.id });
  }
  for (const t of catalog.passiveEntityTypes) {
    table.set(t.creationMarker, { kind: "passive", key: t.id });
  }
  for (const t of catalog.sendOpTypes) {
    table.set(t.marker, { kind: "send", key: t.label });
  }
  for (const t of catalog.receiveOpTypes) {
    table.set(t.marker, { kind: "receive", key: t.label });
  }
  return table;
}

const LOC_BYTES = 10;

class Reader {
  private view: DataView;
  offset = 0;
  constructor(private data: Uint8Array) {
    this.view = new DataView(data.buffer, data.byteOffset, data.byteLength);
  }
  get remaining(): number {
    return this.data.length - this.offset;
  }
  u8(): number {
    return this.data[this.offset++];
  }
  u16(): number {
    const v = this.view.getUint16(this.offset, true);
    this.offset += 2;
    return v;
  }
  u32(): number {
    const v = this.view.getUint32(this.offset, true);
    this.offset += 4;
    return v;
  }
  u64(): number {
    const v = this.view.getBigUint64(this.offset, true);
    this.offset += 8;
    return Number(v);
  }
  loc(): SourceLoc {
    return { fileSymbol: this.u16(), line: this.u32(),
             column: this.u16(), length: this.u16() };
  }
}

const RECORD_SIZE: Record<string, number> = {
  "creation": 8 + 2 + LOC_BYTES,
  "completion": 0,
  "scope-start": 8 + LOC_BYTES,
  "scope-end": 0,
  "passive": 8 + LOC_BYTES,
  "send": 16,
  "receive": 8,
};

export interface PartialDecode {
  events: ActivityEvent[];
  consumed: number;
  lastContext: number;
}

/**
 * Decode as many complete records as the buffer holds; a trailing partial
 * record is left for the next chunk. Unknown markers throw.
 */
export function decodePartial(data: Uint8Array, catalog: Catalog,
                              startContext = 0): PartialDecode {
  const table = markerTable(catalog);
  const reader = new Reader(data);
  const events: ActivityEvent[] = [];
  let current = startContext;
  let consumed = 0;
  while (reader.remaining > 0) {
    const marker = reader.u8();
    if (marker === CONTEXT_MARKER) {
      if (reader.remaining < 8) break;
      current = reader.u64();
      events.push({ activityId: current, event: { kind: "context", activityId: current } });
      consumed = reader.offset;
      continue;
    }
    const entry = table.get(marker);
    if (entry === undefined) {
      throw new Error(`unknown trace marker 0x${marker.toString(16)} at byte ${reader.offset - 1}`);
    }
    if (reader.remaining < RECORD_SIZE[entry.kind]) break;
    let event: TraceEvent;
    switch (entry.kind) {
      case "creation":
        event = { kind: "creation", activityTypeId: entry.key as number,
                  activityId: reader.u64(), nameSymbol: reader.u16(), location: reader.loc() };
        break;
      case "completion":
        event = { kind: "completion", activityTypeId: entry.key as number };
        break;
      case "scope-start":
        event = { kind: "scope-start", scopeTypeId: entry.key as number,
                  scopeId: reader.u64(), location: reader.loc() };
        break;
      case "scope-end":
        event = { kind: "scope-end", scopeTypeId: entry.key as number };
        break;
      case "passive":
        event = { kind: "passive", entityTypeId: entry.key as number,
                  entityId: reader.u64(), location: reader.loc() };
        break;
      case "send":
        event = { kind: "send", opLabel: entry.key as string,
                  entityId: reader.u64(), targetId: reader.u64() };
        break;
      default:
        event = { kind: "receive", opLabel: entry.key as string, sourceId: reader.u64() };
    }
    events.push({ activityId: current, event });
    consumed = reader.offset;
  }
  return { events, consumed, lastContext: current };
}

/** Decode a complete stream; truncated input throws. */
export function decodeTraceStream(data: Uint8Array, catalog: Catalog): ActivityEvent[] {
  const { events, consumed } = decodePartial(data, catalog);
  if (consumed !== data.length) {
    throw new Error(`trace stream truncated at byte ${consumed}`);
  }
  return events;
}
