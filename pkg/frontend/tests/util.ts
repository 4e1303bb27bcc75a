import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";

import { Catalog, catalogFromJson } from "../src/protocol/catalog.js";

export function fixturePath(name: string): string {
  return fileURLToPath(new URL(`../fixtures/${name}`, import.meta.url));
}

export function sharedDataPath(name: string): string {
  return fileURLToPath(new URL(`../../tests/data/${name}`, import.meta.url));
}

export function readJson(path: string): any {
  return JSON.parse(readFileSync(path, "utf8"));
}

export function base64Bytes(b64: string): Uint8Array {
  const binary = atob(b64);
  const out = new Uint8Array(binary.length);
  for (let i = 0; i < binary.length; i++) {
    out[i] = binary.charCodeAt(i);
  }
  return out;
}

export interface PingpongFixture {
  catalog: Catalog;
  symbols: Map<number, string>;
  trace: Uint8Array;
}

export function loadPingpong(): PingpongFixture {
  const raw = readJson(fixturePath("pingpong_trace.json"));
  return {
    catalog: catalogFromJson(raw.catalog),
    symbols: new Map(Object.entries(raw.symbols).map(
      ([k, v]) => [Number(k), v as string])),
    trace: base64Bytes(raw.traceBase64),
  };
}

export interface RecordedSession {
  control: string[];
  chunks: Uint8Array[];
}

export function loadRecordedSession(): RecordedSession {
  const raw = readJson(fixturePath("recorded_session.json"));
  return {
    control: raw.control,
    chunks: raw.traceChunksBase64.map(base64Bytes),
  };
}
