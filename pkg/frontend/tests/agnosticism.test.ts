// The central claim, restated testably: outside one whitelisted cosmetic
// map, the client contains no literal from the shipped catalog, and a
// runtime with a completely different catalog renders with zero changes.

import { readFileSync, readdirSync, statSync } from "node:fs";
import { join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { ClientModel } from "../src/model/clientModel.js";
import { buildSystemGraph } from "../src/model/systemInteraction.js";
import { buildTurnModel } from "../src/model/turnView.js";
import { Catalog } from "../src/protocol/catalog.js";
import { decodeTraceStream } from "../src/protocol/tracewire.js";
import { loadPingpong } from "./util.js";

const SRC_DIR = fileURLToPath(new URL("../src", import.meta.url));
const WHITELIST = ["cosmetics.ts"];
const SYNTAX_TAGS = ["Keyword", "Literal", "Comment", "Statement", "MethodCall"];

function allSourceFiles(dir: string): string[] {
  const out: string[] = [];
  for (const entry of readdirSync(dir)) {
    const path = join(dir, entry);
    if (statSync(path).isDirectory()) {
      out.push(...allSourceFiles(path));
    } else if (entry.endsWith(".ts")) {
      out.push(path);
    }
  }
  return out;
}

function stringLiterals(source: string): string[] {
  const out: string[] = [];
  const pattern = /'((?:[^'\\]|\\.)*)'|"((?:[^"\\]|\\.)*)"|`((?:[^`\\$]|\\.)*)`/g;
  let match;
  while ((match = pattern.exec(source)) !== null) {
    out.push(match[1] ?? match[2] ?? match[3] ?? "");
  }
  return out;
}

function catalogNames(catalog: Catalog): Set<string> {
  const names = new Set<string>(SYNTAX_TAGS);
  for (const b of catalog.breakpointTypes) {
    names.add(b.name);
    names.add(b.label);
    b.applicableTags.forEach((t) => names.add(t));
  }
  for (const s of catalog.steppingTypes) {
    names.add(s.name);
    names.add(s.label);
    s.applicableTags.forEach((t) => names.add(t));
  }
  for (const t of catalog.activityTypes) {
    names.add(t.label);
    names.add(t.icon);
  }
  for (const t of catalog.dynamicScopeTypes) {
    names.add(t.label);
  }
  for (const t of catalog.passiveEntityTypes) {
    names.add(t.label);
  }
  for (const t of catalog.sendOpTypes) {
    names.add(t.label);
  }
  for (const t of catalog.receiveOpTypes) {
    names.add(t.label);
  }
  return names;
}

describe("agnosticism lint", () => {
  it("no catalog name literal appears outside the cosmetic map", () => {
    const { catalog } = loadPingpong();
    const names = catalogNames(catalog);
    const offenders: string[] = [];
    for (const path of allSourceFiles(SRC_DIR)) {
      if (WHITELIST.some((w) => path.endsWith(w))) {
        continue;
      }
      for (const literal of stringLiterals(readFileSync(path, "utf8"))) {
        if (names.has(literal)) {
          offenders.push(`${path}: ${JSON.stringify(literal)}`);
        }
      }
    }
    expect(offenders).toEqual([]);
  });

  it("the whitelist is a single file and it exists", () => {
    expect(WHITELIST).toHaveLength(1);
    readFileSync(join(SRC_DIR, WHITELIST[0]), "utf8");
  });
});

// --- a runtime nothing here has ever heard of -------------------------------

const synthetic: Catalog = {
  activityTypes: [
    { id: 1, label: "Strand", creationMarker: 0x90, completionMarker: 0x91, icon: "yarn" },
    { id: 2, label: "Mailman", creationMarker: 0x92, completionMarker: 0x93, icon: "bag" },
    { id: 3, label: "Routine", creationMarker: 0x94, completionMarker: 0x95, icon: "loop" },
    { id: 4, label: "Chore", creationMarker: 0x96, completionMarker: 0x97, icon: "broom" },
    { id: 12, label: "Fiber", creationMarker: 0x98, completionMarker: 0x99, icon: "silk" },
  ],
  dynamicScopeTypes: [
    { id: 5, label: "Parcel", startMarker: 0x9a, endMarker: 0x9b },
  ],
  passiveEntityTypes: [
    { id: 8, label: "Pipe", creationMarker: 0x9c },
  ],
  sendOpTypes: [
    { marker: 0x9d, label: "Dispatch", entityTypeId: 0, targetTypeId: 2 },
  ],
  receiveOpTypes: [
    { marker: 0x9e, label: "Collect", sourceTypeId: 8 },
  ],
  breakpointTypes: [
    { name: "at-dispatch", label: "at dispatch", applicableTags: ["Shout"] },
  ],
  steppingTypes: [
    { name: "amble", label: "amble", applicableTags: [],
      applicableActivityTypeIds: [], applicableScopeTypeIds: [] },
  ],
};

class Encoder {
  private bytes: number[] = [];
  u8(v: number) { this.bytes.push(v); return this; }
  u16(v: number) { this.bytes.push(v & 0xff, (v >> 8) & 0xff); return this; }
  u32(v: number) {
    this.bytes.push(v & 0xff, (v >> 8) & 0xff, (v >> 16) & 0xff, (v >> 24) & 0xff);
    return this;
  }
  u64(v: number) { this.u32(v); this.u32(0); return this; }
  loc() { this.u16(1); this.u32(1); this.u16(1); this.u16(1); return this; }
  done(): Uint8Array { return new Uint8Array(this.bytes); }
}

function syntheticTrace(): Uint8Array {
  return new Encoder()
    .u8(0x01).u64(1)                      // context: activity 1
    .u8(0x90).u64(1).u16(3).loc()         // Strand 1 created (itself)
    .u8(0x92).u64(2).u16(4).loc()         // Mailman 2 created by 1
    .u8(0x98).u64(7).u16(5).loc()         // Fiber 7 created by 1 (the sixth type)
    .u8(0x9c).u64(9).loc()                // Pipe 9 created by 1
    .u8(0x9d).u64(20).u64(2)              // Dispatch message 20 to Mailman 2
    .u8(0x01).u64(2)                      // context: activity 2
    .u8(0x9a).u64(20).loc()               // Parcel scope for message 20
    .u8(0x9d).u64(21).u64(2)              // Dispatch 21 from inside the parcel
    .u8(0x9b)                             // scope end
    .u8(0x9a).u64(21).loc()               // Parcel for message 21
    .u8(0x9b)
    .u8(0x93)                             // Mailman 2 completes
    .done();
}

describe("catalog substitution", () => {
  it("decodes and renders a foreign catalog's trace with zero code changes", () => {
    const events = decodeTraceStream(syntheticTrace(), synthetic);
    const graph = buildSystemGraph(events, synthetic);
    expect(graph.activityNodes.map((n) => n.typeLabel).sort())
      .toEqual(["Fiber", "Mailman", "Strand"]);
    expect(graph.creationEdges).toHaveLength(2);
    expect(graph.passiveNodes[0].typeLabel).toBe("Pipe");
    expect(graph.sendEdges.reduce((n, e) => n + e.count, 0)).toBe(2);

    const turnish = buildTurnModel(events, synthetic, {
      activityType: "Mailman", scopeType: "Parcel", sendOp: "Dispatch",
    });
    expect(turnish.lanes).toHaveLength(1);
    expect(turnish.lanes[0].turns).toHaveLength(2);
    expect(turnish.links).toHaveLength(2);
    const chained = turnish.links.find((l) => l.fromTurn !== null)!;
    expect(chained.fromTurn).toBe(20);
    expect(chained.toTurn).toBe(21);
  });

  it("the client model ingests a foreign session end to end", () => {
    const model = new ClientModel();
    model.onTrace(syntheticTrace());  // before metadata: buffered
    model.onControlText(JSON.stringify({ type: "metadata", ...synthetic }));
    model.onControlText(JSON.stringify({
      type: "stopped", activityId: 2, activityType: "Mailman",
      location: { fileSymbol: 1, line: 1, column: 1, length: 1 }, scopes: [],
    }));
    model.onControlText(JSON.stringify({ type: "program-exit", status: 0 }));
    expect(model.activities.size).toBe(3);
    expect(model.activities.get(2)!.lastStop).not.toBeNull();
    expect(model.exitStatus).toBe(0);
  });
});
