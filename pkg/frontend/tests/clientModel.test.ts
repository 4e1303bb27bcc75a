// Race tolerance: the final client model must not depend on the order in
// which the two channels delivered their data.

import { describe, expect, it } from "vitest";

import { ClientModel } from "../src/model/clientModel.js";
import { loadRecordedSession } from "./util.js";

const session = loadRecordedSession();

function playOriginal(): ClientModel {
  // interleave roughly as recorded: control first, trace chunks behind
  const model = new ClientModel();
  const chunks = [...session.chunks];
  session.control.forEach((text, index) => {
    model.onControlText(text);
    if (index >= 3 && chunks.length > 0) {
      model.onTrace(chunks.shift()!);
    }
  });
  for (const chunk of chunks) {
    model.onTrace(chunk);
  }
  return model;
}

function playTraceFirst(): ClientModel {
  const model = new ClientModel();
  for (const chunk of session.chunks) {
    model.onTrace(chunk);  // bytes arrive before the catalog is known
  }
  for (const text of session.control) {
    model.onControlText(text);
  }
  return model;
}

function playControlFirst(): ClientModel {
  const model = new ClientModel();
  for (const text of session.control) {
    model.onControlText(text);
  }
  for (const chunk of session.chunks) {
    model.onTrace(chunk);
  }
  return model;
}

describe("race replay", () => {
  it("trace-before-control produces the identical final model", () => {
    expect(playTraceFirst().snapshot()).toEqual(playOriginal().snapshot());
  });

  it("control-before-trace produces the identical final model", () => {
    expect(playControlFirst().snapshot()).toEqual(playOriginal().snapshot());
  });

  it("byte-split trace chunks change nothing", () => {
    const model = new ClientModel();
    model.onControlText(session.control[0]);  // metadata
    const all = new Uint8Array(session.chunks.reduce((n, c) => n + c.length, 0));
    let offset = 0;
    for (const chunk of session.chunks) {
      all.set(chunk, offset);
      offset += chunk.length;
    }
    for (let i = 0; i < all.length; i += 5) {
      model.onTrace(all.slice(i, Math.min(i + 5, all.length)));
    }
    for (const text of session.control.slice(1)) {
      model.onControlText(text);
    }
    expect(model.snapshot()).toEqual(playOriginal().snapshot());
  });
});

describe("model content", () => {
  it("buffers stops for unknown activities instead of dropping them", () => {
    const model = new ClientModel();
    // control-only delivery: the stop references an activity the trace
    // has not yet introduced
    for (const text of session.control) {
      model.onControlText(text);
    }
    expect(model.stoppedLog.length).toBe(2)
    expect(model.activities.size).toBe(0);
    const snapshot: any = model.snapshot();
    expect(snapshot.pendingStops).toBe(2);
    // the defining trace arrives late; the stops resolve
    for (const chunk of session.chunks) {
      model.onTrace(chunk);
    }
    const resolved: any = model.snapshot();
    expect(resolved.pendingStops).toBe(0);
    const main = [...model.activities.values()][0];
    expect(main.lastStop).not.toBeNull();
  });

  it("tracks exit status and completion", () => {
    const model = playOriginal();
    expect(model.exitStatus).toBe(0);
    const states = [...model.activities.values()].map((a) => a.state);
    expect(states).toContain("completed");
  });

  it("resolves symbols lazily with a stable fallback", () => {
    const model = new ClientModel();
    expect(model.symbolText(42)).toBe("#42");
    model.onControlText(session.control[0]);
    for (const text of session.control) {
      if (JSON.parse(text).type === "symbols") {
        model.onControlText(text);
      }
    }
    expect(model.symbolText(0)).toBe("");
  });
});
