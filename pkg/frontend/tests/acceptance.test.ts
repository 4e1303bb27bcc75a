// Secondary acceptance criteria, one describe per criterion.

import { describe, expect, it } from "vitest";

import { turnViewLabels } from "../src/cosmetics.js";
import { ClientModel } from "../src/model/clientModel.js";
import { buildSystemGraph } from "../src/model/systemInteraction.js";
import { buildTurnModel } from "../src/model/turnView.js";
import { decodeTraceStream } from "../src/protocol/tracewire.js";
import { loadPingpong, loadRecordedSession } from "./util.js";

describe("ACCEPTANCE pingpong visual model", () => {
  const { catalog, trace } = loadPingpong();
  const events = decodeTraceStream(trace, catalog);

  it("turn view: 2 lanes x 3 turns and 6 causal links", () => {
    const model = buildTurnModel(events, catalog, turnViewLabels);
    expect(model.lanes).toHaveLength(2);
    expect(model.lanes.map((l) => l.turns.length)).toEqual([3, 3]);
    expect(model.links).toHaveLength(6);
  });

  it("system interaction: 3 activity nodes and 2 creation edges", () => {
    const graph = buildSystemGraph(events, catalog);
    expect(graph.activityNodes).toHaveLength(3);
    expect(graph.creationEdges).toHaveLength(2);
  });
});

describe("ACCEPTANCE race replay", () => {
  const session = loadRecordedSession();

  function play(traceFirst: boolean): unknown {
    const model = new ClientModel();
    const feedTrace = () => session.chunks.forEach((c) => model.onTrace(c));
    const feedControl = () => session.control.forEach((t) => model.onControlText(t));
    if (traceFirst) {
      feedTrace();
      feedControl();
    } else {
      feedControl();
      feedTrace();
    }
    return model.snapshot();
  }

  it("trace-before-control yields the identical final client model", () => {
    expect(play(true)).toEqual(play(false));
  });
});

// The agnosticism-lint criterion lives in agnosticism.test.ts next to the
// synthetic-catalog substitution test it certifies.
