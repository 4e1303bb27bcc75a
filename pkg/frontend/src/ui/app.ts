/** Browser entry point: two sockets in, one model, four panes out. */

import { ClientModel, StopInfo } from "../model/clientModel.js";
import { encodeControl } from "../protocol/messages.js";
import { SourceLoc } from "../protocol/tracewire.js";
import { GraphView } from "./graphView.js";
import { LaneView } from "./laneView.js";
import { SourcePane } from "./sourcePane.js";
import { SteppingBar } from "./steppingBar.js";

function element<T extends HTMLElement>(id: string): T {
  return document.getElementById(id) as T;
}

function main(): void {
  const params = new URLSearchParams(window.location.search);
  const host = params.get("host") ?? "127.0.0.1";
  const port = params.get("port") ?? "7777";
  const model = new ClientModel();

  const control = new WebSocket(`ws://${host}:${port}/control`, "kompos-control");
  const trace = new WebSocket(`ws://${host}:${port}/trace`, "kompos-trace");
  trace.binaryType = "arraybuffer";

  control.onmessage = (event) => model.onControlText(event.data as string);
  trace.onmessage = (event) => model.onTrace(new Uint8Array(event.data as ArrayBuffer));
  control.onclose = () => setStatus("control channel closed");

  const send = (message: Parameters<typeof encodeControl>[0]) =>
    control.send(encodeControl(message));

  const setStatus = (text: string) => {
    element("status").textContent = text;
  };

  let sourcePane: SourcePane | null = null;
  let steppingBar: SteppingBar | null = null;
  const graphView = new GraphView(element<HTMLElement>("graph") as unknown as SVGSVGElement);
  const laneView = new LaneView(
    element<HTMLElement>("lanes") as unknown as SVGSVGElement,
    element("lane-details"));

  element("launch").addEventListener("click", () => {
    send({ type: "launch" });
    setStatus("running");
  });

  const toggleBreakpoint = (name: string, location: SourceLoc, enabled: boolean) =>
    send({ type: "breakpoint-update", name, location, enabled });

  const requestStep = (activityId: number, step: string) => {
    send({ type: "step", activityId, step });
    model.markResumed(activityId);
    sourcePane?.highlight(null);
    setStatus("running");
  };

  const showStop = (stop: StopInfo) => {
    setStatus(`suspended: activity ${stop.activityId} (${stop.activityType}) `
      + `at ${stop.location.line}:${stop.location.column}`
      + (stop.scopes.length
        ? ` in ${stop.scopes.map((s) => `${s.type}#${s.id}`).join(" > ")}`
        : ""));
    sourcePane?.highlight(stop.location);
    steppingBar?.show(stop);
    send({ type: "stack-trace-request", activityId: stop.activityId });
    send({ type: "variables-request", activityId: stop.activityId, frameIndex: 0 });
  };

  let stopsSeen = 0;
  model.onChange(() => {
    if (model.catalog !== null && sourcePane === null && model.sources.length > 0) {
      sourcePane = new SourcePane(element("source"), model.catalog,
                                  model.sources[0], toggleBreakpoint);
      steppingBar = new SteppingBar(element("stepping"), model.catalog,
                                    model.sources, requestStep);
      setStatus("ready; set breakpoints, then launch");
    }
    if (model.stoppedLog.length > stopsSeen) {
      stopsSeen = model.stoppedLog.length;
      showStop(model.stoppedLog[stopsSeen - 1]);
    }
    if (model.exitStatus !== null) {
      setStatus(`program exited with status ${model.exitStatus}`);
      steppingBar?.clear();
    }
    graphView.render(model);
    laneView.render(model);
    renderActivities();
  });

  control.onmessage = (event) => {
    const text = event.data as string;
    model.onControlText(text);
    const parsed = JSON.parse(text);
    if (parsed.type === "stack-trace-response") {
      renderStack(parsed);
    } else if (parsed.type === "variables-response") {
      renderVariables(parsed);
    }
  };

  const renderStack = (response: { state: string;
      frames: { methodNameSymbol: number; location: SourceLoc }[] }) => {
    const pane = element("stack");
    pane.textContent = "";
    const state = document.createElement("div");
    state.textContent = `state: ${response.state}`;
    pane.appendChild(state);
    response.frames.forEach((frame, index) => {
      const row = document.createElement("div");
      row.textContent = `#${index} ${model.symbolText(frame.methodNameSymbol)} `
        + `at ${frame.location.line}:${frame.location.column}`;
      pane.appendChild(row);
    });
  };

  const renderVariables = (response: { variables: { name: string; value: string }[] }) => {
    const pane = element("variables");
    pane.textContent = "";
    for (const variable of response.variables) {
      const row = document.createElement("div");
      row.textContent = `${variable.name} = ${variable.value}`;
      pane.appendChild(row);
    }
  };

  const renderActivities = () => {
    const pane = element("activities");
    pane.textContent = "";
    for (const view of [...model.activities.values()].sort((a, b) => a.id - b.id)) {
      const row = document.createElement("div");
      row.textContent = `${view.id} ${model.symbolText(view.nameSymbol)}: ${view.state}`;
      row.addEventListener("click", () => {
        send({ type: "stack-trace-request", activityId: view.id });
      });
      pane.appendChild(row);
    }
  };

  setStatus("connecting...");
}

main();
