/**
 * The client's state, fed by two racing channels. References to things
 * that are not yet known (activity ids before their creation event,
 * symbol ids before their definition, trace bytes before the catalog)
 * are buffered and resolved when the defining message arrives — never
 * dropped. The final model is therefore independent of channel ordering.
 */

import { Catalog } from "../protocol/catalog.js";
import { ControlMessage, TaggedLocation, decodeControl } from "../protocol/messages.js";
import { ActivityEvent, SourceLoc, decodePartial } from "../protocol/tracewire.js";

export interface SourceView {
  uri: string;
  text: string;
  taggedLocations: TaggedLocation[];
}

export interface StopInfo {
  activityId: number;
  activityType: string;
  location: SourceLoc;
  scopes: { type: string; id: number }[];
}

export interface ActivityView {
  id: number;
  typeId: number;
  nameSymbol: number;
  state: "running" | "stopped" | "completed";
  lastStop: StopInfo | null;
}

export class ClientModel {
  catalog: Catalog | null = null;
  symbols = new Map<number, string>();
  sources: SourceView[] = [];
  activities = new Map<number, ActivityView>();
  stoppedLog: StopInfo[] = [];
  exitStatus: number | null = null;
  events: ActivityEvent[] = [];
  listeners: (() => void)[] = [];

  private pendingStops: StopInfo[] = [];
  private pendingChunks: Uint8Array[] = [];
  private tail: Uint8Array = new Uint8Array(0);
  private decodeContext = 0;

  onControlText(text: string): void {
    this.onControl(decodeControl(text));
  }

  onControl(message: ControlMessage): void {
    switch (message.type) {
      case "metadata":
        this.catalog = message.catalog;
        for (const chunk of this.pendingChunks.splice(0)) {
          this.onTrace(chunk);
        }
        break;
      case "source":
        this.sources.push({ uri: message.uri, text: message.text,
                            taggedLocations: message.taggedLocations });
        break;
      case "symbols":
        for (const entry of message.symbols) {
          this.symbols.set(entry.id, entry.text);
        }
        break;
      case "stopped": {
        const stop: StopInfo = {
          activityId: message.activityId,
          activityType: message.activityType,
          location: message.location,
          scopes: message.scopes,
        };
        this.stoppedLog.push(stop);
        if (!this.applyStop(stop)) {
          this.pendingStops.push(stop);  // unknown activity: wait for its creation
        }
        break;
      }
      case "program-exit":
        this.exitStatus = message.status;
        break;
      default:
        break;  // responses are routed by the panes that requested them
    }
    this.changed();
  }

  private applyStop(stop: StopInfo): boolean {
    const view = this.activities.get(stop.activityId);
    if (view === undefined) {
      return false;
    }
    if (view.state !== "completed") {
      view.state = "stopped";  // a late Stopped never revives a finished activity
    }
    view.lastStop = stop;
    return true;
  }

  markResumed(activityId: number): void {
    const view = this.activities.get(activityId);
    if (view !== undefined && view.state === "stopped") {
      view.state = "running";
    }
    this.changed();
  }

  onTrace(chunk: Uint8Array): void {
    if (this.catalog === null) {
      this.pendingChunks.push(chunk);
      return;
    }
    const data = new Uint8Array(this.tail.length + chunk.length);
    data.set(this.tail, 0);
    data.set(chunk, this.tail.length);
    const { events, consumed, lastContext } =
      decodePartial(data, this.catalog, this.decodeContext);
    this.decodeContext = lastContext;
    this.tail = data.slice(consumed);
    for (const entry of events) {
      this.events.push(entry);
      this.applyEvent(entry);
    }
    this.changed();
  }

  private applyEvent(entry: ActivityEvent): void {
    const event = entry.event;
    if (event.kind === "creation") {
      this.activities.set(event.activityId, {
        id: event.activityId,
        typeId: event.activityTypeId,
        nameSymbol: event.nameSymbol,
        state: "running",
        lastStop: null,
      });
      for (const stop of this.pendingStops.splice(0)) {
        if (!this.applyStop(stop)) {
          this.pendingStops.push(stop);
        }
      }
    } else if (event.kind === "completion") {
      const view = this.activities.get(entry.activityId);
      if (view !== undefined) {
        view.state = "completed";
      }
    }
  }

  symbolText(id: number): string {
    return this.symbols.get(id) ?? `#${id}`;
  }

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  private changed(): void {
    for (const listener of this.listeners) {
      listener();
    }
  }

  /** A stable, order-independent view of everything the client learned. */
  snapshot(): unknown {
    return {
      symbols: [...this.symbols.entries()].sort((a, b) => a[0] - b[0]),
      sources: this.sources.map((s) => ({ uri: s.uri, locations: s.taggedLocations.length })),
      activities: [...this.activities.values()]
        .sort((a, b) => a.id - b.id)
        .map((a) => ({
          id: a.id,
          typeId: a.typeId,
          name: this.symbolText(a.nameSymbol),
          state: a.state,
          lastStop: a.lastStop,
        })),
      stoppedLog: this.stoppedLog,
      pendingStops: this.pendingStops.length,
      exitStatus: this.exitStatus,
      events: this.events,
    };
  }
}
