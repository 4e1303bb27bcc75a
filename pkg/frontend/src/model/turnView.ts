/**
 * The actor-turn causality model: one lane per actor, one circle per
 * turn, a line from the sending turn to the turn it caused. Which
 * activities are "actors", which scopes are "turns", and which sends are
 * "messages" is decided purely by catalog labels supplied by the caller;
 * this module knows no names itself. Causality is derived solely from
 * scope id = message id correlation plus per-activity trace order.
 */

import { Catalog } from "../protocol/catalog.js";
import { ActivityEvent, SourceLoc } from "../protocol/tracewire.js";

export interface TurnFilterLabels {
  activityType: string;
  scopeType: string;
  sendOp: string;
}

export interface Turn {
  scopeId: number;        // equals the causing message id
  location: SourceLoc;
  sends: number[];        // message ids sent during this turn, in order
}

export interface Lane {
  activityId: number;
  nameSymbol: number;
  turns: Turn[];
}

export interface CausalLink {
  messageId: number;
  fromActivity: number;
  fromTurn: number | null;  // null: sent outside any turn (e.g. the main thread)
  toActivity: number;
  toTurn: number;
}

export interface TurnModel {
  lanes: Lane[];
  links: CausalLink[];
}

export function buildTurnModel(
  events: ActivityEvent[],
  catalog: Catalog,
  labels: TurnFilterLabels,
): TurnModel {
  const actorTypeIds = new Set(
    catalog.activityTypes.filter((t) => t.label === labels.activityType).map((t) => t.id));
  const turnTypeIds = new Set(
    catalog.dynamicScopeTypes.filter((t) => t.label === labels.scopeType).map((t) => t.id));

  const lanes = new Map<number, Lane>();
  for (const { event } of events) {
    if (event.kind === "creation" && actorTypeIds.has(event.activityTypeId)) {
      lanes.set(event.activityId, {
        activityId: event.activityId,
        nameSymbol: event.nameSymbol,
        turns: [],
      });
    }
  }

  // sender side: which (activity, turn) emitted each message id
  const senders = new Map<number, { activity: number; turn: number | null }>();
  // receiver side: which lane turn a message id became
  const turnOf = new Map<number, { activity: number; turn: Turn }>();
  const openTurn = new Map<number, Turn | null>();

  for (const { activityId, event } of events) {
    if (event.kind === "scope-start" && turnTypeIds.has(event.scopeTypeId)) {
      const lane = lanes.get(activityId);
      if (lane !== undefined) {
        const turn: Turn = { scopeId: event.scopeId, location: event.location, sends: [] };
        lane.turns.push(turn);
        openTurn.set(activityId, turn);
        turnOf.set(event.scopeId, { activity: activityId, turn });
      }
    } else if (event.kind === "scope-end" && turnTypeIds.has(event.scopeTypeId)) {
      if (openTurn.get(activityId) !== undefined) {
        openTurn.set(activityId, null);
      }
    } else if (event.kind === "send" && event.opLabel === labels.sendOp) {
      const turn = openTurn.get(activityId) ?? null;
      senders.set(event.entityId, { activity: activityId, turn: turn?.scopeId ?? null });
      if (turn) {
        turn.sends.push(event.entityId);
      }
    }
  }

  const links: CausalLink[] = [];
  for (const [messageId, target] of turnOf) {
    const sender = senders.get(messageId);
    if (sender !== undefined) {
      links.push({
        messageId,
        fromActivity: sender.activity,
        fromTurn: sender.turn,
        toActivity: target.activity,
        toTurn: messageId,
      });
    }
  }
  links.sort((a, b) => a.messageId - b.messageId);
  return { lanes: [...lanes.values()], links };
}
