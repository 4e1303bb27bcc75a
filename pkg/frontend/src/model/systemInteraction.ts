/**
 * The generic interaction graph: who exists, who created whom, who talks
 * to whom. Built from trace events and the catalog alone; rendering
 * details (color, glyph) are resolved elsewhere.
 */

import { Catalog, activityTypeById, passiveTypeById } from "../protocol/catalog.js";
import { ActivityEvent, SourceLoc } from "../protocol/tracewire.js";

export interface ActivityNode {
  id: number;
  typeId: number;
  typeLabel: string;
  icon: string;
  nameSymbol: number;
  creator: number | null;
  creationLocation: SourceLoc;
  instanceIndex: number;  // per type, for shade selection
  groupKey: string;       // activities created at one location group together
}

export interface PassiveNode {
  id: number;
  typeId: number;
  typeLabel: string;
  creator: number;
  creationLocation: SourceLoc;
}

export interface SendEdge {
  from: number;
  to: number;
  count: number;
}

export interface SystemGraph {
  activityNodes: ActivityNode[];
  passiveNodes: PassiveNode[];
  creationEdges: { from: number; to: number }[];  // activity -> activity
  sendEdges: SendEdge[];
}

function locKey(loc: SourceLoc): string {
  return `${loc.fileSymbol}:${loc.line}:${loc.column}:${loc.length}`;
}

export function buildSystemGraph(events: ActivityEvent[], catalog: Catalog): SystemGraph {
  const activityNodes: ActivityNode[] = [];
  const passiveNodes: PassiveNode[] = [];
  const creationEdges: { from: number; to: number }[] = [];
  const sendCounts = new Map<string, SendEdge>();
  const perTypeCount = new Map<number, number>();

  for (const { activityId, event } of events) {
    if (event.kind === "creation") {
      const type = activityTypeById(catalog, event.activityTypeId);
      const index = perTypeCount.get(event.activityTypeId) ?? 0;
      perTypeCount.set(event.activityTypeId, index + 1);
      const self = activityId === event.activityId;
      activityNodes.push({
        id: event.activityId,
        typeId: event.activityTypeId,
        typeLabel: type?.label ?? `?${event.activityTypeId}`,
        icon: type?.icon ?? "",
        nameSymbol: event.nameSymbol,
        creator: self ? null : activityId,
        creationLocation: event.location,
        instanceIndex: index,
        groupKey: locKey(event.location),
      });
      if (!self) {
        creationEdges.push({ from: activityId, to: event.activityId });
      }
    } else if (event.kind === "passive") {
      const type = passiveTypeById(catalog, event.entityTypeId);
      passiveNodes.push({
        id: event.entityId,
        typeId: event.entityTypeId,
        typeLabel: type?.label ?? `?${event.entityTypeId}`,
        creator: activityId,
        creationLocation: event.location,
      });
    } else if (event.kind === "send") {
      const key = `${activityId}->${event.targetId}`;
      const edge = sendCounts.get(key);
      if (edge === undefined) {
        sendCounts.set(key, { from: activityId, to: event.targetId, count: 1 });
      } else {
        edge.count += 1;
      }
    }
  }
  return {
    activityNodes,
    passiveNodes,
    creationEdges,
    sendEdges: [...sendCounts.values()],
  };
}

export interface Point {
  x: number;
  y: number;
}

/**
 * Deterministic force layout: entities exchanging more messages end up
 * closer (spring strength scales with edge weight); all nodes repel.
 */
export function forceLayout(
  nodeIds: number[],
  edges: SendEdge[],
  iterations = 150,
  size = 600,
): Map<number, Point> {
  const ids = [...nodeIds].sort((a, b) => a - b);
  const pos = new Map<number, Point>();
  const n = Math.max(ids.length, 1);
  ids.forEach((id, i) => {
    const angle = (2 * Math.PI * i) / n;
    pos.set(id, {
      x: size / 2 + (size / 3) * Math.cos(angle),
      y: size / 2 + (size / 3) * Math.sin(angle),
    });
  });
  const known = edges.filter((e) => pos.has(e.from) && pos.has(e.to));
  for (let step = 0; step < iterations; step++) {
    const force = new Map<number, Point>(ids.map((id) => [id, { x: 0, y: 0 }]));
    for (let i = 0; i < ids.length; i++) {
      for (let j = i + 1; j < ids.length; j++) {
        const a = pos.get(ids[i])!;
        const b = pos.get(ids[j])!;
        const dx = a.x - b.x;
        const dy = a.y - b.y;
        const d2 = Math.max(dx * dx + dy * dy, 1);
        const push = 12000 / d2;
        const d = Math.sqrt(d2);
        force.get(ids[i])!.x += (dx / d) * push;
        force.get(ids[i])!.y += (dy / d) * push;
        force.get(ids[j])!.x -= (dx / d) * push;
        force.get(ids[j])!.y -= (dy / d) * push;
      }
    }
    for (const edge of known) {
      const a = pos.get(edge.from)!;
      const b = pos.get(edge.to)!;
      const dx = b.x - a.x;
      const dy = b.y - a.y;
      const pull = 0.002 * Math.min(edge.count, 20);
      force.get(edge.from)!.x += dx * pull;
      force.get(edge.from)!.y += dy * pull;
      force.get(edge.to)!.x -= dx * pull;
      force.get(edge.to)!.y -= dy * pull;
    }
    const damp = 0.85 ** step + 0.05;
    for (const id of ids) {
      const p = pos.get(id)!;
      const f = force.get(id)!;
      p.x = Math.min(Math.max(p.x + f.x * damp, 20), size - 20);
      p.y = Math.min(Math.max(p.y + f.y * damp, 20), size - 20);
    }
  }
  return pos;
}
