/**
 * Actor lanes: turns as circles in lane order, a line from the causing
 * turn, and an expandable list of the messages a turn sent, in order.
 */

import { turnViewLabels } from "../cosmetics.js";
import { ClientModel } from "../model/clientModel.js";
import { TurnModel, buildTurnModel } from "../model/turnView.js";

const SVG = "http://www.w3.org/2000/svg";
const LANE_HEIGHT = 56;
const TURN_SPACING = 72;
const LEFT = 130;

export class LaneView {
  private expanded = new Set<number>();

  constructor(private root: SVGSVGElement, private details: HTMLElement) {}

  render(model: ClientModel): void {
    if (model.catalog === null) {
      return;
    }
    const turnModel = buildTurnModel(model.events, model.catalog, turnViewLabels);
    this.draw(turnModel, model);
  }

  private draw(turnModel: TurnModel, model: ClientModel): void {
    this.root.textContent = "";
    const laneY = new Map<number, number>();
    const turnX = new Map<number, number>();
    let column = 0;
    // stable left-to-right order: message (= scope) ids grow monotonically
    const allTurns = turnModel.lanes
      .flatMap((lane) => lane.turns.map((t) => ({ lane, turn: t })))
      .sort((a, b) => a.turn.scopeId - b.turn.scopeId);

    turnModel.lanes.forEach((lane, index) => {
      const y = 30 + index * LANE_HEIGHT;
      laneY.set(lane.activityId, y);
      const axis = document.createElementNS(SVG, "line");
      axis.setAttribute("x1", String(LEFT));
      axis.setAttribute("y1", String(y));
      axis.setAttribute("x2", "98%");
      axis.setAttribute("y2", String(y));
      axis.setAttribute("class", "lane-axis");
      this.root.appendChild(axis);
      const label = document.createElementNS(SVG, "text");
      label.setAttribute("x", "8");
      label.setAttribute("y", String(y + 4));
      label.textContent = `${model.symbolText(lane.nameSymbol)} (${lane.activityId})`;
      this.root.appendChild(label);
    });

    for (const { turn } of allTurns) {
      turnX.set(turn.scopeId, LEFT + 40 + column * TURN_SPACING);
      column += 1;
    }

    for (const link of turnModel.links) {
      const toX = turnX.get(link.toTurn);
      const toY = laneY.get(link.toActivity);
      if (toX === undefined || toY === undefined) {
        continue;
      }
      const fromX = link.fromTurn !== null ? turnX.get(link.fromTurn) : LEFT;
      const fromY = laneY.get(link.fromActivity) ?? 12;
      const path = document.createElementNS(SVG, "line");
      path.setAttribute("x1", String(fromX ?? LEFT));
      path.setAttribute("y1", String(fromY));
      path.setAttribute("x2", String(toX));
      path.setAttribute("y2", String(toY));
      path.setAttribute("class", "turn-link");
      this.root.appendChild(path);
    }

    for (const { lane, turn } of allTurns) {
      const x = turnX.get(turn.scopeId)!;
      const y = laneY.get(lane.activityId)!;
      const circle = document.createElementNS(SVG, "circle");
      circle.setAttribute("cx", String(x));
      circle.setAttribute("cy", String(y));
      circle.setAttribute("r", this.expanded.has(turn.scopeId) ? "14" : "9");
      circle.setAttribute("class", "turn-circle");
      circle.addEventListener("click", () => {
        if (this.expanded.has(turn.scopeId)) {
          this.expanded.delete(turn.scopeId);
        } else {
          this.expanded.add(turn.scopeId);
        }
        this.showDetails(turn.scopeId, turn.sends, turnModel);
      });
      const title = document.createElementNS(SVG, "title");
      title.textContent = `turn ${turn.scopeId}`;
      circle.appendChild(title);
      this.root.appendChild(circle);
    }
  }

  private showDetails(scopeId: number, sends: number[], turnModel: TurnModel): void {
    if (!this.expanded.has(scopeId)) {
      this.details.textContent = "";
      return;
    }
    const byMessage = new Map(turnModel.links.map((l) => [l.messageId, l]));
    this.details.textContent = "";
    const heading = document.createElement("div");
    heading.textContent = `turn ${scopeId} sent ${sends.length} message(s):`;
    this.details.appendChild(heading);
    sends.forEach((messageId, index) => {
      const item = document.createElement("div");
      item.className = "sent-message";
      const link = byMessage.get(messageId);
      const target = link ? ` → turn ${link.toTurn} on ${link.toActivity}` : "";
      item.textContent = `${index + 1}. message ${messageId}${target}`;
      this.details.appendChild(item);
    });
  }
}
