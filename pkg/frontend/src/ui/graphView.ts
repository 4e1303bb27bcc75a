/**
 * SVG rendering of the system interaction graph. Activities are rounded
 * rectangles colored by a per-type hue with a shade per instance; passive
 * entities use the label-keyed custom glyph when one exists, otherwise a
 * default shape. Dashed edges show creation, solid edges messages.
 */

import { entityGlyphs, glyphForIcon, hueForLabel } from "../cosmetics.js";
import { ClientModel } from "../model/clientModel.js";
import { SystemGraph, buildSystemGraph, forceLayout } from "../model/systemInteraction.js";

const SVG = "http://www.w3.org/2000/svg";

export class GraphView {
  constructor(private root: SVGSVGElement) {}

  render(model: ClientModel): void {
    if (model.catalog === null) {
      return;
    }
    const graph = buildSystemGraph(model.events, model.catalog);
    this.draw(graph, model);
  }

  private draw(graph: SystemGraph, model: ClientModel): void {
    this.root.textContent = "";
    const ids = [
      ...graph.activityNodes.map((n) => n.id),
      ...graph.passiveNodes.map((n) => n.id),
    ];
    const creatorEdges = [
      ...graph.creationEdges,
      ...graph.passiveNodes.map((n) => ({ from: n.creator, to: n.id })),
    ];
    const layoutEdges = [
      ...graph.sendEdges,
      ...creatorEdges.map((e) => ({ ...e, count: 1 })),
    ];
    const positions = forceLayout(ids, layoutEdges);

    const line = (x1: number, y1: number, x2: number, y2: number,
                  cls: string, width = 1) => {
      const el = document.createElementNS(SVG, "line");
      el.setAttribute("x1", String(x1));
      el.setAttribute("y1", String(y1));
      el.setAttribute("x2", String(x2));
      el.setAttribute("y2", String(y2));
      el.setAttribute("class", cls);
      el.setAttribute("stroke-width", String(width));
      this.root.appendChild(el);
    };
    for (const edge of creatorEdges) {
      const a = positions.get(edge.from);
      const b = positions.get(edge.to);
      if (a && b) {
        line(a.x, a.y, b.x, b.y, "edge-creation");
      }
    }
    for (const edge of graph.sendEdges) {
      const a = positions.get(edge.from);
      const b = positions.get(edge.to);
      if (a && b) {
        line(a.x, a.y, b.x, b.y, "edge-send", Math.min(1 + Math.log2(edge.count), 5));
      }
    }

    for (const node of graph.passiveNodes) {
      const p = positions.get(node.id)!;
      const group = document.createElementNS(SVG, "g");
      group.setAttribute("transform", `translate(${p.x} ${p.y})`);
      const glyph = entityGlyphs[node.typeLabel];
      if (glyph !== undefined) {
        group.innerHTML = glyph;
      } else {
        const circle = document.createElementNS(SVG, "circle");
        circle.setAttribute("r", "7");
        circle.setAttribute("class", "passive-default");
        group.appendChild(circle);
      }
      const title = document.createElementNS(SVG, "title");
      title.textContent = `${node.typeLabel} ${node.id}`;
      group.appendChild(title);
      this.root.appendChild(group);
    }

    for (const node of graph.activityNodes) {
      const p = positions.get(node.id)!;
      const group = document.createElementNS(SVG, "g");
      group.setAttribute("transform", `translate(${p.x} ${p.y})`);
      const rect = document.createElementNS(SVG, "rect");
      rect.setAttribute("x", "-42");
      rect.setAttribute("y", "-14");
      rect.setAttribute("width", "84");
      rect.setAttribute("height", "28");
      rect.setAttribute("rx", "9");
      const hue = hueForLabel(node.typeLabel);
      const lightness = 72 - 9 * (node.instanceIndex % 4);
      rect.setAttribute("fill", `hsl(${hue} 60% ${lightness}%)`);
      group.appendChild(rect);
      const label = document.createElementNS(SVG, "text");
      label.setAttribute("text-anchor", "middle");
      label.setAttribute("dy", "4");
      label.textContent =
        `${glyphForIcon(node.icon)} ${model.symbolText(node.nameSymbol)}`;
      group.appendChild(label);
      this.root.appendChild(group);
    }
  }
}
