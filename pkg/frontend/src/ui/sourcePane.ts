/**
 * Source view: syntax highlighting from tags, breakpoint affordances in
 * the gutter wherever at least one breakpoint type applies, and a menu
 * listing those types by label.
 */

import { applicableBreakpoints } from "../protocol/applicability.js";
import { Catalog } from "../protocol/catalog.js";
import { TaggedLocation } from "../protocol/messages.js";
import { SourceLoc } from "../protocol/tracewire.js";
import { tagColors } from "../cosmetics.js";
import { SourceView } from "../model/clientModel.js";

export interface BreakpointToggle {
  (name: string, location: SourceLoc, enabled: boolean): void;
}

export class SourcePane {
  private root: HTMLElement;
  private lineElements = new Map<number, HTMLElement>();
  private active = new Set<string>();

  constructor(root: HTMLElement, private catalog: Catalog,
              private source: SourceView, private toggle: BreakpointToggle) {
    this.root = root;
    this.render();
  }

  private locationsByLine(): Map<number, TaggedLocation[]> {
    const out = new Map<number, TaggedLocation[]>();
    for (const tagged of this.source.taggedLocations) {
      const list = out.get(tagged.location.line) ?? [];
      list.push(tagged);
      out.set(tagged.location.line, list);
    }
    for (const list of out.values()) {
      list.sort((a, b) => a.location.column - b.location.column);
    }
    return out;
  }

  private render(): void {
    this.root.textContent = "";
    const byLine = this.locationsByLine();
    const lines = this.source.text.split("\n");
    lines.forEach((text, index) => {
      const lineNo = index + 1;
      const row = document.createElement("div");
      row.className = "src-line";
      const gutter = document.createElement("span");
      gutter.className = "gutter";
      gutter.textContent = String(lineNo).padStart(4, " ");
      const offerings = (byLine.get(lineNo) ?? [])
        .map((t) => ({ tagged: t, names: applicableBreakpoints(t.tags, this.catalog) }))
        .filter((o) => o.names.length > 0);
      if (offerings.length > 0) {
        gutter.classList.add("has-breakpoints");
        gutter.addEventListener("click", () => this.openMenu(gutter, offerings));
      }
      row.appendChild(gutter);
      row.appendChild(this.renderCode(text, lineNo, byLine.get(lineNo) ?? []));
      this.lineElements.set(lineNo, row);
      this.root.appendChild(row);
    });
  }

  private renderCode(text: string, lineNo: number,
                     tagged: TaggedLocation[]): HTMLElement {
    const code = document.createElement("span");
    code.className = "code";
    let cursor = 0;
    for (const t of tagged) {
      const start = t.location.column - 1;
      const end = Math.min(start + t.location.length, text.length);
      if (start < cursor || start >= text.length) {
        continue;  // overlapping or multi-line span: keep the plain text
      }
      if (start > cursor) {
        code.appendChild(document.createTextNode(text.slice(cursor, start)));
      }
      const span = document.createElement("span");
      span.textContent = text.slice(start, end);
      for (const tag of t.tags) {
        if (tag in tagColors) {
          span.style.color = tagColors[tag];
        }
      }
      span.title = [...t.tags].sort().join(", ");
      code.appendChild(span);
      cursor = end;
    }
    code.appendChild(document.createTextNode(text.slice(cursor)));
    return code;
  }

  private openMenu(anchor: HTMLElement,
                   offerings: { tagged: TaggedLocation; names: string[] }[]): void {
    const existing = anchor.querySelector(".bp-menu");
    if (existing) {
      existing.remove();
      return;
    }
    const menu = document.createElement("div");
    menu.className = "bp-menu";
    for (const { tagged, names } of offerings) {
      for (const name of names) {
        const type = this.catalog.breakpointTypes.find((b) => b.name === name)!;
        const item = document.createElement("label");
        const box = document.createElement("input");
        box.type = "checkbox";
        const key = `${name}@${tagged.location.line}:${tagged.location.column}`;
        box.checked = this.active.has(key);
        box.addEventListener("change", () => {
          if (box.checked) {
            this.active.add(key);
          } else {
            this.active.delete(key);
          }
          this.toggle(name, tagged.location, box.checked);
        });
        item.appendChild(box);
        item.appendChild(document.createTextNode(` ${type.label}`));
        menu.appendChild(item);
      }
    }
    anchor.appendChild(menu);
  }

  highlight(loc: SourceLoc | null): void {
    for (const row of this.lineElements.values()) {
      row.classList.remove("current");
    }
    if (loc !== null) {
      this.lineElements.get(loc.line)?.classList.add("current");
    }
  }
}
