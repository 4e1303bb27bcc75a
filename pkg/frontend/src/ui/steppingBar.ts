/**
 * The stepping toolbar shown while an activity is suspended: exactly the
 * operations whose criteria (tags at the halt location, activity type,
 * active scopes) hold, labeled from the catalog.
 */

import { applicableSteppingOps } from "../protocol/applicability.js";
import { Catalog } from "../protocol/catalog.js";
import { StopInfo, SourceView } from "../model/clientModel.js";

export interface StepRequest {
  (activityId: number, stepName: string): void;
}

export class SteppingBar {
  constructor(private root: HTMLElement, private catalog: Catalog,
              private sources: SourceView[], private request: StepRequest) {
    this.clear();
  }

  clear(): void {
    this.root.textContent = "";
  }

  private tagsAt(stop: StopInfo): string[] {
    for (const source of this.sources) {
      for (const tagged of source.taggedLocations) {
        const loc = tagged.location;
        if (loc.fileSymbol === stop.location.fileSymbol
            && loc.line === stop.location.line
            && loc.column === stop.location.column
            && loc.length === stop.location.length) {
          return tagged.tags;
        }
      }
    }
    return [];
  }

  show(stop: StopInfo): void {
    this.clear();
    const ops = applicableSteppingOps(
      this.tagsAt(stop), stop.activityType,
      stop.scopes.map((s) => s.type), this.catalog);
    for (const name of ops) {
      const type = this.catalog.steppingTypes.find((s) => s.name === name)!;
      const button = document.createElement("button");
      button.textContent = type.label;
      button.addEventListener("click", () => {
        this.request(stop.activityId, name);
        this.clear();
      });
      this.root.appendChild(button);
    }
  }
}
