/**
 * Pure applicability rules, identical to the runtime's: a breakpoint type
 * applies where its tag list intersects the location's tags (empty list =
 * everywhere); a stepping type conjunctively filters on tags, the
 * suspended activity's type, and the active dynamic scopes.
 */

import { Catalog } from "./catalog.js";

export function applicableBreakpoints(tags: Iterable<string>, catalog: Catalog): string[] {
  const tagSet = new Set(tags);
  const out: string[] = [];
  for (const bp of catalog.breakpointTypes) {
    if (bp.applicableTags.length === 0 || bp.applicableTags.some((t) => tagSet.has(t))) {
      out.push(bp.name);
    }
  }
  return out;
}

export function applicableSteppingOps(
  tags: Iterable<string>,
  activityTypeLabel: string,
  scopeTypeLabels: Iterable<string>,
  catalog: Catalog,
): string[] {
  const tagSet = new Set(tags);
  let activityId: number | undefined;
  for (const t of catalog.activityTypes) {
    if (t.label === activityTypeLabel) {
      activityId = t.id;
    }
  }
  const scopeLabels = new Set(scopeTypeLabels);
  const scopeIds = new Set(
    catalog.dynamicScopeTypes.filter((t) => scopeLabels.has(t.label)).map((t) => t.id));
  const out: string[] = [];
  for (const op of catalog.steppingTypes) {
    if (op.applicableTags.length > 0 && !op.applicableTags.some((t) => tagSet.has(t))) {
      continue;
    }
    if (op.applicableActivityTypeIds.length > 0
        && (activityId === undefined || !op.applicableActivityTypeIds.includes(activityId))) {
      continue;
    }
    if (op.applicableScopeTypeIds.length > 0
        && !op.applicableScopeTypeIds.some((id) => scopeIds.has(id))) {
      continue;
    }
    out.push(op.name);
  }
  return out;
}
