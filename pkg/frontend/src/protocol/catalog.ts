/**
 * The runtime's self-description. Every name, label, tag, and marker in
 * here is opaque to this client: rendering and filtering key off whatever
 * the connected runtime declares.
 */

export interface ActivityType {
  id: number;
  label: string;
  creationMarker: number;
  completionMarker: number;
  icon: string;
}

export interface PassiveEntityType {
  id: number;
  label: string;
  creationMarker: number;
}

export interface DynamicScopeType {
  id: number;
  label: string;
  startMarker: number;
  endMarker: number;
}

export interface SendOpType {
  marker: number;
  label: string;
  entityTypeId: number;
  targetTypeId: number;
}

export interface ReceiveOpType {
  marker: number;
  label: string;
  sourceTypeId: number;
}

export interface BreakpointType {
  name: string;
  label: string;
  applicableTags: string[];
}

export interface SteppingType {
  name: string;
  label: string;
  applicableTags: string[];
  applicableActivityTypeIds: number[];
  applicableScopeTypeIds: number[];
}

export interface Catalog {
  activityTypes: ActivityType[];
  passiveEntityTypes: PassiveEntityType[];
  dynamicScopeTypes: DynamicScopeType[];
  sendOpTypes: SendOpType[];
  receiveOpTypes: ReceiveOpType[];
  breakpointTypes: BreakpointType[];
  steppingTypes: SteppingType[];
}

export function catalogFromJson(obj: Record<string, unknown>): Catalog {
  const required = [
    "activityTypes", "passiveEntityTypes", "dynamicScopeTypes",
    "sendOpTypes", "receiveOpTypes", "breakpointTypes", "steppingTypes",
  ];
  for (const field of required) {
    if (!Array.isArray(obj[field])) {
      throw new Error(`catalog is missing ${field}`);
    }
  }
  return obj as unknown as Catalog;
}

export function activityTypeById(catalog: Catalog, id: number): ActivityType | undefined {
  return catalog.activityTypes.find((t) => t.id === id);
}

export function scopeTypeById(catalog: Catalog, id: number): DynamicScopeType | undefined {
  return catalog.dynamicScopeTypes.find((t) => t.id === id);
}

export function passiveTypeById(catalog: Catalog, id: number): PassiveEntityType | undefined {
  return catalog.passiveEntityTypes.find((t) => t.id === id);
}
