/** Control-channel messages: JSON objects whose "type" names the kind. */

import { Catalog, catalogFromJson } from "./catalog.js";
import { SourceLoc } from "./tracewire.js";

export interface TaggedLocation {
  location: SourceLoc;
  tags: string[];
}

export type ControlMessage =
  | { type: "metadata"; catalog: Catalog }
  | { type: "source"; uri: string; text: string; taggedLocations: TaggedLocation[] }
  | { type: "breakpoint-update"; name: string; location: SourceLoc; enabled: boolean }
  | { type: "stopped"; activityId: number; activityType: string;
      location: SourceLoc; scopes: { type: string; id: number }[] }
  | { type: "step"; activityId: number; step: string }
  | { type: "symbols"; symbols: { id: number; text: string }[] }
  | { type: "launch" }
  | { type: "stack-trace-request"; activityId: number }
  | { type: "stack-trace-response"; activityId: number; state: string;
      frames: { methodNameSymbol: number; location: SourceLoc }[] }
  | { type: "variables-request"; activityId: number; frameIndex: number }
  | { type: "variables-response"; activityId: number; frameIndex: number;
      variables: { name: string; value: string }[] }
  | { type: "program-exit"; status: number };

export function decodeControl(text: string): ControlMessage {
  const obj = JSON.parse(text);
  if (typeof obj !== "object" || obj === null || typeof obj.type !== "string") {
    throw new Error("control message must have a type field");
  }
  if (obj.type === "metadata") {
    return { type: "metadata", catalog: catalogFromJson(obj) };
  }
  return obj as ControlMessage;
}

export function encodeControl(message: ControlMessage): string {
  if (message.type === "metadata") {
    const { catalog } = message;
    return JSON.stringify({ type: "metadata", ...catalog });
  }
  return JSON.stringify(message);
}
