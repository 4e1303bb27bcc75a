/**
 * The one place where this client knows names from the shipped runtime.
 *
 * Everything here is label-keyed polish: glyphs, colors, and the label
 * triple the actor-turn view filters on. Unknown labels fall back to
 * deterministic hashes, so a runtime with a completely different catalog
 * still renders.
 */

/** Custom SVG glyphs for passive entities, keyed by entity type label. */
export const entityGlyphs: Record<string, string> = {
  Channel:
    '<g><rect x="-14" y="-5" width="28" height="10" fill="#222"/>' +
    '<path d="M -10 0 l 7 -4 v 8 z" fill="#fff"/>' +
    '<path d="M 3 0 l 7 -4 v 8 z" fill="#fff"/></g>',
};

/** Base hue per activity type label (shade varies per instance). */
export const activityHues: Record<string, number> = {
  Thread: 210,
  Actor: 120,
  Process: 48,
  Task: 0,
};

/** Icon glyph per icon name from the catalog. */
export const iconGlyphs: Record<string, string> = {
  thread: "⸻",
  actor: "✉",
  process: "⚙",
  task: "⚒",
};

/** Colors for syntax highlighting, keyed by source tag name. */
export const tagColors: Record<string, string> = {
  Keyword: "#7059c2",
  Literal: "#9c5c2e",
  Comment: "#6a8759",
  MethodCall: "#2f6f9f",
};

/** The labels the actor-turn view filters on. */
export const turnViewLabels = {
  activityType: "Actor",
  scopeType: "Turn",
  sendOp: "ActorMessageSend",
};

export function hueForLabel(label: string): number {
  if (label in activityHues) {
    return activityHues[label];
  }
  let hash = 0;
  for (const ch of label) {
    hash = (hash * 31 + ch.codePointAt(0)!) % 360;
  }
  return hash;
}

export function glyphForIcon(icon: string): string {
  return iconGlyphs[icon] ?? "▣";
}
