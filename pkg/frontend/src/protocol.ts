/** Wire types for the posyn session protocol.
 *
 * The server is authoritative: clients send raw events and render whatever
 * comes back. Every shape here mirrors the server's JSON exactly.
 */

export type MessageKind =
  | "hello"
  | "loadProject"
  | "event"
  | "state"
  | "delta"
  | "violation"
  | "bye";

export type SessionEventKind =
  | "createObject"
  | "setAttribute"
  | "link"
  | "activateView"
  | "deactivateView"
  | "dragStart"
  | "drag"
  | "dragEnd"
  | "resizeStart"
  | "resize"
  | "resizeEnd"
  | "rotateStart"
  | "rotate"
  | "rotateEnd";

export const GESTURE_EVENTS: Record<string, [SessionEventKind, SessionEventKind, SessionEventKind]> = {
  drag: ["dragStart", "drag", "dragEnd"],
  resize: ["resizeStart", "resize", "resizeEnd"],
  rotate: ["rotateStart", "rotate", "rotateEnd"],
};

export interface SessionEventBody {
  seq: number;
  kind: SessionEventKind;
  elementId?: string;
  payload?: Record<string, unknown>;
}

export interface Layout {
  elementId: string;
  x: number;
  y: number;
  width: number;
  height: number;
  rotation: number;
  anchor: string;
}

export type Handle = "N" | "NE" | "E" | "SE" | "S" | "SW" | "W" | "NW";

export interface Capabilities {
  measurable: boolean;
  draggable: boolean;
  resizeHandles: Handle[];
  rotatable: boolean;
}

export interface RenderedElement {
  html: string;
  attributes: Record<string, string>;
  tier: string;
  view: string;
  rule: string;
  capabilities: Capabilities;
  layout: Layout;
}

export type RenderedMap = Record<string, RenderedElement>;

export interface AttributeSpec {
  name: string;
  type: string;
}

export interface ClassSpec {
  name: string;
  abstract?: boolean;
  superclasses?: string[];
  attributes?: AttributeSpec[];
  references?: unknown[];
}

export interface ProjectDoc {
  formatVersion: number;
  metamodel: { name: string; classes: ClassSpec[]; enums?: unknown[] };
  model: { id: string; objects: Record<string, ModelObject> };
  views: ViewDoc[];
  layouts: Record<string, Omit<Layout, "elementId"> & { elementId?: string }>;
  scales: Record<string, unknown>;
}

export interface ModelObject {
  class: string;
  slots: Record<string, unknown>;
  [extra: string]: unknown;
}

export interface ViewDoc {
  name: string;
  stackRank: number;
  [extra: string]: unknown;
}

export interface StatePayload {
  project: ProjectDoc;
  rendered: RenderedMap;
  activeViews: string[];
}

export interface LayoutDelta {
  elementId: string;
  property?: string;
  attribute?: string;
  old?: unknown;
  new?: unknown;
  value?: unknown;
}

export interface ViolationRecord {
  code: string;
  message: string;
  elementId?: string | null;
  ruleId?: string | null;
}

export interface DeltaPayload {
  event: SessionEventBody;
  firings: unknown[];
  layoutDeltas: LayoutDelta[];
  attributeDeltas: LayoutDelta[];
  modelDeltas: { objectId: string; feature: string; old: unknown; new: unknown }[];
  violations: ViolationRecord[];
  rendered?: RenderedMap;
  activeViews?: string[];
}

export interface ProtocolMessage {
  kind: MessageKind;
  sessionId?: string;
  payload?: unknown;
}

const KINDS: readonly string[] = ["hello", "loadProject", "event", "state", "delta", "violation", "bye"];

/** Parse one frame; throws on anything that is not a protocol message. */
export function decodeMessage(raw: string): ProtocolMessage {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    throw new Error("frame is not JSON");
  }
  if (typeof data !== "object" || data === null || Array.isArray(data)) {
    throw new Error("frame is not an object");
  }
  const kind = (data as { kind?: unknown }).kind;
  if (typeof kind !== "string" || !KINDS.includes(kind)) {
    throw new Error(`unknown message kind ${String(kind)}`);
  }
  return data as ProtocolMessage;
}

export function encodeMessage(message: ProtocolMessage): string {
  return JSON.stringify(message);
}

export function isState(m: ProtocolMessage): m is ProtocolMessage & { payload: StatePayload } {
  return m.kind === "state" && typeof m.payload === "object" && m.payload !== null;
}

export function isDelta(m: ProtocolMessage): m is ProtocolMessage & { payload: DeltaPayload } {
  return m.kind === "delta" && typeof m.payload === "object" && m.payload !== null;
}

export function isViolation(m: ProtocolMessage): m is ProtocolMessage & { payload: ViolationRecord } {
  return m.kind === "violation" && typeof m.payload === "object" && m.payload !== null;
}
