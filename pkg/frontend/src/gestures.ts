/** Pointer gestures to session events.
 *
 * Pure state machine: the canvas feeds it world-coordinate pointer samples
 * and capability data; it decides which events to emit. While-events are
 * throttled to at most one per animation frame (the host calls flush()
 * once per frame). End events carry no coordinates: the position authority
 * is the while stream, so releasing after a snap leaves the element where
 * the server put it.
 */

import { GestureKind } from "./client.js";
import { Handle, RenderedElement } from "./protocol.js";

export interface GestureEmitter {
  startGesture(kind: GestureKind, elementId: string, payload?: Record<string, unknown>): boolean;
  moveGesture(kind: GestureKind, elementId: string, payload: Record<string, unknown>): boolean;
  endGesture(kind: GestureKind, elementId: string, payload?: Record<string, unknown>): boolean;
}

export interface Point {
  x: number;
  y: number;
}

export type GestureTarget =
  | { type: "body" }
  | { type: "handle"; handle: Handle }
  | { type: "rotor" };

interface ActiveState {
  kind: GestureKind;
  elementId: string;
  startPoint: Point;
  startLayout: { x: number; y: number; width: number; height: number };
  handle?: Handle;
  center: Point;
}

export class GestureTracker {
  private active: ActiveState | null = null;
  private pending: Record<string, unknown> | null = null;

  constructor(private readonly emitter: GestureEmitter) {}

  get isActive(): boolean {
    return this.active !== null;
  }

  /** Begin a gesture if the element's capabilities allow it. */
  pointerDown(elementId: string, element: RenderedElement, point: Point, target: GestureTarget): boolean {
    if (this.active !== null) return false;
    const caps = element.capabilities;
    if (!caps.measurable) return false;

    let kind: GestureKind;
    let handle: Handle | undefined;
    if (target.type === "body") {
      if (!caps.draggable) return false;
      kind = "drag";
    } else if (target.type === "handle") {
      if (!caps.resizeHandles.includes(target.handle)) return false;
      kind = "resize";
      handle = target.handle;
    } else {
      if (!caps.rotatable) return false;
      kind = "rotate";
    }

    const layout = element.layout;
    const state: ActiveState = {
      kind,
      elementId,
      startPoint: point,
      startLayout: { x: layout.x, y: layout.y, width: layout.width, height: layout.height },
      handle,
      center: { x: layout.x + layout.width / 2, y: layout.y + layout.height / 2 },
    };
    if (!this.emitter.startGesture(kind, elementId)) return false;
    this.active = state;
    this.pending = null;
    return true;
  }

  /** Record the latest sample; emitted by the next flush(). */
  pointerMove(point: Point): void {
    if (this.active === null) return;
    this.pending = this.payloadFor(this.active, point);
  }

  /** Emit at most one while-event per call (per animation frame). */
  flush(): void {
    if (this.active === null || this.pending === null) return;
    this.emitter.moveGesture(this.active.kind, this.active.elementId, this.pending);
    this.pending = null;
  }

  /** Release: flush the final sample, then end without coordinates. */
  pointerUp(point: Point): void {
    if (this.active === null) return;
    this.pending = this.payloadFor(this.active, point);
    this.flush();
    this.emitter.endGesture(this.active.kind, this.active.elementId);
    this.active = null;
  }

  cancel(): void {
    if (this.active === null) return;
    this.pending = null;
    this.emitter.endGesture(this.active.kind, this.active.elementId);
    this.active = null;
  }

  private payloadFor(state: ActiveState, point: Point): Record<string, unknown> {
    const dx = point.x - state.startPoint.x;
    const dy = point.y - state.startPoint.y;
    if (state.kind === "drag") {
      return { x: state.startLayout.x + dx, y: state.startLayout.y + dy };
    }
    if (state.kind === "resize") {
      return resizePayload(state.handle!, state.startLayout, dx, dy);
    }
    const degrees = (Math.atan2(point.y - state.center.y, point.x - state.center.x) * 180) / Math.PI;
    return { rotation: (degrees + 360) % 360 };
  }
}

/** World coordinates are y-up with a bottom-left anchor, so the N edge is
 * the top: pulling it up (dy > 0) grows the element. */
export function resizePayload(
  handle: Handle,
  start: { width: number; height: number },
  dx: number,
  dy: number,
): Record<string, unknown> {
  const payload: Record<string, unknown> = {};
  if (handle.includes("E")) payload.width = start.width + dx;
  if (handle.includes("W")) payload.width = start.width - dx;
  if (handle === "N" || handle === "NE" || handle === "NW") payload.height = start.height + dy;
  if (handle === "S" || handle === "SE" || handle === "SW") payload.height = start.height - dy;
  return payload;
}
