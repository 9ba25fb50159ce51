/** Session client: sequencing, gesture nesting, message dispatch.
 *
 * Owns the two client-side invariants: emitted seq numbers are strictly
 * increasing from 1, and gesture events are start/while/end well-nested
 * per element (one gesture at a time, matching the server's rule).
 */

import {
  DeltaPayload,
  GESTURE_EVENTS,
  ProtocolMessage,
  SessionEventBody,
  SessionEventKind,
  StatePayload,
  ViolationRecord,
  decodeMessage,
  encodeMessage,
  isDelta,
  isState,
  isViolation,
} from "./protocol.js";

export interface Transport {
  send(text: string): void;
}

export interface ClientHandlers {
  onHello?(sessionId: string | undefined): void;
  onState?(payload: StatePayload): void;
  onDelta?(payload: DeltaPayload): void;
  onViolation?(payload: ViolationRecord): void;
  onBye?(payload: unknown): void;
  onProtocolError?(message: string): void;
}

export type GestureKind = "drag" | "resize" | "rotate";

interface ActiveGesture {
  kind: GestureKind;
  elementId: string;
}

export class SessionClient {
  private seq = 1;
  private gesture: ActiveGesture | null = null;

  constructor(
    private readonly transport: Transport,
    private readonly handlers: ClientHandlers = {},
  ) {}

  /** Feed one incoming frame; malformed frames go to onProtocolError. */
  handleMessage(raw: string): void {
    let message: ProtocolMessage;
    try {
      message = decodeMessage(raw);
    } catch (err) {
      this.handlers.onProtocolError?.(err instanceof Error ? err.message : String(err));
      return;
    }
    if (message.kind === "hello") {
      this.handlers.onHello?.(message.sessionId);
    } else if (isState(message)) {
      this.handlers.onState?.(message.payload);
    } else if (isDelta(message)) {
      this.handlers.onDelta?.(message.payload);
    } else if (isViolation(message)) {
      this.handlers.onViolation?.(message.payload);
    } else if (message.kind === "bye") {
      this.handlers.onBye?.(message.payload);
    }
  }

  /** Load a project (or the server's default); resets local sequencing
   * because the server resets its engine. */
  loadProject(project?: object): void {
    this.seq = 1;
    this.gesture = null;
    const message: ProtocolMessage = { kind: "loadProject" };
    if (project !== undefined) message.payload = project;
    this.transport.send(encodeMessage(message));
  }

  bye(): void {
    this.transport.send(encodeMessage({ kind: "bye" }));
  }

  get nextSeq(): number {
    return this.seq;
  }

  get activeGesture(): Readonly<ActiveGesture> | null {
    return this.gesture;
  }

  /** Emit a non-gesture event. Returns the seq it was sent with. */
  sendEvent(kind: SessionEventKind, elementId?: string, payload?: Record<string, unknown>): number {
    const body: SessionEventBody = { seq: this.seq, kind };
    if (elementId !== undefined) body.elementId = elementId;
    if (payload !== undefined) body.payload = payload;
    this.transport.send(encodeMessage({ kind: "event", payload: body }));
    return this.seq++;
  }

  /** Gesture emitters: refuse ill-nested phases instead of sending them. */
  startGesture(kind: GestureKind, elementId: string, payload?: Record<string, unknown>): boolean {
    if (this.gesture !== null) return false;
    this.gesture = { kind, elementId };
    this.sendEvent(GESTURE_EVENTS[kind]![0], elementId, payload);
    return true;
  }

  moveGesture(kind: GestureKind, elementId: string, payload: Record<string, unknown>): boolean {
    if (!this.matches(kind, elementId)) return false;
    this.sendEvent(GESTURE_EVENTS[kind]![1], elementId, payload);
    return true;
  }

  endGesture(kind: GestureKind, elementId: string, payload?: Record<string, unknown>): boolean {
    if (!this.matches(kind, elementId)) return false;
    this.gesture = null;
    this.sendEvent(GESTURE_EVENTS[kind]![2], elementId, payload);
    return true;
  }

  private matches(kind: GestureKind, elementId: string): boolean {
    return this.gesture !== null && this.gesture.kind === kind && this.gesture.elementId === elementId;
  }
}
