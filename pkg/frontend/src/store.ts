/** UI state and its reducers.
 *
 * The store holds no semantics: geometry and markup always come from the
 * last server message. Reducers return fresh state objects so the render
 * loop can compare by identity.
 */

import {
  ClassSpec,
  DeltaPayload,
  ProjectDoc,
  RenderedMap,
  StatePayload,
  ViolationRecord,
} from "./protocol.js";

export type Pane = "structured" | "style" | "raw";

export type Connection = "connecting" | "open" | "closed";

export interface UIState {
  connection: Connection;
  project: ProjectDoc | null;
  rendered: RenderedMap;
  activeViews: string[];
  selection: string | null;
  pane: Pane;
  status: string;
  violations: ViolationRecord[];
}

export function initialState(): UIState {
  return {
    connection: "connecting",
    project: null,
    rendered: {},
    activeViews: [],
    selection: null,
    pane: "structured",
    status: "connecting",
    violations: [],
  };
}

function keepSelection(selection: string | null, rendered: RenderedMap): string | null {
  return selection !== null && selection in rendered ? selection : null;
}

export function applyState(state: UIState, payload: StatePayload): UIState {
  return {
    ...state,
    project: payload.project,
    rendered: payload.rendered,
    activeViews: payload.activeViews ?? [],
    selection: keepSelection(state.selection, payload.rendered),
    status: "project loaded",
  };
}

export function applyDelta(state: UIState, payload: DeltaPayload): UIState {
  let rendered: RenderedMap;
  if (payload.rendered !== undefined) {
    rendered = payload.rendered;
  } else {
    // fall back to patching geometry from the granular deltas
    rendered = { ...state.rendered };
    for (const delta of payload.layoutDeltas) {
      const element = rendered[delta.elementId];
      if (element === undefined) continue;
      if (delta.property !== undefined) {
        rendered[delta.elementId] = {
          ...element,
          layout: { ...element.layout, [delta.property]: delta.new },
        };
      } else if (delta.attribute !== undefined) {
        rendered[delta.elementId] = {
          ...element,
          attributes: { ...element.attributes, [delta.attribute]: String(delta.value) },
        };
      }
    }
  }

  let project = state.project;
  if (project !== null && payload.modelDeltas.length > 0) {
    const objects = { ...project.model.objects };
    for (const delta of payload.modelDeltas) {
      const object = objects[delta.objectId];
      if (object === undefined) continue;
      objects[delta.objectId] = {
        ...object,
        slots: { ...object.slots, [delta.feature]: delta.new },
      };
    }
    project = { ...project, model: { ...project.model, objects } };
  }

  return {
    ...state,
    project,
    rendered,
    activeViews: payload.activeViews ?? state.activeViews,
    selection: keepSelection(state.selection, rendered),
    status: `event ${payload.event.seq} (${payload.event.kind}) applied`,
    violations: [...state.violations, ...payload.violations],
  };
}

export function recordViolation(state: UIState, violation: ViolationRecord): UIState {
  return {
    ...state,
    status: `${violation.code}: ${violation.message}`,
    violations: [...state.violations, violation],
  };
}

export function select(state: UIState, elementId: string | null): UIState {
  return { ...state, selection: keepSelection(elementId, state.rendered) };
}

export function setPane(state: UIState, pane: Pane): UIState {
  return { ...state, pane };
}

export function setConnection(state: UIState, connection: Connection): UIState {
  const status = connection === "open" ? "connected" : connection;
  return { ...state, connection, status };
}

/** Instantiable classes for the palette: everything non-abstract. */
export function palette(project: ProjectDoc | null): ClassSpec[] {
  if (project === null) return [];
  return project.metamodel.classes.filter((c) => !c.abstract);
}

/** Attribute schema of an object's class, inherited attributes included. */
export function classAttributes(project: ProjectDoc, className: string): { name: string; type: string }[] {
  const byName = new Map(project.metamodel.classes.map((c) => [c.name, c]));
  const out: { name: string; type: string }[] = [];
  const seen = new Set<string>();
  const visit = (name: string): void => {
    const spec = byName.get(name);
    if (spec === undefined || seen.has(name)) return;
    seen.add(name);
    for (const superName of spec.superclasses ?? []) visit(superName);
    for (const attr of spec.attributes ?? []) out.push({ name: attr.name, type: attr.type });
  };
  visit(className);
  return out;
}

/** A tiny subscribable wrapper so panels re-render on change. */
export class Store {
  private state: UIState = initialState();
  private listeners: ((state: UIState) => void)[] = [];

  get(): UIState {
    return this.state;
  }

  update(next: UIState): void {
    this.state = next;
    for (const listener of this.listeners) listener(next);
  }

  subscribe(listener: (state: UIState) => void): void {
    this.listeners.push(listener);
  }
}
