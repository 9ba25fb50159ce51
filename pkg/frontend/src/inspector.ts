/** Right pane: structured slot editor, style summary, raw JSON view. */

import { ProjectDoc, RenderedElement } from "./protocol.js";
import { Pane, UIState, classAttributes } from "./store.js";

export interface InspectorHooks {
  setPane(pane: Pane): void;
  setAttribute(elementId: string, name: string, value: unknown): void;
  setStackRank(viewName: string, rank: number): void;
}

/** Text input to slot value, by declared attribute type. */
export function parseSlotValue(type: string, text: string): unknown {
  if (type === "int") {
    const value = Number(text);
    return Number.isFinite(value) ? Math.trunc(value) : text;
  }
  if (type === "float") {
    const value = Number(text);
    return Number.isFinite(value) ? value : text;
  }
  if (type === "boolean") return text === "true" || text === "1" || text === "on";
  return text;
}

const PANES: { id: Pane; label: string }[] = [
  { id: "structured", label: "Structured" },
  { id: "style", label: "Style" },
  { id: "raw", label: "Raw" },
];

function renderTabs(container: HTMLElement, state: UIState, hooks: InspectorHooks): void {
  const row = document.createElement("div");
  row.className = "tabs";
  for (const pane of PANES) {
    const button = document.createElement("button");
    button.textContent = pane.label;
    button.className = state.pane === pane.id ? "tab active" : "tab";
    button.addEventListener("click", () => hooks.setPane(pane.id));
    row.appendChild(button);
  }
  container.appendChild(row);
}

function renderStructured(
  container: HTMLElement,
  project: ProjectDoc,
  elementId: string,
  hooks: InspectorHooks,
): void {
  const object = project.model.objects[elementId];
  if (object === undefined) {
    container.appendChild(note("no model object behind this element"));
    return;
  }
  const heading = document.createElement("h3");
  heading.textContent = `${elementId}: ${object.class}`;
  container.appendChild(heading);

  for (const attr of classAttributes(project, object.class)) {
    const row = document.createElement("label");
    row.className = "slot-row";
    const caption = document.createElement("span");
    caption.textContent = `${attr.name} (${attr.type})`;
    const input = document.createElement("input");
    const current = object.slots[attr.name];
    input.value = current === undefined || current === null ? "" : String(current);
    input.addEventListener("change", () => {
      hooks.setAttribute(elementId, attr.name, parseSlotValue(attr.type, input.value));
    });
    row.appendChild(caption);
    row.appendChild(input);
    container.appendChild(row);
  }
}

function renderStyle(
  container: HTMLElement,
  state: UIState,
  element: RenderedElement | undefined,
  hooks: InspectorHooks,
): void {
  if (element !== undefined) {
    const info = document.createElement("dl");
    info.className = "style-info";
    for (const [term, detail] of [
      ["view", element.view],
      ["rule", element.rule],
      ["tier", element.tier],
      ["measurable", String(element.capabilities.measurable)],
      ["handles", element.capabilities.resizeHandles.join(" ") || "none"],
    ]) {
      const dt = document.createElement("dt");
      dt.textContent = term ?? "";
      const dd = document.createElement("dd");
      dd.textContent = detail ?? "";
      info.appendChild(dt);
      info.appendChild(dd);
    }
    container.appendChild(info);
  }

  const heading = document.createElement("h3");
  heading.textContent = "View stack ranks";
  container.appendChild(heading);
  for (const view of state.project?.views ?? []) {
    const row = document.createElement("label");
    row.className = "slot-row";
    const caption = document.createElement("span");
    caption.textContent = view.name;
    const input = document.createElement("input");
    input.type = "number";
    input.value = String(view.stackRank);
    input.addEventListener("change", () => {
      const rank = Number(input.value);
      if (Number.isFinite(rank)) hooks.setStackRank(view.name, Math.trunc(rank));
    });
    row.appendChild(caption);
    row.appendChild(input);
    container.appendChild(row);
  }
}

function renderRaw(container: HTMLElement, state: UIState): void {
  const pre = document.createElement("pre");
  pre.className = "raw-view";
  const selection = state.selection;
  if (selection !== null) {
    pre.textContent = JSON.stringify(
      {
        object: state.project?.model.objects[selection] ?? null,
        rendered: state.rendered[selection] ?? null,
      },
      null,
      2,
    );
  } else {
    pre.textContent = JSON.stringify(state.project, null, 2);
  }
  container.appendChild(pre);
}

function note(text: string): HTMLElement {
  const p = document.createElement("p");
  p.className = "note";
  p.textContent = text;
  return p;
}

export function renderInspector(container: HTMLElement, state: UIState, hooks: InspectorHooks): void {
  container.replaceChildren();
  renderTabs(container, state, hooks);
  if (state.project === null) {
    container.appendChild(note("no project loaded"));
    return;
  }
  if (state.pane === "raw") {
    renderRaw(container, state);
    return;
  }
  if (state.pane === "style") {
    const element = state.selection !== null ? state.rendered[state.selection] : undefined;
    renderStyle(container, state, element, hooks);
    return;
  }
  if (state.selection === null) {
    container.appendChild(note("select an element to edit its slots"));
    return;
  }
  renderStructured(container, state.project, state.selection, hooks);
}
