/** Editor bootstrap: socket, store, panels, render loop. */

import { attachCanvasInteraction, renderCanvas } from "./canvas.js";
import { SessionClient } from "./client.js";
import { GestureTracker } from "./gestures.js";
import { findContainer, nextObjectId, renderPalette } from "./palette.js";
import { renderInspector } from "./inspector.js";
import { ClassSpec } from "./protocol.js";
import {
  Store,
  applyDelta,
  applyState,
  recordViolation,
  select,
  setConnection,
  setPane,
} from "./store.js";
import { renderViewManager } from "./viewmanager.js";

function socketUrl(): string {
  const override = new URLSearchParams(location.search).get("ws");
  if (override !== null) return override;
  return `ws://${location.hostname || "127.0.0.1"}:8765/session`;
}

function must<T extends Element>(selector: string): T {
  const node = document.querySelector<T>(selector);
  if (node === null) throw new Error(`missing ${selector}`);
  return node;
}

export function main(): void {
  const svg = must<SVGSVGElement>("#canvas");
  const paletteBox = must<HTMLElement>("#palette");
  const inspectorBox = must<HTMLElement>("#inspector");
  const viewsBox = must<HTMLElement>("#views");
  const statusBar = must<HTMLElement>("#status");

  const store = new Store();
  const socket = new WebSocket(socketUrl());
  const client = new SessionClient(
    { send: (text) => socket.send(text) },
    {
      onState: (payload) => store.update(applyState(store.get(), payload)),
      onDelta: (payload) => store.update(applyDelta(store.get(), payload)),
      onViolation: (payload) => store.update(recordViolation(store.get(), payload)),
      onProtocolError: (message) =>
        store.update(recordViolation(store.get(), { code: "ClientParseError", message })),
    },
  );
  const tracker = new GestureTracker(client);

  socket.addEventListener("open", () => {
    store.update(setConnection(store.get(), "open"));
    client.loadProject();
  });
  socket.addEventListener("message", (event) => client.handleMessage(String(event.data)));
  socket.addEventListener("close", () => store.update(setConnection(store.get(), "closed")));

  const hooks = {
    onSelect: (elementId: string | null) => store.update(select(store.get(), elementId)),
    setPane: (pane: Parameters<typeof setPane>[1]) => store.update(setPane(store.get(), pane)),
    setAttribute: (elementId: string, name: string, value: unknown) => {
      client.sendEvent("setAttribute", elementId, { name, value });
    },
    setStackRank: (viewName: string, rank: number) => {
      const project = store.get().project;
      if (project === null) return;
      const patched = {
        ...project,
        views: project.views.map((v) => (v.name === viewName ? { ...v, stackRank: rank } : v)),
      };
      client.loadProject(patched);
    },
    toggleView: (viewName: string, activate: boolean) => {
      client.sendEvent(activate ? "activateView" : "deactivateView", undefined, { view: viewName });
    },
    instantiate: (spec: ClassSpec) => {
      const project = store.get().project;
      if (project === null) return;
      const payload: Record<string, unknown> = { className: spec.name, x: 20.0, y: 20.0 };
      const container = findContainer(project, spec.name);
      if (container !== null) {
        payload.containerId = container.containerId;
        payload.containerFeature = container.containerFeature;
      }
      client.sendEvent("createObject", nextObjectId(project), payload);
    },
  };

  attachCanvasInteraction(svg, tracker, () => store.get().rendered, hooks);

  store.subscribe((state) => {
    renderCanvas(svg, state);
    renderPalette(paletteBox, state.project, hooks);
    renderInspector(inspectorBox, state, hooks);
    renderViewManager(viewsBox, state, hooks);
    statusBar.textContent = `${state.connection} | ${state.status}`;
  });

  const frame = (): void => {
    tracker.flush();
    requestAnimationFrame(frame);
  };
  requestAnimationFrame(frame);

  window.addEventListener("beforeunload", () => client.bye());
}

main();
