/** SVG canvas: immediate-mode rendering of the server's rendered map.
 *
 * World coordinates are y-up with bottom-left anchors; SVG is y-down, so
 * every box converts through toScreenY. No geometry is computed here beyond
 * that flip: nodes sit exactly where the last server message put them.
 */

import { GestureTarget, GestureTracker, Point } from "./gestures.js";
import { Handle, RenderedElement, RenderedMap } from "./protocol.js";
import { UIState } from "./store.js";

export const WORLD_WIDTH = 780;
export const WORLD_HEIGHT = 300;

const SVG_NS = "http://www.w3.org/2000/svg";
const XHTML_NS = "http://www.w3.org/1999/xhtml";

const HANDLE_SIZE = 4;

export function toScreenY(y: number, height: number): number {
  return WORLD_HEIGHT - y - height;
}

/** Pointer event position in world (y-up) coordinates. */
export function worldPoint(svg: SVGSVGElement, event: { clientX: number; clientY: number }): Point {
  const ctm = svg.getScreenCTM();
  let x = event.clientX;
  let y = event.clientY;
  if (ctm !== null) {
    const inverse = ctm.inverse();
    const point = new DOMPoint(event.clientX, event.clientY).matrixTransform(inverse);
    x = point.x;
    y = point.y;
  }
  return { x, y: WORLD_HEIGHT - y };
}

function handlePositions(width: number, height: number): Record<Handle, [number, number]> {
  return {
    N: [width / 2, 0],
    NE: [width, 0],
    E: [width, height / 2],
    SE: [width, height],
    S: [width / 2, height],
    SW: [0, height],
    W: [0, height / 2],
    NW: [0, 0],
  };
}

function make<K extends keyof SVGElementTagNameMap>(tag: K, attrs: Record<string, string>): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  return node;
}

function renderNode(id: string, element: RenderedElement, selected: boolean): SVGGElement {
  const layout = element.layout;
  const sx = layout.x;
  const sy = toScreenY(layout.y, layout.height);
  const group = make("g", { class: "node", "data-id": id });
  if (layout.rotation !== 0) {
    const cx = sx + layout.width / 2;
    const cy = sy + layout.height / 2;
    group.setAttribute("transform", `rotate(${-layout.rotation} ${cx} ${cy})`);
  }

  const body = make("rect", {
    class: selected ? "node-body selected" : "node-body",
    "data-id": id,
    x: String(sx),
    y: String(sy),
    width: String(layout.width),
    height: String(layout.height),
  });
  group.appendChild(body);

  const content = make("foreignObject", {
    x: String(sx),
    y: String(sy),
    width: String(Math.max(layout.width, 1)),
    height: String(Math.max(layout.height, 1)),
    "pointer-events": "none",
  });
  const holder = document.createElementNS(XHTML_NS, "div");
  holder.className = "node-content";
  holder.innerHTML = element.html;
  content.appendChild(holder);
  group.appendChild(content);

  const exported = Object.entries(element.attributes);
  if (exported.length > 0) {
    const label = make("text", {
      class: "node-attrs",
      x: String(sx),
      y: String(sy - 2),
      "pointer-events": "none",
    });
    label.textContent = exported.map(([k, v]) => `${k}=${v}`).join(" ");
    group.appendChild(label);
  }

  if (selected && element.capabilities.measurable) {
    const positions = handlePositions(layout.width, layout.height);
    for (const handle of element.capabilities.resizeHandles) {
      const [hx, hy] = positions[handle];
      group.appendChild(
        make("rect", {
          class: "handle",
          "data-id": id,
          "data-handle": handle,
          x: String(sx + hx - HANDLE_SIZE / 2),
          y: String(sy + hy - HANDLE_SIZE / 2),
          width: String(HANDLE_SIZE),
          height: String(HANDLE_SIZE),
        }),
      );
    }
    if (element.capabilities.rotatable) {
      group.appendChild(
        make("circle", {
          class: "rotor",
          "data-id": id,
          "data-rotor": "1",
          cx: String(sx + layout.width / 2),
          cy: String(sy - 8),
          r: String(HANDLE_SIZE),
        }),
      );
    }
  }
  return group;
}

/** Containers first so small nodes stay clickable on top of them. */
function zOrdered(rendered: RenderedMap): [string, RenderedElement][] {
  return Object.entries(rendered).sort(
    (a, b) => b[1].layout.width * b[1].layout.height - a[1].layout.width * a[1].layout.height,
  );
}

export function renderCanvas(svg: SVGSVGElement, state: UIState): void {
  svg.replaceChildren();
  for (const [id, element] of zOrdered(state.rendered)) {
    svg.appendChild(renderNode(id, element, state.selection === id));
  }
}

export interface CanvasHooks {
  onSelect(elementId: string | null): void;
}

/** Wire pointer events: body drags, handle resizes, rotor rotations. */
export function attachCanvasInteraction(
  svg: SVGSVGElement,
  tracker: GestureTracker,
  rendered: () => RenderedMap,
  hooks: CanvasHooks,
): void {
  svg.addEventListener("pointerdown", (event) => {
    const target = event.target as Element;
    const id = target.getAttribute("data-id");
    if (id === null) {
      hooks.onSelect(null);
      return;
    }
    hooks.onSelect(id);
    const element = rendered()[id];
    if (element === undefined) return;

    let gestureTarget: GestureTarget;
    const handle = target.getAttribute("data-handle");
    if (handle !== null) {
      gestureTarget = { type: "handle", handle: handle as Handle };
    } else if (target.getAttribute("data-rotor") !== null) {
      gestureTarget = { type: "rotor" };
    } else {
      gestureTarget = { type: "body" };
    }
    if (tracker.pointerDown(id, element, worldPoint(svg, event), gestureTarget)) {
      svg.setPointerCapture(event.pointerId);
      event.preventDefault();
    }
  });

  svg.addEventListener("pointermove", (event) => {
    if (tracker.isActive) tracker.pointerMove(worldPoint(svg, event));
  });

  svg.addEventListener("pointerup", (event) => {
    if (tracker.isActive) {
      tracker.pointerUp(worldPoint(svg, event));
      svg.releasePointerCapture(event.pointerId);
    }
  });

  svg.addEventListener("pointercancel", () => tracker.cancel());
}
