/** View manager: the upper-right checklist toggling view activation. */

import { UIState } from "./store.js";

export interface ViewManagerHooks {
  toggleView(viewName: string, activate: boolean): void;
}

export function renderViewManager(container: HTMLElement, state: UIState, hooks: ViewManagerHooks): void {
  container.replaceChildren();
  const title = document.createElement("h2");
  title.textContent = "Views";
  container.appendChild(title);
  for (const view of state.project?.views ?? []) {
    const row = document.createElement("label");
    row.className = "view-row";
    const box = document.createElement("input");
    box.type = "checkbox";
    box.checked = state.activeViews.includes(view.name);
    box.addEventListener("change", () => hooks.toggleView(view.name, box.checked));
    const caption = document.createElement("span");
    caption.textContent = `${view.name} (rank ${view.stackRank})`;
    row.appendChild(box);
    row.appendChild(caption);
    container.appendChild(row);
  }
}
