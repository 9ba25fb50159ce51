/** Left pane: the instantiable metaclasses, one button per concrete class. */

import { ClassSpec, ProjectDoc } from "./protocol.js";
import { palette } from "./store.js";

/** Fresh object id: one past the highest oN the model already uses. */
export function nextObjectId(project: ProjectDoc): string {
  let highest = 0;
  for (const id of Object.keys(project.model.objects)) {
    const match = /^o(\d+)$/.exec(id);
    if (match !== null) highest = Math.max(highest, Number(match[1]));
  }
  return `o${highest + 1}`;
}

function superclassChain(project: ProjectDoc, className: string): Set<string> {
  const byName = new Map(project.metamodel.classes.map((c) => [c.name, c]));
  const out = new Set<string>();
  const visit = (name: string): void => {
    if (out.has(name)) return;
    out.add(name);
    for (const superName of byName.get(name)?.superclasses ?? []) visit(superName);
  };
  visit(className);
  return out;
}

interface ReferenceDoc {
  name: string;
  target: string;
  containment: boolean;
}

/** First existing object that can contain a new instance of className,
 * as (containerId, containerFeature); null when only a root placement fits. */
export function findContainer(
  project: ProjectDoc,
  className: string,
): { containerId: string; containerFeature: string } | null {
  const chain = superclassChain(project, className);
  for (const [objectId, object] of Object.entries(project.model.objects)) {
    for (const ownerClass of superclassChain(project, object.class)) {
      const spec = project.metamodel.classes.find((c) => c.name === ownerClass);
      for (const ref of (spec?.references ?? []) as ReferenceDoc[]) {
        if (ref.containment && chain.has(ref.target)) {
          return { containerId: objectId, containerFeature: ref.name };
        }
      }
    }
  }
  return null;
}

export interface PaletteHooks {
  instantiate(spec: ClassSpec): void;
}

export function renderPalette(container: HTMLElement, project: ProjectDoc | null, hooks: PaletteHooks): void {
  container.replaceChildren();
  const title = document.createElement("h2");
  title.textContent = "Palette";
  container.appendChild(title);
  for (const spec of palette(project)) {
    const button = document.createElement("button");
    button.className = "palette-item";
    button.textContent = spec.name;
    button.addEventListener("click", () => hooks.instantiate(spec));
    container.appendChild(button);
  }
}
