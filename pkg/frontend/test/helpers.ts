import { Capabilities, ProjectDoc, RenderedElement } from "../src/protocol.js";

export function caps(overrides: Partial<Capabilities> = {}): Capabilities {
  return {
    measurable: true,
    draggable: true,
    resizeHandles: ["N", "NE", "E", "SE", "S", "SW", "W", "NW"],
    rotatable: false,
    ...overrides,
  };
}

export function rendered(overrides: Partial<RenderedElement> = {}): RenderedElement {
  return {
    html: "<div>150</div>",
    attributes: {},
    tier: "Inherited",
    view: "aircraft-positional",
    rule: "aircraft-positional#0",
    capabilities: caps(),
    layout: {
      elementId: "o2",
      x: 300,
      y: 50,
      width: 10,
      height: 5,
      rotation: 0,
      anchor: "bottomLeft",
    },
    ...overrides,
  };
}

export function project(): ProjectDoc {
  return {
    formatVersion: 1,
    metamodel: {
      name: "aircraft",
      classes: [
        {
          name: "Hangar",
          attributes: [{ name: "name", type: "string" }],
          references: [{ name: "airplanes", target: "Airplane", containment: true, lower: 0, upper: null }],
        },
        {
          name: "Airplane",
          abstract: true,
          attributes: [
            { name: "seats", type: "int" },
            { name: "length", type: "float" },
          ],
        },
        { name: "Motorized", superclasses: ["Airplane"], attributes: [{ name: "tankCapacity", type: "float" }] },
        { name: "Glider", superclasses: ["Airplane"] },
      ],
    },
    model: {
      id: "m1",
      objects: {
        o1: { class: "Hangar", slots: { name: "ROMAFIU1234", airplanes: ["o2"] } },
        o2: { class: "Motorized", slots: { seats: 150, length: 63.0 } },
      },
    },
    views: [
      { name: "aircraft-positional", stackRank: 1 },
      { name: "hangar-labels", stackRank: 0 },
    ],
    layouts: {},
    scales: {},
  };
}
