import { describe, expect, it } from "vitest";

import { parseSlotValue } from "../src/inspector.js";
import { findContainer, nextObjectId } from "../src/palette.js";
import { project } from "./helpers.js";

describe("nextObjectId", () => {
  it("continues the oN numbering", () => {
    expect(nextObjectId(project())).toBe("o3");
  });

  it("ignores ids outside the scheme", () => {
    const doc = project();
    doc.model.objects["custom-id"] = { class: "Glider", slots: {} };
    expect(nextObjectId(doc)).toBe("o3");
  });
});

describe("findContainer", () => {
  it("places a subclass into a containment reference of its supertype", () => {
    expect(findContainer(project(), "Glider")).toEqual({
      containerId: "o1",
      containerFeature: "airplanes",
    });
    expect(findContainer(project(), "Motorized")).toEqual({
      containerId: "o1",
      containerFeature: "airplanes",
    });
  });

  it("returns null when nothing can contain the class", () => {
    expect(findContainer(project(), "Hangar")).toBeNull();
  });
});

describe("parseSlotValue", () => {
  it("converts by declared type", () => {
    expect(parseSlotValue("int", "160")).toBe(160);
    expect(parseSlotValue("int", "160.9")).toBe(160);
    expect(parseSlotValue("float", "63.5")).toBe(63.5);
    expect(parseSlotValue("boolean", "true")).toBe(true);
    expect(parseSlotValue("boolean", "no")).toBe(false);
    expect(parseSlotValue("string", "A380")).toBe("A380");
  });

  it("passes through unparseable numerics so the server can complain", () => {
    expect(parseSlotValue("int", "many")).toBe("many");
  });
});
