import { describe, expect, it } from "vitest";

import { STYLE, buildOverlay, draftRectOps } from "../src/overlay.js";
import type { AnnotationRecord, DiffPayload } from "../src/types.js";

function rec(id: string, ignore = false): AnnotationRecord {
  return {
    id,
    frame: "v0/0",
    label: ignore ? "people" : "person",
    box: { x: 10, y: 20, w: 41, h: 100 },
    visible: null,
    ignore,
    source: "new",
  };
}

const DIFF: DiffPayload = {
  frame: "v0/0",
  matched: [{
    original: { id: "o1", label: "person",
                box: { x: 12, y: 22, w: 41, h: 100 }, ignore: false },
    new: { id: "n1", label: "person",
           box: { x: 10, y: 20, w: 41, h: 100 }, ignore: false },
    iou: 0.91,
  }],
  original_only: [{ id: "lonely", label: "person",
                    box: { x: 300, y: 20, w: 41, h: 100 }, ignore: false }],
  new_only: [],
  agreement: 0.8,
  original_ignores: [{ id: "crowd", label: "people",
                       box: { x: 400, y: 0, w: 80, h: 60 }, ignore: true }],
  new_ignores: [],
};

describe("overlay drawing conventions (style snapshot)", () => {
  it("pins the published color and dash conventions", () => {
    // original annotations red, new annotations green, ignore dashed
    expect(STYLE.original).toBe("#d62728");
    expect(STYLE.new).toBe("#2ca02c");
    expect(STYLE.ignoreDash).toEqual([6, 4]);
    expect(STYLE.solid).toEqual([]);
  });

  it("renders a full overlay as the expected op list", () => {
    const ops = buildOverlay({
      records: [rec("n1"), rec("crowd2", true)],
      diff: DIFF,
      show: "both",
      selectedId: null,
      hover: null,
    });
    expect(ops).toEqual([
      { kind: "rect", box: { x: 10, y: 20, w: 41, h: 100 },
        stroke: "#2ca02c", dash: [], width: 2 },
      { kind: "rect", box: { x: 10, y: 20, w: 41, h: 100 },
        stroke: "#2ca02c", dash: [6, 4], width: 2 },
      { kind: "rect", box: { x: 12, y: 22, w: 41, h: 100 },
        stroke: "#d62728", dash: [], width: 2 },
      { kind: "rect", box: { x: 300, y: 20, w: 41, h: 100 },
        stroke: "#d62728", dash: [], width: 2 },
      { kind: "rect", box: { x: 400, y: 0, w: 80, h: 60 },
        stroke: "#d62728", dash: [6, 4], width: 2 },
    ]);
  });

  it("hover inside a matched pair shows its IoU", () => {
    const ops = buildOverlay({
      records: [rec("n1")],
      diff: DIFF,
      show: "both",
      selectedId: null,
      hover: { x: 15, y: 30 },
    });
    const text = ops.find((o) => o.kind === "text");
    expect(text).toMatchObject({ text: "IoU 0.91" });
  });

  it("show filters hide one variant", () => {
    const onlyNew = buildOverlay({ records: [rec("n1")], diff: DIFF,
                                   show: "new", selectedId: null, hover: null });
    expect(onlyNew.every((o) => o.kind !== "rect" ||
                                o.stroke !== STYLE.original)).toBe(true);
    const onlyOrig = buildOverlay({ records: [rec("n1")], diff: DIFF,
                                    show: "original", selectedId: null,
                                    hover: null });
    expect(onlyOrig.every((o) => o.kind !== "rect" ||
                                 o.stroke !== STYLE.new)).toBe(true);
  });

  it("draft ignore rectangles are dashed, visible ones solid", () => {
    const ign = draftRectOps({ x: 0, y: 0 }, { x: 10, y: 5 }, "ignore");
    expect(ign[0]).toMatchObject({ dash: [6, 4] });
    const vis = draftRectOps({ x: 10, y: 5 }, { x: 0, y: 0 }, "visible");
    expect(vis[0]).toMatchObject({
      box: { x: 0, y: 0, w: 10, h: 5 }, dash: [],
    });
  });
});
