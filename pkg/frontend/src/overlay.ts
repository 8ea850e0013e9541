// Rendering conventions for the review overlay, kept as data so tests can
// pin them: original annotations red, new annotations green, ignore
// regions dashed in their set's color. Builders emit draw ops in image
// coordinates; the canvas renderer applies the viewport transform.

import type { AnnotationRecord, Box, DiffPayload, Point } from "./types.js";

export const STYLE = {
  original: "#d62728", // red
  new: "#2ca02c", // green
  visible: "#1f77b4", // blue, attached visible regions
  draft: "#ff8c00", // in-progress line / drag rectangle
  selected: "#111111",
  ignoreDash: [6, 4] as number[],
  solid: [] as number[],
  lineWidth: 2,
} as const;

export type DrawOp =
  | { kind: "rect"; box: Box; stroke: string; dash: number[]; width: number }
  | { kind: "line"; from: Point; to: Point; stroke: string; width: number }
  | { kind: "text"; at: Point; text: string; fill: string };

export interface OverlayInput {
  records: AnnotationRecord[];
  diff: DiffPayload | null; // original-vs-new comparison, when loaded
  show: "new" | "original" | "both";
  selectedId: string | null;
  hover: Point | null; // image coordinates
}

function rect(box: Box, stroke: string, dashed: boolean,
              width: number = STYLE.lineWidth): DrawOp {
  return { kind: "rect", box, stroke,
           dash: dashed ? [...STYLE.ignoreDash] : [...STYLE.solid], width };
}

function contains(box: Box, p: Point): boolean {
  return p.x >= box.x && p.x <= box.x + box.w &&
    p.y >= box.y && p.y <= box.y + box.h;
}

export function buildOverlay(input: OverlayInput): DrawOp[] {
  const ops: DrawOp[] = [];
  if (input.show !== "original") {
    for (const r of input.records) {
      ops.push(rect(r.box, STYLE.new, r.ignore));
      if (r.visible) ops.push(rect(r.visible, STYLE.visible, false, 1));
      if (r.id === input.selectedId) {
        ops.push(rect(r.box, STYLE.selected, false, 1));
      }
    }
  }
  if (input.show !== "new" && input.diff) {
    const originals: { box: Box; ignore: boolean }[] = [
      ...input.diff.matched.map((m) => ({ box: m.original.box, ignore: false })),
      ...input.diff.original_only.map((b) => ({ box: b.box, ignore: false })),
      ...input.diff.original_ignores.map((b) => ({ box: b.box, ignore: true })),
    ];
    for (const o of originals) {
      ops.push(rect(o.box, STYLE.original, o.ignore));
    }
  }
  if (input.hover && input.diff) {
    for (const m of input.diff.matched) {
      if (contains(m.original.box, input.hover) || contains(m.new.box, input.hover)) {
        ops.push({
          kind: "text",
          at: { x: m.new.box.x, y: m.new.box.y - 4 },
          text: `IoU ${m.iou.toFixed(2)}`,
          fill: STYLE.selected,
        });
        break;
      }
    }
  }
  return ops;
}

export function draftLineOps(head: Point, cursor: Point): DrawOp[] {
  return [
    { kind: "line", from: head, to: cursor, stroke: STYLE.draft, width: 2 },
    { kind: "text", at: { x: head.x + 4, y: head.y - 4 }, text: "head",
      fill: STYLE.draft },
  ];
}

export function draftRectOps(start: Point, cursor: Point,
                             mode: "ignore" | "visible"): DrawOp[] {
  const box: Box = {
    x: Math.min(start.x, cursor.x),
    y: Math.min(start.y, cursor.y),
    w: Math.abs(cursor.x - start.x),
    h: Math.abs(cursor.y - start.y),
  };
  return [rect(box, STYLE.draft, mode === "ignore", 1)];
}
