// Canvas back end: applies the viewport transform and replays draw ops.
// Stroke widths and dash patterns are kept in screen pixels so zooming
// does not fatten outlines.

import type { DrawOp } from "./overlay.js";
import { imageToScreen, type Viewport } from "./view.js";

export function renderOps(ctx: CanvasRenderingContext2D, ops: DrawOp[],
                          vp: Viewport): void {
  for (const op of ops) {
    if (op.kind === "rect") {
      const tl = imageToScreen({ x: op.box.x, y: op.box.y }, vp);
      ctx.save();
      ctx.strokeStyle = op.stroke;
      ctx.lineWidth = op.width;
      ctx.setLineDash(op.dash);
      ctx.strokeRect(tl.x, tl.y, op.box.w * vp.zoom, op.box.h * vp.zoom);
      ctx.restore();
    } else if (op.kind === "line") {
      const a = imageToScreen(op.from, vp);
      const b = imageToScreen(op.to, vp);
      ctx.save();
      ctx.strokeStyle = op.stroke;
      ctx.lineWidth = op.width;
      ctx.beginPath();
      ctx.moveTo(a.x, a.y);
      ctx.lineTo(b.x, b.y);
      ctx.stroke();
      ctx.restore();
    } else {
      const at = imageToScreen(op.at, vp);
      ctx.save();
      ctx.fillStyle = op.fill;
      ctx.font = "12px sans-serif";
      ctx.fillText(op.text, at.x, at.y);
      ctx.restore();
    }
  }
}
