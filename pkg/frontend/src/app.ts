// DOM wiring: canvas, pointer and keyboard events. All logic lives in the
// store/overlay/view modules; this file only forwards events and redraws.

import { ApiClient } from "./api.js";
import { buildOverlay, draftLineOps, draftRectOps, type DrawOp } from "./overlay.js";
import { renderOps } from "./render.js";
import { ClientStore } from "./store.js";
import { IDENTITY, panBy, screenToImage, zoomAround, type Viewport } from "./view.js";
import type { Point } from "./types.js";

const canvas = document.getElementById("frame") as HTMLCanvasElement;
const status = document.getElementById("status") as HTMLElement;
const ctx = canvas.getContext("2d")!;

const api = new ApiClient();
const store = new ClientStore(api);
let viewport: Viewport = { ...IDENTITY };
let cursor: Point | null = null;
let image: HTMLImageElement | null = null;
let pendingMode: "ignore" | "visible" | null = null;

function screenPoint(ev: MouseEvent): Point {
  const r = canvas.getBoundingClientRect();
  return { x: ev.clientX - r.left, y: ev.clientY - r.top };
}

function imagePoint(ev: MouseEvent): Point {
  return screenToImage(screenPoint(ev), viewport);
}

function setStatus(): void {
  const parts = [
    `frame ${store.index + 1}/${store.frames.length} (${store.frameId})`,
    `rev ${store.revision}`,
    `overlay: ${store.show}`,
  ];
  if (store.selectedId) parts.push(`selected ${store.selectedId}`);
  if (pendingMode) parts.push(`drag to mark ${pendingMode} region`);
  if (store.notice) parts.push(store.notice);
  status.textContent = parts.join("  |  ");
}

function redraw(): void {
  ctx.setTransform(1, 0, 0, 1, 0, 0);
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (image) {
    ctx.drawImage(image, viewport.panX, viewport.panY,
      image.naturalWidth * viewport.zoom, image.naturalHeight * viewport.zoom);
  } else {
    ctx.fillStyle = "#202020";
    ctx.fillRect(0, 0, canvas.width, canvas.height);
  }
  const ops: DrawOp[] = buildOverlay({
    records: store.records,
    diff: store.diff,
    show: store.show,
    selectedId: store.selectedId,
    hover: cursor,
  });
  if (store.draft.kind === "line-started" && cursor) {
    ops.push(...draftLineOps(store.draft.head, cursor));
  }
  if (store.draft.kind === "rect-drag" && cursor) {
    ops.push(...draftRectOps(store.draft.start, cursor, store.draft.mode));
  }
  renderOps(ctx, ops, viewport);
  setStatus();
}

async function loadImage(): Promise<void> {
  image = null;
  const img = new Image();
  img.src = api.imageUrl(store.frameId);
  try {
    await img.decode();
    image = img;
  } catch {
    image = null; // frame without an image: annotate on the dark canvas
  }
  redraw();
}

canvas.addEventListener("mousedown", (ev) => {
  const p = imagePoint(ev);
  if (pendingMode) {
    store.startRect(pendingMode, p);
    pendingMode = null;
    redraw();
    return;
  }
  if (store.draft.kind === "line-started") {
    void store.finishLine(p).then(redraw);
    return;
  }
  if (ev.shiftKey) {
    store.startLine(p);
  } else {
    store.select(p);
  }
  redraw();
});

canvas.addEventListener("mouseup", (ev) => {
  if (store.draft.kind === "rect-drag") {
    void store.finishRect(imagePoint(ev)).then(redraw);
  }
});

canvas.addEventListener("mousemove", (ev) => {
  cursor = imagePoint(ev);
  redraw();
});

canvas.addEventListener("wheel", (ev) => {
  ev.preventDefault();
  viewport = zoomAround(viewport, screenPoint(ev), ev.deltaY < 0 ? 1.2 : 1 / 1.2);
  redraw();
});

window.addEventListener("keydown", (ev) => {
  const actions: Record<string, () => void> = {
    ArrowRight: () => void store.nextFrame().then(loadImage),
    ArrowLeft: () => void store.previousFrame().then(loadImage),
    o: () => { store.toggleOverlay(); redraw(); },
    i: () => { pendingMode = "ignore"; redraw(); },
    v: () => { pendingMode = "visible"; redraw(); },
    Escape: () => { store.cancelDraft(); pendingMode = null; redraw(); },
    Delete: () => void store.deleteSelected().then(redraw),
    r: () => void store.reload().then(loadImage),
    w: () => { viewport = panBy(viewport, 0, 40); redraw(); },
    s: () => { viewport = panBy(viewport, 0, -40); redraw(); },
    a: () => { viewport = panBy(viewport, 40, 0); redraw(); },
    d: () => { viewport = panBy(viewport, -40, 0); redraw(); },
  };
  actions[ev.key]?.();
});

void store.init().then(loadImage).catch((err) => {
  status.textContent = `failed to reach the review service: ${String(err)}`;
});
