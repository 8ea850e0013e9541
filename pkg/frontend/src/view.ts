// The single place screen coordinates and image coordinates meet. All
// stored and transmitted geometry is in image pixels; the viewport maps
// it to canvas pixels for display and maps pointer events back.

import type { Point } from "./types.js";

export interface Viewport {
  zoom: number;
  panX: number;
  panY: number;
}

export const IDENTITY: Viewport = { zoom: 1, panX: 0, panY: 0 };

export function imageToScreen(p: Point, vp: Viewport): Point {
  return { x: p.x * vp.zoom + vp.panX, y: p.y * vp.zoom + vp.panY };
}

export function screenToImage(p: Point, vp: Viewport): Point {
  return { x: (p.x - vp.panX) / vp.zoom, y: (p.y - vp.panY) / vp.zoom };
}

export function zoomAround(vp: Viewport, screenPoint: Point, factor: number,
                           min = 0.2, max = 16): Viewport {
  const zoom = Math.min(Math.max(vp.zoom * factor, min), max);
  const anchor = screenToImage(screenPoint, vp);
  // keep the image point under the cursor fixed on screen
  return {
    zoom,
    panX: screenPoint.x - anchor.x * zoom,
    panY: screenPoint.y - anchor.y * zoom,
  };
}

export function panBy(vp: Viewport, dx: number, dy: number): Viewport {
  return { zoom: vp.zoom, panX: vp.panX + dx, panY: vp.panY + dy };
}
