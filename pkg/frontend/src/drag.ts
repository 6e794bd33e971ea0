/**
 * Drag geometry for the hotspot editor.
 *
 * Tracks a pointer drag over the stage in device pixels and turns it into a
 * normalized rectangle for the API: drags below the minimum size are
 * discarded, anything reaching past the image edge is clamped to the unit
 * square first.
 */

import type { RectPayload } from "./types.js";

/** Minimum drag extent per axis, in device pixels; smaller drags are noise. */
export const MIN_DRAG_PX = 8;

export interface StageMetrics {
  left: number;
  top: number;
  width: number;
  height: number;
}

export interface DragTrack {
  startX: number;
  startY: number;
  lastX: number;
  lastY: number;
}

export function beginDrag(x: number, y: number): DragTrack {
  return { startX: x, startY: y, lastX: x, lastY: y };
}

export function updateDrag(track: DragTrack, x: number, y: number): DragTrack {
  return { ...track, lastX: x, lastY: y };
}

/** Device-pixel bounding box of the drag so far (direction independent). */
export function dragBoxPx(track: DragTrack): { x: number; y: number; w: number; h: number } {
  return {
    x: Math.min(track.startX, track.lastX),
    y: Math.min(track.startY, track.lastY),
    w: Math.abs(track.lastX - track.startX),
    h: Math.abs(track.lastY - track.startY),
  };
}

/**
 * Resolve a finished drag to the rectangle to persist, or null when the drag
 * is below the minimum size.  The box is clamped to the stage first, so a
 * drag running off the image edge still yields a valid rectangle.
 */
export function finishDrag(track: DragTrack, stage: StageMetrics): RectPayload | null {
  const box = dragBoxPx(track);
  if (box.w <= MIN_DRAG_PX || box.h <= MIN_DRAG_PX) {
    return null;
  }
  const rawX0 = (box.x - stage.left) / stage.width;
  const rawY0 = (box.y - stage.top) / stage.height;
  const rawX1 = (box.x + box.w - stage.left) / stage.width;
  const rawY1 = (box.y + box.h - stage.top) / stage.height;
  const x0 = clamp01(rawX0);
  const y0 = clamp01(rawY0);
  const x1 = clamp01(rawX1);
  const y1 = clamp01(rawY1);
  if (x1 <= x0 || y1 <= y0) {
    return null; // degenerate after clamping (entirely outside the image)
  }
  // Unclamped extents divide directly so pixel-aligned drags stay exact
  // (60px / 600px is 0.1, not 0.0999...); clamped ones must subtract.
  const w = x0 === rawX0 && x1 === rawX1 ? box.w / stage.width : x1 - x0;
  const h = y0 === rawY0 && y1 === rawY1 ? box.h / stage.height : y1 - y0;
  return { x: x0, y: y0, w, h };
}

export function toNormalizedPoint(
  clientX: number,
  clientY: number,
  stage: StageMetrics,
): { x: number; y: number } | null {
  const x = (clientX - stage.left) / stage.width;
  const y = (clientY - stage.top) / stage.height;
  if (x < 0 || x > 1 || y < 0 || y > 1) {
    return null;
  }
  return { x, y };
}

function clamp01(v: number): number {
  return Math.min(1, Math.max(0, v));
}
