import { describe, expect, it } from "vitest";

import { beginDrag, dragBoxPx, finishDrag, toNormalizedPoint, updateDrag } from "../src/drag.js";
import type { StageMetrics } from "../src/drag.js";

const STAGE: StageMetrics = { left: 0, top: 0, width: 800, height: 600 };

function drag(x0: number, y0: number, x1: number, y1: number) {
  return updateDrag(beginDrag(x0, y0), x1, y1);
}

describe("finishDrag", () => {
  it("converts a 100x60 px drag to a normalized rect", () => {
    const rect = finishDrag(drag(80, 120, 180, 180), STAGE);
    expect(rect).toEqual({ x: 0.1, y: 0.2, w: 0.125, h: 0.1 });
  });

  it("discards a 3x3 px drag", () => {
    expect(finishDrag(drag(10, 10, 13, 13), STAGE)).toBeNull();
  });

  it("discards a drag thin on one axis only", () => {
    expect(finishDrag(drag(10, 10, 200, 14), STAGE)).toBeNull();
  });

  it("normalizes direction (drag up-left)", () => {
    const rect = finishDrag(drag(180, 180, 80, 120), STAGE);
    expect(rect).toEqual({ x: 0.1, y: 0.2, w: 0.125, h: 0.1 });
  });

  it("clamps a drag running past the image edge", () => {
    const rect = finishDrag(drag(700, 500, 900, 700), STAGE);
    // clamped extents subtract so the far edge lands exactly on 1
    expect(rect).toEqual({ x: 0.875, y: 500 / 600, w: 0.125, h: 1 - 500 / 600 });
    expect(rect!.y + rect!.h).toBe(1);
    expect(rect!.x + rect!.w).toBe(1);
  });

  it("discards a drag entirely outside the stage", () => {
    const offside: StageMetrics = { left: 1000, top: 0, width: 800, height: 600 };
    expect(finishDrag(drag(10, 10, 200, 200), offside)).toBeNull();
  });

  it("respects stage offset", () => {
    const offset: StageMetrics = { left: 100, top: 50, width: 800, height: 600 };
    const rect = finishDrag(drag(180, 170, 280, 230), offset);
    expect(rect).toEqual({ x: 0.1, y: 0.2, w: 0.125, h: 0.1 });
  });
});

describe("dragBoxPx", () => {
  it("tracks the live bounding box", () => {
    expect(dragBoxPx(drag(50, 60, 20, 100))).toEqual({ x: 20, y: 60, w: 30, h: 40 });
  });
});

describe("toNormalizedPoint", () => {
  it("maps client to unit coordinates", () => {
    expect(toNormalizedPoint(400, 300, STAGE)).toEqual({ x: 0.5, y: 0.5 });
  });

  it("returns null outside the stage", () => {
    expect(toNormalizedPoint(900, 300, STAGE)).toBeNull();
  });
});
