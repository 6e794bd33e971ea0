/**
 * Editor view state: which mode we are in, which screen and hotspot are
 * active, whether a drag is in progress and whether edits are still being
 * written back.
 *
 * The two invariants everything else leans on: a drag rectangle can only
 * exist in Edit mode, and entering View mode first drains pending writes
 * (so the session the viewer starts from always sees the latest edits).
 */

import type { DragTrack } from "./drag.js";

export type Mode = "edit" | "view";

export class EditorViewState {
  mode: Mode = "edit";
  activeScreenId: string | null = null;
  selectedHotspotId: string | null = null;
  drag: DragTrack | null = null;

  private pending: Promise<unknown> = Promise.resolve();
  private pendingCount = 0;

  get dirty(): boolean {
    return this.pendingCount > 0;
  }

  /** Chain a write; the dirty flag stays up until the chain drains. */
  track<T>(work: Promise<T>): Promise<T> {
    this.pendingCount += 1;
    const settle = () => {
      this.pendingCount -= 1;
    };
    work.then(settle, settle);
    this.pending = this.pending.then(() => work.catch(() => undefined));
    return work;
  }

  /** Resolves once every tracked write has settled. */
  async drain(): Promise<void> {
    while (this.pendingCount > 0) {
      await this.pending;
    }
  }

  beginDrag(track: DragTrack): void {
    if (this.mode !== "edit") {
      throw new Error("drag is an Edit-mode gesture");
    }
    this.drag = track;
  }

  endDrag(): void {
    this.drag = null;
  }

  async enterView(): Promise<void> {
    this.drag = null;
    this.selectedHotspotId = null;
    await this.drain();
    this.mode = "view";
  }

  enterEdit(): void {
    this.mode = "edit";
  }
}
