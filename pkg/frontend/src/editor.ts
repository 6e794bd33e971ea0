/**
 * The editor/viewer surface.
 *
 * Edit mode: stage with the active screen's image, drag to draw hotspots,
 * click one to configure it (name, destination screen, system actions).
 * View mode: the same stage driven by a simulation session; clicks go to the
 * API and whatever screen the session answers with is what gets drawn.
 * A screen bar sits at the bottom, the state-machine graph and trace panel
 * on the side.
 *
 * Single source of truth: every rectangle, state, edge and trace row shown
 * here was returned by the API; this module never derives model facts.
 */

import { ApiClient, ApiError } from "./api.js";
import { beginDrag, dragBoxPx, finishDrag, updateDrag, toNormalizedPoint } from "./drag.js";
import type { StageMetrics } from "./drag.js";
import { EditorViewState } from "./editorState.js";
import { buildGraph } from "./graph.js";
import type { GraphViewModel } from "./graph.js";
import type {
  HotspotPayload,
  ProjectPayload,
  ScreenPayload,
  SessionPayload,
  TraceEventPayload,
} from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface EditorOptions {
  /** Override stage geometry; tests must, jsdom has no layout. */
  stageMetrics?: () => StageMetrics;
  /** How long an S-behaviour highlight stays on, in ms. */
  highlightMs?: number;
}

export class Editor {
  readonly state = new EditorViewState();
  project: ProjectPayload;
  session: SessionPayload | null = null;

  private readonly api: ApiClient;
  private readonly root: HTMLElement;
  private readonly doc: Document;
  private readonly metrics: () => StageMetrics;
  private readonly highlightMs: number;

  private stage!: HTMLElement;
  private stageImage!: HTMLImageElement;
  private dragBox!: HTMLElement;
  private screenBar!: HTMLElement;
  private tracePanel!: HTMLElement;
  private graphHost!: HTMLElement;
  private noticeHost!: HTMLElement;
  private modeButton!: HTMLButtonElement;
  private convertButton!: HTMLButtonElement;
  private dialog!: HTMLElement;

  constructor(api: ApiClient, root: HTMLElement, project: ProjectPayload,
              options: EditorOptions = {}) {
    this.api = api;
    this.root = root;
    this.doc = root.ownerDocument;
    this.project = project;
    this.metrics = options.stageMetrics
      ?? (() => {
        const box = this.stage.getBoundingClientRect();
        return { left: box.left, top: box.top, width: box.width, height: box.height };
      });
    this.highlightMs = options.highlightMs ?? 400;
    this.state.activeScreenId = project.initial_screen
      ?? project.screens[0]?.id ?? null;
    this.buildDom();
    this.renderAll();
  }

  static async open(api: ApiClient, root: HTMLElement, projectId: string,
                    options: EditorOptions = {}): Promise<Editor> {
    return new Editor(api, root, await api.getProject(projectId), options);
  }

  // -- dom skeleton -----------------------------------------------------

  private buildDom(): void {
    this.root.classList.add("pimp-editor");
    this.root.innerHTML = `
      <header class="topbar">
        <span class="project-name"></span>
        <span class="spacer"></span>
        <button class="btn-mode" type="button">View</button>
        <button class="btn-convert" type="button">Convert to chart</button>
      </header>
      <main class="body">
        <section class="stage" tabindex="0">
          <img class="stage-image" alt="" draggable="false">
          <div class="stage-empty" hidden>no image</div>
          <div class="drag-box" hidden></div>
        </section>
        <aside class="side">
          <div class="notice" hidden></div>
          <div class="trace-panel" hidden><h3>Trace</h3><ol class="trace-rows"></ol></div>
          <div class="graph-panel" hidden><h3>State machine</h3><div class="graph-host"></div></div>
        </aside>
      </main>
      <footer class="screen-bar"></footer>
      <div class="widget-dialog" hidden>
        <h3>Hotspot</h3>
        <label>Name <input class="dlg-name"></label>
        <label>When clicked, go to
          <select class="dlg-target"></select>
        </label>
        <label>System actions <input class="dlg-actions" placeholder="beep, sync"></label>
        <details class="dlg-advanced">
          <summary>Advanced</summary>
          <dl class="dlg-generated"></dl>
        </details>
        <p class="dlg-error" hidden></p>
        <div class="dlg-buttons">
          <button class="dlg-save" type="button">Save</button>
          <button class="dlg-delete" type="button">Delete hotspot</button>
          <button class="dlg-close" type="button">Close</button>
        </div>
      </div>`;

    const query = <T extends Element>(selector: string): T => {
      const el = this.root.querySelector(selector);
      if (!el) throw new Error(`missing ${selector}`);
      return el as T;
    };
    this.stage = query(".stage");
    this.stageImage = query(".stage-image");
    this.dragBox = query(".drag-box");
    this.screenBar = query(".screen-bar");
    this.tracePanel = query(".trace-panel");
    this.graphHost = query(".graph-panel");
    this.noticeHost = query(".notice");
    this.modeButton = query(".btn-mode");
    this.convertButton = query(".btn-convert");
    this.dialog = query(".widget-dialog");
    query<HTMLElement>(".project-name").textContent = this.project.name;

    this.stage.addEventListener("mousedown", (e) => this.onStageMouseDown(e as MouseEvent));
    this.stage.addEventListener("click", (e) => this.onStageClick(e as MouseEvent));
    this.modeButton.addEventListener("click", () => void this.toggleMode());
    this.convertButton.addEventListener("click", () => void this.convertAndShowGraph());
    this.dialog.querySelector(".dlg-save")!.addEventListener("click", () => void this.saveDialog());
    this.dialog.querySelector(".dlg-close")!.addEventListener("click", () => this.closeDialog());
    this.dialog.querySelector(".dlg-delete")!.addEventListener("click", () => void this.deleteFromDialog());
    this.dialog.querySelector(".dlg-advanced")!.addEventListener(
      "toggle", () => void this.fillGeneratedNames(), true);
  }

  // -- lookups ---------------------------------------------------------

  activeScreen(): ScreenPayload | null {
    return this.project.screens.find((s) => s.id === this.state.activeScreenId) ?? null;
  }

  private hotspotById(id: string): HotspotPayload | null {
    return this.activeScreen()?.hotspots.find((h) => h.id === id) ?? null;
  }

  // -- rendering ---------------------------------------------------------

  renderAll(): void {
    this.root.classList.toggle("mode-view", this.state.mode === "view");
    this.root.classList.toggle("mode-edit", this.state.mode === "edit");
    this.modeButton.textContent = this.state.mode === "edit" ? "View" : "Edit";
    this.convertButton.disabled = this.project.screens.length === 0;
    this.renderStage();
    this.renderScreenBar();
    this.renderTrace();
  }

  private renderStage(): void {
    for (const el of Array.from(this.stage.querySelectorAll(".hotspot-box"))) {
      el.remove();
    }
    const emptyBadge = this.stage.querySelector(".stage-empty") as HTMLElement;
    if (this.state.mode === "view" && this.session) {
      this.setStageImage(this.session.image);
      emptyBadge.hidden = this.session.image !== null;
      for (const h of this.session.hotspots) {
        this.stage.appendChild(this.hotspotBox(h.id, h.rect, {
          linked: h.linked, view: true,
        }));
      }
      return;
    }
    const screen = this.activeScreen();
    this.setStageImage(screen?.image?.content_hash ?? null);
    emptyBadge.hidden = Boolean(screen?.image);
    if (!screen) return;
    for (const h of screen.hotspots) {
      const box = this.hotspotBox(h.id, h.rect, {
        linked: h.link_target !== null, view: false,
      });
      box.classList.toggle("selected", h.id === this.state.selectedHotspotId);
      this.stage.appendChild(box);
    }
  }

  private setStageImage(hash: string | null): void {
    if (hash) {
      this.stageImage.src = this.api.imageUrl(this.project.id, hash);
      this.stageImage.hidden = false;
    } else {
      this.stageImage.removeAttribute("src");
      this.stageImage.hidden = true;
    }
  }

  private hotspotBox(id: string, rect: { x: number; y: number; w: number; h: number },
                     flags: { linked: boolean; view: boolean }): HTMLElement {
    const box = this.doc.createElement("div");
    box.className = "hotspot-box";
    box.dataset.hotspot = id;
    box.classList.toggle("linked", flags.linked);
    box.classList.toggle("view", flags.view);
    box.style.left = `${rect.x * 100}%`;
    box.style.top = `${rect.y * 100}%`;
    box.style.width = `${rect.w * 100}%`;
    box.style.height = `${rect.h * 100}%`;
    return box;
  }

  private renderScreenBar(): void {
    this.screenBar.innerHTML = "";
    for (const screen of this.project.screens) {
      const tile = this.doc.createElement("button");
      tile.type = "button";
      tile.className = "screen-tile";
      tile.dataset.screen = screen.id;
      tile.classList.toggle("active", screen.id === this.state.activeScreenId);
      const thumb = this.doc.createElement("span");
      thumb.className = "thumb";
      if (screen.image) {
        const img = this.doc.createElement("img");
        img.src = this.api.imageUrl(this.project.id, screen.image.content_hash);
        img.alt = "";
        thumb.appendChild(img);
      }
      tile.appendChild(thumb);
      const label = this.doc.createElement("span");
      label.className = "screen-name";
      label.textContent = screen.name;
      tile.appendChild(label);
      if (screen.id === this.project.initial_screen) {
        const badge = this.doc.createElement("span");
        badge.className = "initial-badge";
        badge.textContent = "start";
        tile.appendChild(badge);
      }
      tile.addEventListener("click", () => {
        this.state.activeScreenId = screen.id;
        this.renderAll();
      });
      this.screenBar.appendChild(tile);
    }
    const add = this.doc.createElement("button");
    add.type = "button";
    add.className = "screen-add";
    add.textContent = "+ screen";
    add.addEventListener("click", () => void this.addScreenFlow());
    this.screenBar.appendChild(add);
  }

  private renderTrace(): void {
    const rows = this.tracePanel.querySelector(".trace-rows") as HTMLElement;
    this.tracePanel.hidden = this.state.mode !== "view";
    rows.innerHTML = "";
    if (!this.session) return;
    for (const event of this.session.trace) {
      rows.appendChild(this.traceRow(event));
    }
  }

  private traceRow(event: TraceEventPayload): HTMLElement {
    const row = this.doc.createElement("li");
    row.className = `trace-row kind-${event.kind.toLowerCase()}`;
    row.dataset.kind = event.kind;
    row.textContent = event.kind === "Navigate"
      ? `${event.source} → ${event.result} (${event.behaviour})`
      : event.kind === "SBehaviour"
        ? `${event.source}: ${event.behaviour}`
        : `reset → ${event.result}`;
    return row;
  }

  // -- edit-mode interaction ----------------------------------------------

  private onStageMouseDown(event: MouseEvent): void {
    if (this.state.mode !== "edit") return;
    const target = event.target as HTMLElement;
    const hotspotEl = target.closest?.(".hotspot-box") as HTMLElement | null;
    if (hotspotEl?.dataset.hotspot) {
      this.selectHotspot(hotspotEl.dataset.hotspot);
      return;
    }
    this.state.beginDrag(beginDrag(event.clientX, event.clientY));
    this.dragBox.hidden = false;
    this.positionDragBox();
    const onMove = (e: Event) => {
      if (!this.state.drag) return;
      const me = e as MouseEvent;
      this.state.drag = updateDrag(this.state.drag, me.clientX, me.clientY);
      this.positionDragBox();
    };
    const onUp = () => {
      this.doc.removeEventListener("mousemove", onMove);
      this.doc.removeEventListener("mouseup", onUp);
      void this.finishDragCreate();
    };
    this.doc.addEventListener("mousemove", onMove);
    this.doc.addEventListener("mouseup", onUp);
  }

  private positionDragBox(): void {
    if (!this.state.drag) return;
    const stage = this.metrics();
    const box = dragBoxPx(this.state.drag);
    this.dragBox.style.left = `${box.x - stage.left}px`;
    this.dragBox.style.top = `${box.y - stage.top}px`;
    this.dragBox.style.width = `${box.w}px`;
    this.dragBox.style.height = `${box.h}px`;
  }

  private async finishDragCreate(): Promise<void> {
    const track = this.state.drag;
    this.state.endDrag();
    this.dragBox.hidden = true;
    const screen = this.activeScreen();
    if (!track || !screen) return;
    const rect = finishDrag(track, this.metrics());
    if (rect === null) return; // sub-minimum drags are discarded silently
    try {
      const hotspot = await this.state.track(
        this.api.addHotspot(this.project.id, screen.id, rect));
      screen.hotspots.push(hotspot);
      this.renderStage();
      this.selectHotspot(hotspot.id);
    } catch (err) {
      this.showNotice(err);
    }
  }

  private selectHotspot(id: string): void {
    this.state.selectedHotspotId = id;
    this.renderStage();
    this.openDialog(id);
  }

  // -- widget dialog -----------------------------------------------------

  openDialog(hotspotId: string): void {
    const screen = this.activeScreen();
    const hotspot = this.hotspotById(hotspotId);
    if (!screen || !hotspot) return;
    this.dialog.hidden = false;
    this.dialog.dataset.hotspot = hotspot.id;
    (this.dialog.querySelector(".dlg-name") as HTMLInputElement).value = hotspot.name;
    const select = this.dialog.querySelector(".dlg-target") as HTMLSelectElement;
    select.innerHTML = "";
    const none = this.doc.createElement("option");
    none.value = "";
    none.textContent = "(nowhere)";
    select.appendChild(none);
    for (const s of this.project.screens) {
      const option = this.doc.createElement("option");
      option.value = s.id;
      option.textContent = s.name;
      select.appendChild(option);
    }
    select.value = hotspot.link_target ?? "";
    (this.dialog.querySelector(".dlg-actions") as HTMLInputElement).value =
      hotspot.s_behaviours.map((n) => n.replace(/^S_/, "")).join(", ");
    const error = this.dialog.querySelector(".dlg-error") as HTMLElement;
    error.hidden = true;
    error.textContent = "";
    (this.dialog.querySelector(".dlg-generated") as HTMLElement).innerHTML = "";
  }

  closeDialog(): void {
    this.dialog.hidden = true;
    delete this.dialog.dataset.hotspot;
    this.state.selectedHotspotId = null;
    this.renderStage();
  }

  private async saveDialog(): Promise<void> {
    const screen = this.activeScreen();
    const id = this.dialog.dataset.hotspot;
    if (!screen || !id) return;
    const hotspot = this.hotspotById(id);
    if (!hotspot) return;
    const name = (this.dialog.querySelector(".dlg-name") as HTMLInputElement).value.trim();
    const target = (this.dialog.querySelector(".dlg-target") as HTMLSelectElement).value;
    const actions = (this.dialog.querySelector(".dlg-actions") as HTMLInputElement).value
      .split(",")
      .map((part) => part.trim())
      .filter((part) => part.length > 0)
      .map(asSystemActionName);
    try {
      const updated = await this.state.track(this.api.patchHotspot(
        this.project.id, screen.id, id, {
          name,
          link_target: target === "" ? null : target,
          s_behaviours: actions,
        }));
      screen.hotspots[screen.hotspots.indexOf(hotspot)] = updated;
      this.renderStage();
      this.closeDialog();
    } catch (err) {
      const error = this.dialog.querySelector(".dlg-error") as HTMLElement;
      error.hidden = false;
      error.textContent = err instanceof ApiError
        ? `${err.code}: ${err.message}`
        : String(err);
    }
  }

  private async deleteFromDialog(): Promise<void> {
    const screen = this.activeScreen();
    const id = this.dialog.dataset.hotspot;
    if (!screen || !id) return;
    await this.state.track(this.api.deleteHotspot(this.project.id, screen.id, id));
    screen.hotspots = screen.hotspots.filter((h) => h.id !== id);
    this.closeDialog();
  }

  /** Advanced disclosure: the names the converter generated, fetched fresh. */
  private async fillGeneratedNames(): Promise<void> {
    const id = this.dialog.dataset.hotspot;
    const host = this.dialog.querySelector(".dlg-generated") as HTMLElement;
    if (!id || host.childElementCount > 0) return;
    try {
      const report = await this.api.convert(this.project.id);
      const widget = report.name_map.widgets[id];
      const behaviour = report.name_map.behaviours[id];
      host.innerHTML = "";
      const add = (term: string, detail: string) => {
        const dt = this.doc.createElement("dt");
        dt.textContent = term;
        const dd = this.doc.createElement("dd");
        dd.textContent = detail;
        host.append(dt, dd);
      };
      if (widget) add("widget", `${widget[1]} (state ${widget[0]})`);
      add("navigation behaviour", behaviour ?? "none (not linked)");
    } catch {
      host.textContent = "unavailable until the prototype converts cleanly";
    }
  }

  // -- screens ----------------------------------------------------------

  private async addScreenFlow(): Promise<void> {
    const win = this.doc.defaultView;
    const name = win?.prompt?.("Screen name", `Screen ${this.project.screens.length + 1}`);
    if (!name) return;
    try {
      const screen = await this.state.track(this.api.addScreen(this.project.id, name));
      this.project.screens.push(screen);
      if (this.project.screens.length === 1) {
        this.project.initial_screen = screen.id;
      }
      this.state.activeScreenId = screen.id;
      this.renderAll();
    } catch (err) {
      this.showNotice(err);
    }
  }

  // -- mode toggle and viewer ------------------------------------------------

  async toggleMode(): Promise<void> {
    if (this.state.mode === "edit") {
      await this.state.enterView(); // drains pending writes first
      try {
        this.session = await this.api.startSession(this.project.id);
      } catch (err) {
        this.state.enterEdit();
        this.showNotice(err);
        this.renderAll();
        return;
      }
      this.closeDialog();
      this.renderAll();
    } else {
      this.state.enterEdit();
      this.session = null; // fresh session on every View entry
      this.renderAll();
    }
  }

  private onStageClick(event: MouseEvent): void {
    if (this.state.mode !== "view" || !this.session) return;
    const point = toNormalizedPoint(event.clientX, event.clientY, this.metrics());
    if (!point) return;
    void this.viewerClick(point.x, point.y);
  }

  private async viewerClick(x: number, y: number): Promise<void> {
    if (!this.session) return;
    const result = await this.api.click(this.session.id, x, y);
    this.session = result.session;
    if (result.event === null) {
      return; // no-op clicks change nothing, not even the trace
    }
    this.renderStage();
    this.renderTrace();
    if (result.event.kind === "SBehaviour" && result.event.hotspot_id) {
      this.flashHighlight(result.event.hotspot_id);
    }
  }

  private flashHighlight(hotspotId: string): void {
    const box = this.stage.querySelector(`[data-hotspot="${hotspotId}"]`);
    if (!box) return;
    box.classList.add("highlight");
    const win = this.doc.defaultView;
    win?.setTimeout(() => box.classList.remove("highlight"), this.highlightMs);
  }

  // -- graph -------------------------------------------------------------

  async convertAndShowGraph(): Promise<void> {
    this.hideNotice();
    try {
      const report = await this.api.convert(this.project.id);
      const analysis = await this.api.analysis(this.project.id);
      this.renderGraph(buildGraph(report, analysis));
    } catch (err) {
      this.showNotice(err);
    }
  }

  renderGraph(graph: GraphViewModel): void {
    this.graphHost.hidden = false;
    const host = this.graphHost.querySelector(".graph-host") as HTMLElement;
    host.innerHTML = "";
    const svg = this.doc.createElementNS(SVG_NS, "svg");
    svg.setAttribute("viewBox", `0 0 ${graph.width} ${graph.height}`);
    svg.setAttribute("class", "graph-svg");

    const defs = this.doc.createElementNS(SVG_NS, "defs");
    defs.innerHTML =
      `<marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="7" ` +
      `markerHeight="7" orient="auto-start-reverse">` +
      `<path d="M 0 0 L 10 5 L 0 10 z"/></marker>`;
    svg.appendChild(defs);

    const centers = new Map(graph.nodes.map((n) => [n.name, n]));
    for (const edge of graph.edges) {
      const from = centers.get(edge.source)!;
      const to = centers.get(edge.target)!;
      const group = this.doc.createElementNS(SVG_NS, "g");
      group.setAttribute("class", "graph-edge");
      group.setAttribute("data-source", edge.source);
      group.setAttribute("data-target", edge.target);
      const path = this.doc.createElementNS(SVG_NS, "path");
      let labelX: number;
      let labelY: number;
      if (edge.source === edge.target) {
        path.setAttribute("d",
          `M ${from.x + 30} ${from.y - 10} C ${from.x + 80} ${from.y - 50}, ` +
          `${from.x - 20} ${from.y - 60}, ${from.x} ${from.y - 18}`);
        labelX = from.x + 40;
        labelY = from.y - 48;
      } else {
        path.setAttribute("d", `M ${from.x} ${from.y} L ${to.x} ${to.y}`);
        labelX = (from.x + to.x) / 2;
        labelY = (from.y + to.y) / 2 - 6;
      }
      path.setAttribute("marker-end", "url(#arrow)");
      group.appendChild(path);
      const label = this.doc.createElementNS(SVG_NS, "text");
      label.setAttribute("x", String(labelX));
      label.setAttribute("y", String(labelY));
      label.setAttribute("class", "edge-label");
      label.textContent = edge.label;
      group.appendChild(label);
      svg.appendChild(group);
    }

    for (const node of graph.nodes) {
      const group = this.doc.createElementNS(SVG_NS, "g");
      group.setAttribute("class",
        "graph-node" + (node.isUnreachable ? " unreachable" : "")
        + (node.isInitial ? " initial" : ""));
      group.setAttribute("data-state", node.name);
      const rect = this.doc.createElementNS(SVG_NS, "rect");
      rect.setAttribute("x", String(node.x - 45));
      rect.setAttribute("y", String(node.y - 16));
      rect.setAttribute("width", "90");
      rect.setAttribute("height", "32");
      rect.setAttribute("rx", "6");
      group.appendChild(rect);
      if (node.isInitial) { // doubled border marks the initial state
        const inner = this.doc.createElementNS(SVG_NS, "rect");
        inner.setAttribute("x", String(node.x - 41));
        inner.setAttribute("y", String(node.y - 12));
        inner.setAttribute("width", "82");
        inner.setAttribute("height", "24");
        inner.setAttribute("rx", "4");
        inner.setAttribute("class", "initial-inner");
        group.appendChild(inner);
      }
      const label = this.doc.createElementNS(SVG_NS, "text");
      label.setAttribute("x", String(node.x));
      label.setAttribute("y", String(node.y + 4));
      label.setAttribute("class", "node-label");
      label.textContent = node.name;
      group.appendChild(label);
      svg.appendChild(group);
    }
    host.appendChild(svg);
  }

  // -- notices -----------------------------------------------------------

  private showNotice(err: unknown): void {
    this.noticeHost.hidden = false;
    this.noticeHost.textContent = err instanceof ApiError
      ? `${err.code}: ${err.message}${err.path ? ` (${err.path})` : ""}`
      : String(err);
  }

  private hideNotice(): void {
    this.noticeHost.hidden = true;
    this.noticeHost.textContent = "";
  }
}

/** "beep" -> "S_beep"; anything already prefixed stays untouched. */
export function asSystemActionName(label: string): string {
  const cleaned = label.replace(/[^A-Za-z0-9_]/g, "_");
  return cleaned.startsWith("S_") ? cleaned : `S_${cleaned}`;
}
