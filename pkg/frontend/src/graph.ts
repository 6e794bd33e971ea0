/**
 * Graph view model: the state-machine picture shown after "Convert to chart".
 *
 * Nodes and edges mirror the conversion report exactly and unreachable flags
 * mirror the analysis report; this module adds only presentation, a
 * deterministic layered layout keyed by state-name order so the same model
 * always draws the same picture.
 */

import type { AnalysisPayload, ConversionReportPayload } from "./types.js";

export interface GraphNode {
  name: string;
  isInitial: boolean;
  isUnreachable: boolean;
  x: number;
  y: number;
}

export interface GraphEdge {
  source: string;
  target: string;
  label: string;
}

export interface GraphViewModel {
  nodes: GraphNode[];
  edges: GraphEdge[];
  width: number;
  height: number;
}

export const LAYER_GAP = 190;
export const ROW_GAP = 90;
export const MARGIN = 60;

export function buildGraph(
  report: ConversionReportPayload,
  analysis: AnalysisPayload,
): GraphViewModel {
  const names = report.pim.states.map((s) => s.name).sort();
  const unreachable = new Set(analysis.unreachable);
  const edges: GraphEdge[] = report.pim.transitions
    .map((t) => ({ source: t.source, target: t.target, label: t.behaviour }))
    .sort((a, b) =>
      a.source === b.source
        ? a.label.localeCompare(b.label)
        : a.source.localeCompare(b.source));

  // Layered positions: breadth-first distance from the initial state, states
  // inside a layer ordered by name, unreachable states in a trailing layer.
  const layerOf = new Map<string, number>();
  layerOf.set(report.pim.initial, 0);
  const out = new Map<string, string[]>();
  for (const e of edges) {
    const list = out.get(e.source) ?? [];
    list.push(e.target);
    out.set(e.source, list);
  }
  let frontier = [report.pim.initial];
  let depth = 0;
  while (frontier.length > 0) {
    depth += 1;
    const next: string[] = [];
    for (const node of [...frontier].sort()) {
      for (const target of (out.get(node) ?? []).sort()) {
        if (!layerOf.has(target)) {
          layerOf.set(target, depth);
          next.push(target);
        }
      }
    }
    frontier = next;
  }
  const trailing = depth;
  const rows = new Map<number, number>();
  const nodes: GraphNode[] = names.map((name) => {
    const layer = layerOf.get(name) ?? trailing;
    const row = rows.get(layer) ?? 0;
    rows.set(layer, row + 1);
    return {
      name,
      isInitial: name === report.pim.initial,
      isUnreachable: unreachable.has(name),
      x: MARGIN + layer * LAYER_GAP,
      y: MARGIN + row * ROW_GAP,
    };
  });

  const width = MARGIN * 2 + Math.max(0, ...nodes.map((n) => n.x));
  const height = MARGIN * 2 + Math.max(0, ...nodes.map((n) => n.y));
  return { nodes, edges, width, height };
}
