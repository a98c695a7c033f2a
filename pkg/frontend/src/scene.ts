/** Pure scene computation: (map, view, viewport) -> draw commands.
 *
 * Keeping this free of canvas/DOM makes the render pipeline testable in
 * Node; render.ts is a thin adapter that just draws the commands.
 */

import { MapIndex, type MapData } from "./types.js";
import type { ViewState } from "./state.js";

/** Qualitative 12-color palette; community ids cycle through it, so the
 * largest twelve communities (ids 0..11) get unique hues. */
export const PALETTE: readonly string[] = [
  "#e6813c",
  "#5fa9dd",
  "#68b36e",
  "#d05c5c",
  "#9579c9",
  "#c9b93c",
  "#5cc3bb",
  "#d678b4",
  "#8a9a53",
  "#7e7ee0",
  "#c98a5c",
  "#9aa7b4",
];

export function communityColor(community: number): string {
  const index = ((community % PALETTE.length) + PALETTE.length) % PALETTE.length;
  return PALETTE[index] as string;
}

export interface SceneCircle {
  id: string;
  x: number;
  y: number;
  r: number;
  color: string;
  dimmed: boolean;
  selected: boolean;
}

export interface SceneEdge {
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  dimmed: boolean;
}

export interface SceneLabel {
  id: string;
  text: string;
  x: number;
  y: number;
}

export interface Scene {
  edges: SceneEdge[];
  circles: SceneCircle[];
  labels: SceneLabel[];
}

export interface Viewport {
  width: number;
  height: number;
}

export const MAX_RADIUS = 26;
export const MIN_RADIUS = 1.6;

/** Nodes get a label only above a zoom-dependent PageRank threshold, so
 * zooming in progressively reveals smaller forums. */
export function labelThreshold(maxPagerank: number, zoom: number): number {
  return maxPagerank / (3 * zoom * zoom);
}

function scale(view: ViewState, viewport: Viewport): number {
  return 0.45 * Math.min(viewport.width, viewport.height) * view.camera.zoom;
}

export function worldToScreen(
  view: ViewState,
  viewport: Viewport,
  x: number,
  y: number,
): { x: number; y: number } {
  const s = scale(view, viewport);
  return {
    x: viewport.width / 2 + (x - view.camera.x) * s,
    y: viewport.height / 2 + (y - view.camera.y) * s,
  };
}

export function screenToWorld(
  view: ViewState,
  viewport: Viewport,
  px: number,
  py: number,
): { x: number; y: number } {
  const s = scale(view, viewport);
  return {
    x: view.camera.x + (px - viewport.width / 2) / s,
    y: view.camera.y + (py - viewport.height / 2) / s,
  };
}

export function computeScene(map: MapData, view: ViewState, viewport: Viewport): Scene {
  const index = new MapIndex(map);
  const filter = view.communityFilter;
  const rScale = Math.sqrt(view.camera.zoom);
  const threshold = labelThreshold(index.maxPagerank, view.camera.zoom);

  const positions = new Map<string, { x: number; y: number }>();
  const circles: SceneCircle[] = map.nodes.map((node) => {
    const p = worldToScreen(view, viewport, node.x, node.y);
    positions.set(node.id, p);
    const raw = index.maxPagerank > 0 ? (node.pagerank / index.maxPagerank) * MAX_RADIUS : MAX_RADIUS;
    return {
      id: node.id,
      x: p.x,
      y: p.y,
      r: Math.min(MAX_RADIUS * rScale, Math.max(MIN_RADIUS, raw * rScale)),
      color: communityColor(node.community),
      dimmed: filter !== null && node.community !== filter,
      selected: node.id === view.selected,
    };
  });

  const edges: SceneEdge[] = map.edges.map((edge) => {
    const a = positions.get(edge.source)!;
    const b = positions.get(edge.target)!;
    const sameCommunity =
      filter === null ||
      (index.byId.get(edge.source)!.community === filter &&
        index.byId.get(edge.target)!.community === filter);
    return { x1: a.x, y1: a.y, x2: b.x, y2: b.y, dimmed: !sameCommunity };
  });

  const labels: SceneLabel[] = [];
  for (const node of map.nodes) {
    const dimmed = filter !== null && node.community !== filter;
    if (dimmed) continue;
    if (node.pagerank >= threshold || node.id === view.selected) {
      const p = positions.get(node.id)!;
      labels.push({ id: node.id, text: node.label, x: p.x, y: p.y });
    }
  }

  return { edges, circles, labels };
}

/** Topmost circle whose disc (with a small slack) covers the point. */
export function hitTest(scene: Scene, px: number, py: number): string | null {
  let best: SceneCircle | null = null;
  let bestDist = Infinity;
  for (const c of scene.circles) {
    const dist = Math.hypot(c.x - px, c.y - py);
    if (dist <= Math.max(c.r, 4) + 2 && dist < bestDist) {
      best = c;
      bestDist = dist;
    }
  }
  return best ? best.id : null;
}
