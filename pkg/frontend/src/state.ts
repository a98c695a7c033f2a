/** View state and its pure event reducer.
 *
 * The scene is a pure function of (map, ViewState), so replaying an
 * interaction log reproduces the final view exactly.
 */

import type { MapData } from "./types.js";

export const MIN_ZOOM = 0.2;
export const MAX_ZOOM = 40;

export interface Camera {
  x: number;
  y: number;
  zoom: number;
}

export interface ViewState {
  camera: Camera;
  selected: string | null;
  communityFilter: number | null;
  query: string;
}

export type ViewEvent =
  | { type: "select"; id: string | null; recenter?: boolean }
  | { type: "filter"; community: number | null }
  | { type: "pan"; dx: number; dy: number }
  | { type: "zoom"; factor: number; cx?: number; cy?: number }
  | { type: "search"; query: string };

export interface EventResult {
  view: ViewState;
  warning?: string;
}

export function initialView(): ViewState {
  return {
    camera: { x: 0, y: 0, zoom: 1 },
    selected: null,
    communityFilter: null,
    query: "",
  };
}

function clampZoom(zoom: number): number {
  return Math.min(MAX_ZOOM, Math.max(MIN_ZOOM, zoom));
}

/** Apply one event. Invalid targets (unknown node or community) leave the
 * state untouched and report a warning instead of throwing. */
export function applyEvent(map: MapData, view: ViewState, ev: ViewEvent): EventResult {
  switch (ev.type) {
    case "select": {
      if (ev.id === null) {
        return { view: { ...view, selected: null } };
      }
      const node = map.nodes.find((n) => n.id === ev.id);
      if (!node) {
        return { view, warning: `unknown node ${ev.id}` };
      }
      const camera = ev.recenter ? { ...view.camera, x: node.x, y: node.y } : view.camera;
      return { view: { ...view, selected: node.id, camera } };
    }
    case "filter": {
      if (ev.community === null) {
        return { view: { ...view, communityFilter: null } };
      }
      if (!map.nodes.some((n) => n.community === ev.community)) {
        return { view, warning: `unknown community ${ev.community}` };
      }
      return { view: { ...view, communityFilter: ev.community } };
    }
    case "pan": {
      const camera = { ...view.camera, x: view.camera.x + ev.dx, y: view.camera.y + ev.dy };
      return { view: { ...view, camera } };
    }
    case "zoom": {
      const zoom = clampZoom(view.camera.zoom * ev.factor);
      const applied = zoom / view.camera.zoom;
      let { x, y } = view.camera;
      // Keep the world point (cx, cy) fixed on screen while zooming.
      if (ev.cx !== undefined && ev.cy !== undefined && applied !== 1) {
        x = ev.cx - (ev.cx - x) / applied;
        y = ev.cy - (ev.cy - y) / applied;
      }
      return { view: { ...view, camera: { x, y, zoom } } };
    }
    case "search":
      return { view: { ...view, query: ev.query } };
  }
}

/** Fold an interaction log from the initial view (warnings dropped). */
export function replay(map: MapData, events: ViewEvent[], start?: ViewState): ViewState {
  let view = start ?? initialView();
  for (const ev of events) {
    view = applyEvent(map, view, ev).view;
  }
  return view;
}
