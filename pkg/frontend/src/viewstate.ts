/** Pure view-state reducer for the explorer.
 *
 * All transitions are plain data-in/data-out; effects (tile fetches,
 * analysis requests) are described by the returned tile keys and by the
 * client module, never performed here.
 */

import {
  Complex,
  FamilyId,
  PlaneId,
  TileKey,
  Viewport,
  clampCenter,
  coveringTiles,
  pixelFromPlane,
  planeFromPixel,
  scaleAt,
  world,
} from "./geometry.js";

export type OverlayKind =
  | "region-boundary"
  | "arcs"
  | "boundary-triples"
  | "scan-heatmap";

export interface PaneState {
  plane: PlaneId;
  anchor?: Complex; // required when plane === "dyn"
  viewport: Viewport;
}

export interface ViewState {
  family: FamilyId;
  maxZoom: number;
  active: PaneState;
  selection?: Complex;
  overlays: Partial<Record<OverlayKind, unknown>>;
  pendingJobs: string[];
}

export type Gesture =
  | { kind: "pan"; dx: number; dy: number }
  | { kind: "zoom"; factor: number; focus: { x: number; y: number } }
  | { kind: "click"; pixel: { x: number; y: number } };

export interface Update {
  state: ViewState;
  tiles: TileKey[];
}

export function initialState(
  family: FamilyId,
  width: number,
  height: number,
  maxZoom = 40,
): ViewState {
  const w = world(family, "param");
  return {
    family,
    maxZoom,
    active: {
      plane: "param",
      viewport: { center: w.center, zoom: 0, width, height },
    },
    overlays: {},
    pendingJobs: [],
  };
}

function withViewport(state: ViewState, vp: Viewport): ViewState {
  return { ...state, active: { ...state.active, viewport: vp } };
}

export function updateViewport(state: ViewState, gesture: Gesture): Update {
  const pane = state.active;
  const w = world(state.family, pane.plane);
  const vp = pane.viewport;
  let next = state;
  if (gesture.kind === "pan") {
    const s = scaleAt(w, vp.zoom);
    const center = clampCenter(w, {
      re: vp.center.re - gesture.dx * s,
      im: vp.center.im + gesture.dy * s,
    });
    next = withViewport(state, { ...vp, center });
  } else if (gesture.kind === "zoom") {
    const focusPlane = planeFromPixel(w, vp, gesture.focus.x, gesture.focus.y);
    const zoom = Math.max(
      0,
      Math.min(state.maxZoom, vp.zoom + Math.log2(gesture.factor)),
    );
    // keep the focus plane point under the focus pixel; only pans clamp,
    // clamping here would drag the focus point away at low zoom
    const s = scaleAt(w, zoom);
    const center = {
      re: focusPlane.re - (gesture.focus.x - vp.width / 2) * s,
      im: focusPlane.im + (gesture.focus.y - vp.height / 2) * s,
    };
    next = withViewport(state, { ...vp, center, zoom });
  } else {
    const selection = planeFromPixel(w, vp, gesture.pixel.x, gesture.pixel.y);
    next = { ...state, selection };
  }
  return {
    state: next,
    tiles: coveringTiles(
      next.family,
      next.active.plane,
      next.active.viewport,
      next.maxZoom,
    ),
  };
}

/** Convenience wrappers used by tests and the shell. */
export function toPlane(state: ViewState, x: number, y: number): Complex {
  const pane = state.active;
  return planeFromPixel(world(state.family, pane.plane), pane.viewport, x, y);
}

export function toPixel(state: ViewState, p: Complex): { x: number; y: number } {
  const pane = state.active;
  return pixelFromPlane(world(state.family, pane.plane), pane.viewport, p);
}

export function openDynamicalPane(state: ViewState): ViewState {
  if (!state.selection) {
    throw new Error("open-dynamical requires a selection");
  }
  const w = world(state.family, "dyn");
  return {
    ...state,
    active: {
      plane: "dyn",
      anchor: state.selection,
      viewport: { ...state.active.viewport, center: w.center, zoom: 0 },
    },
  };
}
