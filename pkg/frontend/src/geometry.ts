/** Tile and viewport geometry, mirroring the service's slippy scheme.
 *
 * A world is a square (center, half-extent); at integer zoom z it splits
 * into 2^z x 2^z tiles of TILE_SIZE pixels, row 0 at the top.
 */

export const TILE_SIZE = 256;

export type FamilyId = "newton" | "antipodal";
export type PlaneId = "param" | "dyn";

export interface Complex {
  re: number;
  im: number;
}

export interface World {
  center: Complex;
  half: number;
}

const PARAM_WORLDS: Record<FamilyId, World> = {
  newton: { center: { re: 0, im: 2 }, half: 4 },
  antipodal: { center: { re: 0, im: 0 }, half: 4 },
};

const DYN_WORLD: World = { center: { re: 0, im: 0 }, half: 8 };

export function world(family: FamilyId, plane: PlaneId): World {
  return plane === "param" ? PARAM_WORLDS[family] : DYN_WORLD;
}

export interface TileKey {
  family: FamilyId;
  plane: PlaneId;
  zoom: number;
  x: number;
  y: number;
}

export interface Viewport {
  center: Complex;
  zoom: number; // continuous; tile requests use the rounded level
  width: number; // screen pixels
  height: number;
}

/** Plane units per screen pixel at a zoom level. */
export function scaleAt(w: World, zoom: number): number {
  return (2 * w.half) / (TILE_SIZE * Math.pow(2, zoom));
}

export function planeFromPixel(
  w: World,
  vp: Viewport,
  px: number,
  py: number,
): Complex {
  const s = scaleAt(w, vp.zoom);
  return {
    re: vp.center.re + (px - vp.width / 2) * s,
    im: vp.center.im - (py - vp.height / 2) * s,
  };
}

export function pixelFromPlane(
  w: World,
  vp: Viewport,
  p: Complex,
): { x: number; y: number } {
  const s = scaleAt(w, vp.zoom);
  return {
    x: (p.re - vp.center.re) / s + vp.width / 2,
    y: (vp.center.im - p.im) / s + vp.height / 2,
  };
}

/** Clamp a viewport center so it stays inside the world square. */
export function clampCenter(w: World, c: Complex): Complex {
  return {
    re: Math.min(w.center.re + w.half, Math.max(w.center.re - w.half, c.re)),
    im: Math.min(w.center.im + w.half, Math.max(w.center.im - w.half, c.im)),
  };
}

/** Tile keys covering the viewport at its rounded zoom level. */
export function coveringTiles(
  family: FamilyId,
  plane: PlaneId,
  vp: Viewport,
  maxZoom: number,
): TileKey[] {
  const z = Math.max(0, Math.min(maxZoom, Math.round(vp.zoom)));
  const w = world(family, plane);
  const n = 1 << z;
  const span = (2 * w.half) / n;
  const s = scaleAt(w, vp.zoom);
  const halfW = (vp.width / 2) * s;
  const halfH = (vp.height / 2) * s;
  const x0 = Math.floor((vp.center.re - halfW - (w.center.re - w.half)) / span);
  const x1 = Math.floor((vp.center.re + halfW - (w.center.re - w.half)) / span);
  const y0 = Math.floor((w.center.im + w.half - (vp.center.im + halfH)) / span);
  const y1 = Math.floor((w.center.im + w.half - (vp.center.im - halfH)) / span);
  const keys: TileKey[] = [];
  for (let y = Math.max(0, y0); y <= Math.min(n - 1, y1); y++) {
    for (let x = Math.max(0, x0); x <= Math.min(n - 1, x1); x++) {
      keys.push({ family, plane, zoom: z, x, y });
    }
  }
  return keys;
}

export function tileKeyId(k: TileKey): string {
  return `${k.family}/${k.plane}/${k.zoom}/${k.x}/${k.y}`;
}
