import { describe, expect, it } from "vitest";

import {
  Gesture,
  initialState,
  openDynamicalPane,
  toPixel,
  toPlane,
  updateViewport,
} from "../src/viewstate.js";
import { tileKeyId, world } from "../src/geometry.js";

const W = 800;
const H = 600;

function rng(seed: number): () => number {
  // mulberry32, good enough for test point sampling
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

describe("pixel/plane transform", () => {
  it("round-trips within one pixel at zooms 0..20", () => {
    const rand = rng(7);
    for (let zoom = 0; zoom <= 20; zoom++) {
      let s = initialState("newton", W, H);
      s = {
        ...s,
        active: { ...s.active, viewport: { ...s.active.viewport, zoom } },
      };
      for (let k = 0; k < 25; k++) {
        const x = rand() * W;
        const y = rand() * H;
        const p = toPlane(s, x, y);
        const back = toPixel(s, p);
        expect(Math.abs(back.x - x)).toBeLessThanOrEqual(1);
        expect(Math.abs(back.y - y)).toBeLessThanOrEqual(1);
      }
    }
  });
});

describe("updateViewport reducer", () => {
  it("zoom keeps the focus plane point under the focus pixel", () => {
    let s = initialState("newton", W, H);
    const focus = { x: 123, y: 456 };
    const before = toPlane(s, focus.x, focus.y);
    s = updateViewport(s, { kind: "zoom", factor: 2, focus }).state;
    const after = toPixel(s, before);
    expect(Math.abs(after.x - focus.x)).toBeLessThanOrEqual(1);
    expect(Math.abs(after.y - focus.y)).toBeLessThanOrEqual(1);
  });

  it("click sets selection to the pixel's plane coordinate", () => {
    let s = initialState("antipodal", W, H);
    const pixel = { x: 300, y: 200 };
    const expected = toPlane(s, pixel.x, pixel.y);
    s = updateViewport(s, { kind: "click", pixel }).state;
    expect(s.selection).toBeDefined();
    expect(s.selection!.re).toBeCloseTo(expected.re, 12);
    expect(s.selection!.im).toBeCloseTo(expected.im, 12);
  });

  it("pans beyond the world edge clamp", () => {
    let s = initialState("newton", W, H);
    for (let i = 0; i < 50; i++) {
      s = updateViewport(s, { kind: "pan", dx: -10_000, dy: 10_000 }).state;
    }
    const w = world("newton", "param");
    const c = s.active.viewport.center;
    expect(c.re).toBeLessThanOrEqual(w.center.re + w.half);
    expect(c.re).toBeGreaterThanOrEqual(w.center.re - w.half);
    expect(c.im).toBeLessThanOrEqual(w.center.im + w.half);
    expect(c.im).toBeGreaterThanOrEqual(w.center.im - w.half);
  });

  it("zoom clamps to [0, maxZoom]", () => {
    let s = initialState("newton", W, H, 40);
    s = updateViewport(s, {
      kind: "zoom",
      factor: 1e-9,
      focus: { x: 0, y: 0 },
    }).state;
    expect(s.active.viewport.zoom).toBe(0);
    for (let i = 0; i < 60; i++) {
      s = updateViewport(s, {
        kind: "zoom",
        factor: 4,
        focus: { x: W / 2, y: H / 2 },
      }).state;
    }
    expect(s.active.viewport.zoom).toBe(40);
  });

  it("is pure: identical gesture sequences give identical states and tiles", () => {
    const rand = rng(42);
    const gestures: Gesture[] = [];
    for (let i = 0; i < 40; i++) {
      const r = rand();
      if (r < 0.4) {
        gestures.push({
          kind: "pan",
          dx: (rand() - 0.5) * 200,
          dy: (rand() - 0.5) * 200,
        });
      } else if (r < 0.8) {
        gestures.push({
          kind: "zoom",
          factor: rand() < 0.5 ? 2 : 0.5,
          focus: { x: rand() * W, y: rand() * H },
        });
      } else {
        gestures.push({
          kind: "click",
          pixel: { x: rand() * W, y: rand() * H },
        });
      }
    }
    const run = () => {
      let s = initialState("newton", W, H);
      const tiles: string[] = [];
      for (const g of gestures) {
        const u = updateViewport(s, g);
        s = u.state;
        tiles.push(u.tiles.map(tileKeyId).join(","));
      }
      return { s, tiles };
    };
    const a = run();
    const b = run();
    expect(a.s).toEqual(b.s);
    expect(a.tiles).toEqual(b.tiles);
  });

  it("emits valid tile keys covering the viewport", () => {
    let s = initialState("newton", W, H);
    const u = updateViewport(s, {
      kind: "zoom",
      factor: 8,
      focus: { x: W / 2, y: H / 2 },
    });
    expect(u.tiles.length).toBeGreaterThan(0);
    for (const k of u.tiles) {
      expect(k.zoom).toBe(3);
      expect(k.x).toBeGreaterThanOrEqual(0);
      expect(k.x).toBeLessThan(1 << k.zoom);
      expect(k.y).toBeGreaterThanOrEqual(0);
      expect(k.y).toBeLessThan(1 << k.zoom);
    }
  });
});

describe("dynamical pane", () => {
  it("always carries its anchor", () => {
    let s = initialState("newton", W, H);
    expect(() => openDynamicalPane(s)).toThrow();
    s = updateViewport(s, { kind: "click", pixel: { x: 400, y: 300 } }).state;
    const d = openDynamicalPane(s);
    expect(d.active.plane).toBe("dyn");
    expect(d.active.anchor).toEqual(s.selection);
  });
});
