import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { AtlasClient, FetchLike, visibilityOverlay } from "../src/client.js";
import { initialState, toPixel, updateViewport } from "../src/viewstate.js";

// Responses captured from a live service seeded at the period-4 tricorn
// center a2 on the Newton symmetry locus; the client must only reshape
// them, never invent values.
const fixture = JSON.parse(
  readFileSync(
    join(dirname(fileURLToPath(import.meta.url)), "fixtures/visibility_a2.json"),
    "utf8",
  ),
);

function cannedFetch(): { fetch: FetchLike; log: string[] } {
  const log: string[] = [];
  const fetch: FetchLike = async (url, init) => {
    log.push(`${init?.method ?? "GET"} ${url}`);
    const respond = (status: number, body: unknown) => ({
      status,
      json: async () => body,
    });
    if (url.includes("/classify")) {
      return respond(200, fixture.classify);
    }
    if (url.endsWith("/analyze") && init?.method === "POST") {
      const body = JSON.parse(init.body ?? "{}");
      if (body.kind !== "visibility") {
        return respond(400, { detail: "unknown analysis kind" });
      }
      return respond(202, fixture.analyze_accept);
    }
    if (url.includes(`/analyze/${fixture.analyze_accept.id}`)) {
      return respond(200, fixture.job_done);
    }
    return respond(404, { detail: "not found" });
  };
  return { fetch, log };
}

describe("A13 round trip: zoom to a2, run visibility", () => {
  it("shows three markers with exactly one Invisible", async () => {
    const [a2re, a2im] = fixture.a2 as [number, number];
    // steer the viewport to a2 by zooming on its pixel repeatedly
    let s = initialState("newton", 800, 600);
    for (let i = 0; i < 8; i++) {
      const px = toPixel(s, { re: a2re, im: a2im });
      s = updateViewport(s, { kind: "zoom", factor: 2, focus: px }).state;
    }
    const px = toPixel(s, { re: a2re, im: a2im });
    s = updateViewport(s, { kind: "click", pixel: px }).state;
    expect(s.selection).toBeDefined();
    expect(Math.abs(s.selection!.re - a2re)).toBeLessThan(1e-2);
    expect(Math.abs(s.selection!.im - a2im)).toBeLessThan(1e-2);

    const { fetch } = cannedFetch();
    const client = new AtlasClient("http://atlas", fetch);
    const job = await client.startVisibility("newton", s.selection!);
    const result = await client.awaitJob(job.id, 1000, 0, async () => {});
    const overlay = visibilityOverlay(result);

    expect(overlay.markers).toHaveLength(3);
    const invisible = overlay.markers.filter((m) => m.state === "Invisible");
    expect(invisible).toHaveLength(1);
    expect(overlay.markers.indexOf(invisible[0])).toBe(overlay.symmetricIndex);
    for (const m of overlay.markers.filter((m) => m.state === "Visible")) {
      expect(m.witness).not.toBeNull();
    }
  });

  it("rejects unknown analysis kinds with the service error", async () => {
    const { fetch } = cannedFetch();
    const client = new AtlasClient("http://atlas", fetch);
    await expect(
      client.startAnalysis({ kind: "nonsense", family: "newton" }),
    ).rejects.toThrow(/status 400/);
  });

  it("builds tile URLs matching the service routes", () => {
    const { fetch } = cannedFetch();
    const client = new AtlasClient("http://atlas", fetch);
    const url = client.tileUrl(
      { family: "newton", plane: "dyn", zoom: 3, x: 4, y: 2 },
      "standard",
      { re: 0, im: 4.633 },
    );
    expect(url).toBe(
      "http://atlas/tiles/newton/dyn/3/4/2?tier=standard&anchor=0%2C4.633",
    );
  });
});
