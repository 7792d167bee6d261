/** Thin typed client for the atlas service.
 *
 * fetch is injected so the UI shell passes window.fetch and tests pass a
 * canned transport; nothing here computes dynamics, every displayed number
 * comes from a response field.
 */

import { Complex, FamilyId, TileKey } from "./geometry.js";

export interface VisibilityMarker {
  point: Complex;
  tag: string;
  state: string; // "Visible" | "Invisible" | "Undecided"
  witness: Complex | null;
  floor: number;
}

export interface VisibilityOverlay {
  markers: VisibilityMarker[];
  symmetricIndex: number | null;
}

export interface JobHandle {
  id: string;
  status: string;
}

export type FetchLike = (url: string, init?: {
  method?: string;
  headers?: Record<string, string>;
  body?: string;
}) => Promise<{ status: number; json(): Promise<unknown> }>;

function pair(c: Complex): [number, number] {
  return [c.re, c.im];
}

export class AtlasClient {
  constructor(
    private readonly base: string,
    private readonly fetchFn: FetchLike,
  ) {}

  tileUrl(key: TileKey, tier: string, anchor?: Complex): string {
    const q = new URLSearchParams({ tier });
    if (anchor) {
      q.set("anchor", `${anchor.re},${anchor.im}`);
    }
    return (
      `${this.base}/tiles/${key.family}/${key.plane}/${key.zoom}` +
      `/${key.x}/${key.y}?${q}`
    );
  }

  async classifyAt(family: FamilyId, p: Complex): Promise<unknown> {
    const q = new URLSearchParams({ family, param: `${p.re},${p.im}` });
    const res = await this.fetchFn(`${this.base}/classify?${q}`);
    if (res.status !== 200) {
      throw new Error(`classify failed with status ${res.status}`);
    }
    return res.json();
  }

  async startVisibility(family: FamilyId, p: Complex): Promise<JobHandle> {
    return this.startAnalysis({ kind: "visibility", family, param: pair(p) });
  }

  async startAnalysis(body: Record<string, unknown>): Promise<JobHandle> {
    const res = await this.fetchFn(`${this.base}/analyze`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (res.status !== 202) {
      throw new Error(`analyze rejected with status ${res.status}`);
    }
    return (await res.json()) as JobHandle;
  }

  async jobStatus(id: string): Promise<{ status: string; result?: unknown }> {
    const res = await this.fetchFn(`${this.base}/analyze/${id}`);
    if (res.status !== 200) {
      throw new Error(`unknown job ${id}`);
    }
    return (await res.json()) as { status: string; result?: unknown };
  }

  /** Poll a job until done/failed; interval and timeout in milliseconds. */
  async awaitJob(
    id: string,
    timeoutMs = 600_000,
    intervalMs = 500,
    sleep: (ms: number) => Promise<void> = (ms) =>
      new Promise((r) => setTimeout(r, ms)),
  ): Promise<unknown> {
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const doc = await this.jobStatus(id);
      if (doc.status === "done") {
        return doc.result;
      }
      if (doc.status === "failed") {
        throw new Error(`job ${id} failed`);
      }
      if (Date.now() > deadline) {
        throw new Error(`job ${id} timed out`);
      }
      await sleep(intervalMs);
    }
  }
}

/** Shape a visibility job result into overlay markers. */
export function visibilityOverlay(result: unknown): VisibilityOverlay {
  const doc = result as {
    tags: string[];
    symmetric_index: number | null;
    verdicts: {
      point: [number, number];
      state: string;
      witness: [number, number] | null;
      floor: number;
    }[];
  };
  const markers = doc.verdicts.map((v, i) => ({
    point: { re: v.point[0], im: v.point[1] },
    tag: doc.tags[i],
    state: v.state,
    witness: v.witness ? { re: v.witness[0], im: v.witness[1] } : null,
    floor: v.floor,
  }));
  return { markers, symmetricIndex: doc.symmetric_index };
}
