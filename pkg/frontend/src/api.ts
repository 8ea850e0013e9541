// Typed client for the review service. The fetch function is injectable
// so tests can run against a scripted fake.

import type { Box, DiffPayload, FrameInfo, Point } from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface FrameAnnotations {
  revision: number;
  records: string;
}

export type PutResult =
  | { ok: true; revision: number }
  | { ok: false; conflict: boolean; revision: number | null; error: string };

export class ApiClient {
  constructor(
    private readonly fetchFn: FetchLike = (u, i) => fetch(u, i),
    private readonly base = "",
  ) {}

  private async getJson(path: string): Promise<any> {
    const resp = await this.fetchFn(this.base + path);
    if (!resp.ok) throw new Error(`GET ${path} -> ${resp.status}`);
    return resp.json();
  }

  async listFrames(): Promise<FrameInfo[]> {
    const body = await this.getJson("/api/frames");
    return body.frames as FrameInfo[];
  }

  async getAnnotations(frameId: string): Promise<FrameAnnotations> {
    const body = await this.getJson(`/api/frames/${frameId}/annotations`);
    return { revision: body.revision as number, records: body.records as string };
  }

  async putAnnotations(frameId: string, revision: number,
                       records: string): Promise<PutResult> {
    const resp = await this.fetchFn(`${this.base}/api/frames/${frameId}/annotations`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ revision, records }),
    });
    const body = await resp.json().catch(() => ({}));
    if (resp.ok) return { ok: true, revision: body.revision as number };
    return {
      ok: false,
      conflict: resp.status === 409,
      revision: typeof body.revision === "number" ? body.revision : null,
      error: String(body.error ?? resp.status),
    };
  }

  // Box generation is server-owned: the client sends the raw line and
  // renders whatever comes back.
  async lineToBbox(head: Point, feet: Point): Promise<Box> {
    const resp = await this.fetchFn(`${this.base}/api/geometry/line-to-bbox`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ head: [head.x, head.y], feet: [feet.x, feet.y] }),
    });
    if (!resp.ok) {
      const body = await resp.json().catch(() => ({}));
      throw new Error(String(body.error ?? `line-to-bbox ${resp.status}`));
    }
    return (await resp.json()).box as Box;
  }

  async getDiff(frameId: string): Promise<DiffPayload | null> {
    const resp = await this.fetchFn(`${this.base}/api/diff/${frameId}`);
    if (resp.status === 404) return null; // no original variant configured
    if (!resp.ok) throw new Error(`diff ${resp.status}`);
    return (await resp.json()) as DiffPayload;
  }

  imageUrl(frameId: string): string {
    return `${this.base}/api/frames/${frameId}/image`;
  }
}
