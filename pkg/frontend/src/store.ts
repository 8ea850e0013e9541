// Client-side state: current frame, its server records and revision, the
// draft interaction state machine, and the optimistic-concurrency write
// path. There is no client persistence: every accepted write re-reads the
// server's state, so a reload always reproduces the store exactly.

import { ApiClient } from "./api.js";
import { nextId, parseRecords, serializeRecords } from "./records.js";
import type { AnnotationRecord, Box, DiffPayload, FrameInfo, Point } from "./types.js";

export type Draft =
  | { kind: "idle" }
  | { kind: "line-started"; head: Point }
  | { kind: "rect-drag"; mode: "ignore" | "visible"; start: Point };

export type WriteOutcome = "saved" | "conflict" | "error" | "rejected";

export class ClientStore {
  frames: FrameInfo[] = [];
  index = 0;
  revision = 0;
  records: AnnotationRecord[] = [];
  diff: DiffPayload | null = null;
  selectedId: string | null = null;
  draft: Draft = { kind: "idle" };
  show: "new" | "original" | "both" = "both";
  notice: string | null = null;

  constructor(private readonly api: ApiClient) {}

  get frameId(): string {
    const info = this.frames[this.index];
    if (!info) throw new Error("no frame loaded");
    return info.id;
  }

  async init(): Promise<void> {
    this.frames = await this.api.listFrames();
    if (!this.frames.length) throw new Error("server has no frames");
    await this.loadFrame(0);
  }

  async loadFrame(index: number): Promise<void> {
    this.index = Math.min(Math.max(index, 0), this.frames.length - 1);
    const got = await this.api.getAnnotations(this.frameId);
    this.revision = got.revision;
    this.records = parseRecords(got.records);
    this.selectedId = null;
    this.draft = { kind: "idle" };
    this.diff = await this.api.getDiff(this.frameId);
    this.notice = this.diff === null && this.show !== "new"
      ? "no original variant on the server; showing the editable set only"
      : null;
  }

  async nextFrame(): Promise<void> {
    if (this.index + 1 < this.frames.length) await this.loadFrame(this.index + 1);
  }

  async previousFrame(): Promise<void> {
    if (this.index > 0) await this.loadFrame(this.index - 1);
  }

  toggleOverlay(): void {
    const order: (typeof this.show)[] = ["both", "new", "original"];
    this.show = order[(order.indexOf(this.show) + 1) % order.length]!;
  }

  select(p: Point): void {
    const hit = this.records.find(
      (r) => p.x >= r.box.x && p.x <= r.box.x + r.box.w &&
             p.y >= r.box.y && p.y <= r.box.y + r.box.h);
    this.selectedId = hit ? hit.id : null;
  }

  // -- drawing a head-feet line ------------------------------------------

  startLine(head: Point): void {
    this.draft = { kind: "line-started", head };
  }

  cancelDraft(): void {
    this.draft = { kind: "idle" };
  }

  /** Second click: ask the server for the box, then persist. The draft is
   * kept when anything fails so the annotator can retry. */
  async finishLine(feet: Point): Promise<WriteOutcome> {
    if (this.draft.kind !== "line-started") return "rejected";
    const head = this.draft.head;
    if (head.x === feet.x && head.y === feet.y) return "rejected";
    let box: Box;
    try {
      box = await this.api.lineToBbox(head, feet);
    } catch (err) {
      this.notice = `server rejected the line: ${String(err)}`;
      return "error";
    }
    const record: AnnotationRecord = {
      id: nextId(this.records),
      frame: this.frameId,
      label: "person",
      box,
      visible: null,
      ignore: false,
      source: "new",
    };
    const outcome = await this.write([...this.records, record]);
    if (outcome === "saved") this.draft = { kind: "idle" };
    return outcome;
  }

  // -- rectangle regions --------------------------------------------------

  startRect(mode: "ignore" | "visible", start: Point): WriteOutcome | "started" {
    if (mode === "visible" && this.selectedId === null) {
      this.notice = "select an annotation before marking its visible region";
      return "rejected";
    }
    this.draft = { kind: "rect-drag", mode, start };
    return "started";
  }

  async finishRect(end: Point): Promise<WriteOutcome> {
    if (this.draft.kind !== "rect-drag") return "rejected";
    const { mode, start } = this.draft;
    const box: Box = {
      x: Math.min(start.x, end.x),
      y: Math.min(start.y, end.y),
      w: Math.abs(end.x - start.x),
      h: Math.abs(end.y - start.y),
    };
    if (box.w <= 0 || box.h <= 0) {
      this.draft = { kind: "idle" };
      this.notice = "zero-area drag ignored";
      return "rejected";
    }
    let updated: AnnotationRecord[];
    if (mode === "ignore") {
      updated = [...this.records, {
        id: nextId(this.records, "ign"),
        frame: this.frameId,
        label: "people",
        box,
        visible: null,
        ignore: true,
        source: "new",
      }];
    } else {
      updated = this.records.map((r) =>
        r.id === this.selectedId ? { ...r, visible: box } : r);
    }
    const outcome = await this.write(updated);
    if (outcome === "saved") this.draft = { kind: "idle" };
    return outcome;
  }

  async deleteSelected(): Promise<WriteOutcome> {
    if (this.selectedId === null) return "rejected";
    return this.write(this.records.filter((r) => r.id !== this.selectedId));
  }

  // -- persistence ----------------------------------------------------------

  /** PUT the full frame at the current revision; on success re-read the
   * server state (which may have clipped visible boxes etc.). A stale
   * revision leaves local state untouched and raises the conflict notice. */
  private async write(records: AnnotationRecord[]): Promise<WriteOutcome> {
    const result = await this.api.putAnnotations(
      this.frameId, this.revision, serializeRecords(records));
    if (result.ok) {
      const got = await this.api.getAnnotations(this.frameId);
      this.revision = got.revision;
      this.records = parseRecords(got.records);
      this.diff = await this.api.getDiff(this.frameId);
      this.notice = null;
      return "saved";
    }
    if (result.conflict) {
      this.notice = "frame changed elsewhere; reload to pick up revision " +
        `${result.revision} and retry`;
      return "conflict";
    }
    this.notice = `write rejected: ${result.error}`;
    return "error";
  }

  async reload(): Promise<void> {
    await this.loadFrame(this.index);
  }
}
