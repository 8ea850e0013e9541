// Client-side reader/writer for the canonical annotation record lines the
// service speaks. Geometry is never derived here: records carry whatever
// boxes the server produced, and serialization exists only to compose PUT
// bodies the server re-validates.

import type { AnnotationRecord, Box } from "./types.js";

export function parseRecords(text: string): AnnotationRecord[] {
  const out: AnnotationRecord[] = [];
  for (const raw of text.split("\n")) {
    const line = raw.trim();
    if (!line) continue;
    const f = line.split(/\s+/);
    if (f[0] !== "A") throw new Error(`not an annotation record: ${line}`);
    if (f.length !== 10 && f.length !== 15) {
      throw new Error(`bad field count ${f.length}: ${line}`);
    }
    const nums = (start: number, count: number): number[] =>
      f.slice(start, start + count).map((v) => {
        const n = Number(v);
        if (!Number.isFinite(n)) throw new Error(`bad number ${v} in: ${line}`);
        return n;
      });
    const [x, y, w, h] = nums(4, 4) as [number, number, number, number];
    let visible: Box | null = null;
    let rest = 8;
    if (f.length === 15) {
      if (f[8] !== "V") throw new Error(`expected V marker in: ${line}`);
      const [vx, vy, vw, vh] = nums(9, 4) as [number, number, number, number];
      visible = { x: vx, y: vy, w: vw, h: vh };
      rest = 13;
    }
    out.push({
      frame: f[1]!,
      id: f[2]!,
      label: f[3]!,
      box: { x, y, w, h },
      visible,
      ignore: f[rest] === "1",
      source: f[rest + 1]!,
    });
  }
  return out;
}

export function serializeRecords(records: AnnotationRecord[]): string {
  return records
    .map((r) => {
      const parts = ["A", r.frame, r.id, r.label,
        String(r.box.x), String(r.box.y), String(r.box.w), String(r.box.h)];
      if (r.visible) {
        parts.push("V", String(r.visible.x), String(r.visible.y),
          String(r.visible.w), String(r.visible.h));
      }
      parts.push(r.ignore ? "1" : "0", r.source);
      return parts.join(" ");
    })
    .map((line) => line + "\n")
    .join("");
}

export function nextId(records: AnnotationRecord[], prefix = "ui"): string {
  const taken = new Set(records.map((r) => r.id));
  let k = 1;
  while (taken.has(`${prefix}${k}`)) k += 1;
  return `${prefix}${k}`;
}
