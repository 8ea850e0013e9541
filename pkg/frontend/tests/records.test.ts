import { describe, expect, it } from "vitest";

import { nextId, parseRecords, serializeRecords } from "../src/records.js";
import type { AnnotationRecord } from "../src/types.js";

const LINE = "A v0/3 a1 person 29.5 10.0 41.0 100.0 0 original\n";
const LINE_V =
  "A v0/3 a2 person 1.0 2.0 30.0 60.0 V 1.0 2.0 30.0 30.0 1 new\n";

describe("parseRecords", () => {
  it("reads a plain record", () => {
    const [r] = parseRecords(LINE);
    expect(r).toEqual({
      frame: "v0/3",
      id: "a1",
      label: "person",
      box: { x: 29.5, y: 10, w: 41, h: 100 },
      visible: null,
      ignore: false,
      source: "original",
    });
  });

  it("reads a visible sub-box and the ignore flag", () => {
    const [r] = parseRecords(LINE_V);
    expect(r!.visible).toEqual({ x: 1, y: 2, w: 30, h: 30 });
    expect(r!.ignore).toBe(true);
  });

  it("skips blank lines", () => {
    expect(parseRecords("\n" + LINE + "\n\n")).toHaveLength(1);
  });

  it("rejects garbage", () => {
    expect(() => parseRecords("B nope\n")).toThrow(/not an annotation/);
    expect(() => parseRecords("A v0/0 a1 person 1 2 x 4 0 original\n"))
      .toThrow(/bad number/);
  });
});

describe("serializeRecords", () => {
  it("round-trips through parse", () => {
    const records = parseRecords(LINE + LINE_V);
    expect(parseRecords(serializeRecords(records))).toEqual(records);
  });

  it("keeps the server-provided geometry untouched", () => {
    const r: AnnotationRecord = {
      frame: "v0/0",
      id: "ui1",
      label: "person",
      box: { x: 29.5, y: 10, w: 41, h: 100 },
      visible: null,
      ignore: false,
      source: "new",
    };
    expect(serializeRecords([r]))
      .toBe("A v0/0 ui1 person 29.5 10 41 100 0 new\n");
  });
});

describe("nextId", () => {
  it("avoids taken ids", () => {
    const records = parseRecords(
      "A v0/0 ui1 person 1 1 2 2 0 new\nA v0/0 ui2 person 5 5 2 2 0 new\n");
    expect(nextId(records)).toBe("ui3");
    expect(nextId([], "ign")).toBe("ign1");
  });
});
