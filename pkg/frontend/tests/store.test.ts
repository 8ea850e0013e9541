import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { ClientStore } from "../src/store.js";
import { FakeServer } from "./fake_server.js";

let server: FakeServer;
let store: ClientStore;

beforeEach(async () => {
  server = new FakeServer(["v0/0", "v0/1", "v0/2"]);
  store = new ClientStore(new ApiClient(server.fetch));
  await store.init();
});

describe("drawing a head-feet line", () => {
  it("persists the server's box, never a locally computed one", async () => {
    store.startLine({ x: 50, y: 10 });
    const outcome = await store.finishLine({ x: 50, y: 110 });
    expect(outcome).toBe("saved");
    expect(server.lineCount).toBe(1);
    expect(store.records).toHaveLength(1);
    expect(store.records[0]!.box).toEqual({ x: 29.5, y: 10, w: 41, h: 100 });
    expect(store.revision).toBe(1);
    expect(server.records.get("v0/0")![0]!.box)
      .toEqual({ x: 29.5, y: 10, w: 41, h: 100 });
  });

  it("cancel before the second click makes no network call", async () => {
    store.startLine({ x: 5, y: 5 });
    store.cancelDraft();
    expect(store.draft).toEqual({ kind: "idle" });
    expect(server.lineCount).toBe(0);
    expect(server.putCount).toBe(0);
  });

  it("a conflicting concurrent edit surfaces, nothing silently overwritten",
    async () => {
      store.startLine({ x: 50, y: 10 });
      server.externalEdit("v0/0"); // another tab got there first
      const outcome = await store.finishLine({ x: 50, y: 110 });
      expect(outcome).toBe("conflict");
      expect(store.notice).toMatch(/changed elsewhere/);
      expect(server.records.get("v0/0")).toHaveLength(0); // store untouched
      // draft retained for retry after reload
      expect(store.draft.kind).toBe("line-started");
      await store.reload();
      expect(store.revision).toBe(1);
    });

  it("a server rejection keeps the draft", async () => {
    store.startLine({ x: 7, y: 7 });
    const outcome = await store.finishLine({ x: 7, y: 7 }); // zero length
    expect(outcome).toBe("rejected");
    expect(store.draft.kind).toBe("line-started");
    expect(server.putCount).toBe(0);
  });
});

describe("marking regions", () => {
  it("ignore drags become dashed ignore annotations", async () => {
    expect(store.startRect("ignore", { x: 100, y: 100 })).toBe("started");
    const outcome = await store.finishRect({ x: 180, y: 160 });
    expect(outcome).toBe("saved");
    const [r] = store.records;
    expect(r!.ignore).toBe(true);
    expect(r!.label).toBe("people");
    expect(r!.box).toEqual({ x: 100, y: 100, w: 80, h: 60 });
  });

  it("visible with no selection is rejected locally", () => {
    expect(store.startRect("visible", { x: 0, y: 0 })).toBe("rejected");
    expect(store.notice).toMatch(/select an annotation/);
    expect(server.putCount).toBe(0);
  });

  it("oversized visible rectangles come back clipped by the server",
    async () => {
      store.startLine({ x: 50, y: 10 });
      await store.finishLine({ x: 50, y: 110 });
      store.select({ x: 40, y: 50 }); // inside the new box
      expect(store.selectedId).toBe("ui1");
      store.startRect("visible", { x: 0, y: 0 });
      const outcome = await store.finishRect({ x: 500, y: 500 });
      expect(outcome).toBe("saved");
      // server clipped the visible region into the annotation box
      expect(store.records[0]!.visible).toEqual(
        { x: 29.5, y: 10, w: 41, h: 100 });
    });

  it("zero-area drags are rejected locally", async () => {
    store.startRect("ignore", { x: 10, y: 10 });
    const outcome = await store.finishRect({ x: 10, y: 99 }); // zero width
    expect(outcome).toBe("rejected");
    expect(server.putCount).toBe(0);
  });
});

describe("state reproduction", () => {
  it("a fresh store reproduces exactly the server state after edits",
    async () => {
      store.startLine({ x: 50, y: 10 });
      await store.finishLine({ x: 50, y: 110 });
      store.startRect("ignore", { x: 200, y: 0 });
      await store.finishRect({ x: 260, y: 40 });

      const fresh = new ClientStore(new ApiClient(server.fetch));
      await fresh.init();
      expect(fresh.records).toEqual(store.records);
      expect(fresh.revision).toBe(store.revision);
    });

  it("frame navigation is bounded and reloads per-frame state", async () => {
    await store.nextFrame();
    expect(store.frameId).toBe("v0/1");
    await store.previousFrame();
    await store.previousFrame(); // clamped at the first frame
    expect(store.frameId).toBe("v0/0");
  });

  it("missing original variant yields the single-set notice", () => {
    expect(store.diff).toBeNull();
    expect(store.notice).toMatch(/no original variant/);
  });
});
