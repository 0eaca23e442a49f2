import { describe, expect, it } from "vitest";

import { acceptedBoundary, initialState, reduce, replay } from "../src/state";
import type { DetectResponse, Point, UiEvent } from "../src/types";

const DETECT: DetectResponse = {
  boundary: [
    [10, 10],
    [11, 10],
    [11, 11],
    [10, 11],
  ] as Point[],
  seed_used: [10, 10],
  threshold_used: 12.5,
  region_px: 400,
  timings_ms: { attribute: 1.0 },
};

function loaded(): UiEvent[] {
  return [{ kind: "volume-loaded", volumeId: "demo", nSections: 5 }];
}

describe("view state reducer", () => {
  it("click sets the seed and a detect-ok renders the boundary", () => {
    const state = replay([
      ...loaded(),
      { kind: "seed-clicked", col: 10, row: 10, requestId: 1 },
      { kind: "detect-ok", requestId: 1, response: DETECT },
    ]);
    expect(state.seed).toEqual([10, 10]);
    expect(state.boundary).toEqual(DETECT.boundary);
    expect(state.thresholdUsed).toBe(12.5);
    expect(state.regionPx).toBe(400);
    expect(state.prompt).toBeNull();
  });

  it("a 422 rejection surfaces the re-click prompt and clears the overlay", () => {
    const state = replay([
      ...loaded(),
      { kind: "seed-clicked", col: 1, row: 1, requestId: 1 },
      { kind: "detect-rejected", requestId: 1, code: "SeedAboveThreshold" },
    ]);
    expect(state.boundary).toBeNull();
    expect(state.prompt).toMatch(/click anywhere inside/i);
  });

  it("changing section clears the seed and slider range", () => {
    const state = replay([
      ...loaded(),
      { kind: "range-loaded", min: 0, max: 40 },
      { kind: "seed-clicked", col: 10, row: 10, requestId: 1 },
      { kind: "detect-ok", requestId: 1, response: DETECT },
      { kind: "section-changed", index: 1 },
    ]);
    expect(state.sectionIndex).toBe(1);
    expect(state.seed).toBeNull();
    expect(state.boundary).toBeNull();
    expect(state.sliderRange).toBeNull();
  });

  it("stale responses are discarded by request id", () => {
    const state = replay([
      ...loaded(),
      { kind: "seed-clicked", col: 10, row: 10, requestId: 1 },
      { kind: "threshold-dragged", tG: 5.0, requestId: 2 },
      { kind: "detect-ok", requestId: 1, response: DETECT }, // stale
    ]);
    expect(state.boundary).toBeNull();
    const fresh = reduce(state, {
      kind: "detect-ok",
      requestId: 2,
      response: DETECT,
    });
    expect(fresh.boundary).toEqual(DETECT.boundary);
  });

  it("accept stores the boundary and advances to the next section", () => {
    const state = replay([
      ...loaded(),
      { kind: "seed-clicked", col: 10, row: 10, requestId: 1 },
      { kind: "detect-ok", requestId: 1, response: DETECT },
      { kind: "boundary-accepted" },
    ]);
    expect(state.sectionIndex).toBe(1);
    expect(state.accepted[0]).toEqual(DETECT.boundary);
    expect(state.seed).toBeNull();
    expect(acceptedBoundary({ ...state, sectionIndex: 0 })).toEqual(DETECT.boundary);
  });

  it("accept without a boundary is a no-op", () => {
    const base = replay(loaded());
    expect(reduce(base, { kind: "boundary-accepted" })).toEqual(base);
  });

  it("auto-threshold clears manual mode", () => {
    const state = replay([
      ...loaded(),
      { kind: "threshold-dragged", tG: 7.5, requestId: 1 },
      { kind: "auto-threshold", requestId: 2 },
    ]);
    expect(state.tG).toBeNull();
  });

  it("track-ok stores per-section boundaries; failures only raise a banner", () => {
    const tracked = [
      { section: 0, points: DETECT.boundary },
      { section: 1, points: DETECT.boundary },
    ];
    const ok = replay([...loaded(), { kind: "track-ok", boundaries: tracked }]);
    expect(ok.tracked).toHaveLength(2);
    expect(ok.trackedVisible).toBe(true);
    const toggled = reduce(ok, { kind: "tracked-visibility", visible: false });
    expect(toggled.trackedVisible).toBe(false);
    expect(toggled.tracked).toHaveLength(2);

    const failed = reduce(ok, { kind: "track-failed", message: "boom" });
    expect(failed.banner).toMatch(/boom/);
    expect(failed.tracked).toHaveLength(2); // state not corrupted by failure
  });

  it("replaying the event log reproduces the same state", () => {
    const log: UiEvent[] = [
      ...loaded(),
      { kind: "range-loaded", min: 0, max: 30 },
      { kind: "seed-clicked", col: 9, row: 9, requestId: 1 },
      { kind: "detect-ok", requestId: 1, response: DETECT },
      { kind: "boundary-accepted" },
      { kind: "seed-clicked", col: 12, row: 12, requestId: 2 },
      { kind: "detect-rejected", requestId: 2, code: "SeedAboveThreshold" },
    ];
    expect(replay(log)).toEqual(replay(log));
    expect(replay(log).accepted[0]).toEqual(DETECT.boundary);
  });

  it("network failures never corrupt accepted state", () => {
    const state = replay([
      ...loaded(),
      { kind: "seed-clicked", col: 10, row: 10, requestId: 1 },
      { kind: "detect-ok", requestId: 1, response: DETECT },
      { kind: "boundary-accepted" },
      { kind: "seed-clicked", col: 11, row: 11, requestId: 2 },
      { kind: "detect-failed", requestId: 2, message: "connection reset" },
    ]);
    expect(state.banner).toMatch(/connection reset/);
    expect(state.accepted[0]).toEqual(DETECT.boundary);
  });
});

describe("initial state", () => {
  it("starts with automatic threshold and no volume", () => {
    const s = initialState();
    expect(s.tG).toBeNull();
    expect(s.volumeId).toBeNull();
    expect(s.accepted).toEqual({});
  });
});
