import type { Point, UiEvent, ViewState } from "./types";

export function initialState(): ViewState {
  return {
    volumeId: null,
    nSections: 0,
    axis: "inline",
    sectionIndex: 0,
    layer: "amplitude",
    seed: null,
    tG: null,
    sliderRange: null,
    boundary: null,
    thresholdUsed: null,
    regionPx: null,
    accepted: {},
    tracked: null,
    trackedVisible: true,
    prompt: null,
    banner: null,
    pendingRequestId: 0,
  };
}

function stale(state: ViewState, requestId: number): boolean {
  return requestId !== state.pendingRequestId;
}

/** Pure reducer: the UI state is a fold of (server responses, user events),
 *  so replaying an event log reproduces the same overlays. */
export function reduce(state: ViewState, event: UiEvent): ViewState {
  switch (event.kind) {
    case "volume-loaded":
      return {
        ...initialState(),
        volumeId: event.volumeId,
        nSections: event.nSections,
        accepted: {},
      };
    case "section-changed":
      return {
        ...state,
        sectionIndex: event.index,
        seed: null, // seed never carries over to another section
        boundary: null,
        thresholdUsed: null,
        regionPx: null,
        sliderRange: null,
        prompt: null,
      };
    case "layer-changed":
      return { ...state, layer: event.layer };
    case "range-loaded":
      return { ...state, sliderRange: [event.min, event.max] };
    case "seed-clicked":
      return {
        ...state,
        seed: [event.col, event.row],
        prompt: null,
        pendingRequestId: event.requestId,
      };
    case "threshold-dragged":
      return { ...state, tG: event.tG, pendingRequestId: event.requestId };
    case "auto-threshold":
      return { ...state, tG: null, pendingRequestId: event.requestId };
    case "detect-ok": {
      if (stale(state, event.requestId)) return state;
      const r = event.response;
      return {
        ...state,
        boundary: r.boundary,
        seed: r.seed_used,
        thresholdUsed: r.threshold_used,
        regionPx: r.region_px,
        prompt: null,
        banner: null,
      };
    }
    case "detect-rejected": {
      if (stale(state, event.requestId)) return state;
      const prompt =
        event.code === "SeedAboveThreshold" || event.code === "SeedOutOfRange"
          ? "That point is outside the salt body - click anywhere inside it."
          : `Detection rejected (${event.code}).`;
      return { ...state, boundary: null, regionPx: null, prompt };
    }
    case "detect-failed":
      if (stale(state, event.requestId)) return state;
      return { ...state, banner: `Request failed: ${event.message}` };
    case "boundary-accepted": {
      if (!state.boundary) return state;
      const accepted = { ...state.accepted, [state.sectionIndex]: state.boundary };
      const next = Math.min(state.sectionIndex + 1, Math.max(state.nSections - 1, 0));
      return reduce({ ...state, accepted }, { kind: "section-changed", index: next });
    }
    case "track-ok":
      return { ...state, tracked: event.boundaries, trackedVisible: true, banner: null };
    case "track-failed":
      return { ...state, banner: `Tracking failed: ${event.message}` };
    case "tracked-visibility":
      return { ...state, trackedVisible: event.visible };
    default:
      return state;
  }
}

export function replay(events: UiEvent[]): ViewState {
  return events.reduce(reduce, initialState());
}

export function acceptedBoundary(state: ViewState): Point[] | null {
  return state.accepted[state.sectionIndex] ?? null;
}
