import { RejectedError, ServiceClient, type Grid } from "./api";
import { acceptedBoundary, initialState, reduce } from "./state";
import { drawBoundary, drawGrid, drawSeed } from "./render";
import type { Layer, UiEvent, ViewState } from "./types";

const SERVICE_URL = (window as any).SALTTEX_SERVICE_URL ?? "http://127.0.0.1:8000";
const SLIDER_STEPS = 200;
const DEBOUNCE_MS = 150;
const SCALE = 4;

const client = new ServiceClient(SERVICE_URL);
let state: ViewState = initialState();
const eventLog: UiEvent[] = [];
let nextRequestId = 1;
let debounceTimer: number | undefined;
let gridCache = new Map<string, Grid>();

const canvas = document.getElementById("view") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const slider = document.getElementById("tg-slider") as HTMLInputElement;
const sliderLabel = document.getElementById("tg-value") as HTMLSpanElement;
const autoButton = document.getElementById("auto-otsu") as HTMLButtonElement;
const acceptButton = document.getElementById("accept") as HTMLButtonElement;
const trackButton = document.getElementById("track") as HTMLButtonElement;
const prevButton = document.getElementById("prev") as HTMLButtonElement;
const nextButton = document.getElementById("next") as HTMLButtonElement;
const layerSelect = document.getElementById("layer") as HTMLSelectElement;
const promptBox = document.getElementById("prompt") as HTMLDivElement;
const bannerBox = document.getElementById("banner") as HTMLDivElement;
const statusBox = document.getElementById("status") as HTMLDivElement;

function dispatch(event: UiEvent): void {
  eventLog.push(event);
  state = reduce(state, event);
  void render();
}

function sliderToTg(value: number): number {
  if (!state.sliderRange) return value;
  const [lo, hi] = state.sliderRange;
  return lo + (value / SLIDER_STEPS) * (hi - lo);
}

async function grid(layer: Exclude<Layer, "overlay">): Promise<Grid> {
  const attr = layer === "amplitude" ? undefined : layer === "got" ? "got" : "directionality";
  const key = `${state.volumeId}/${state.axis}/${state.sectionIndex}/${layer}`;
  const hit = gridCache.get(key);
  if (hit) return hit;
  const g = await client.sectionGrid(state.volumeId!, state.axis, state.sectionIndex, attr);
  gridCache.set(key, g);
  return g;
}

async function render(): Promise<void> {
  promptBox.textContent = state.prompt ?? "";
  promptBox.style.display = state.prompt ? "block" : "none";
  bannerBox.textContent = state.banner ?? "";
  bannerBox.style.display = state.banner ? "block" : "none";
  statusBox.textContent =
    `section ${state.sectionIndex + 1}/${state.nSections}` +
    (state.thresholdUsed !== null ? ` | T_g=${state.thresholdUsed.toFixed(2)}` : "") +
    (state.regionPx !== null ? ` | region ${state.regionPx}px` : "") +
    ` | accepted ${Object.keys(state.accepted).length}`;
  if (!state.volumeId) return;

  const base = state.layer === "overlay" ? "amplitude" : state.layer;
  try {
    const g = await grid(base);
    canvas.width = g.cols * SCALE;
    canvas.height = g.rows * SCALE;
    drawGrid(ctx, g, SCALE);
  } catch (err) {
    bannerBox.textContent = `Failed to load section: ${(err as Error).message}`;
    bannerBox.style.display = "block";
    return;
  }
  if (state.boundary) drawBoundary(ctx, state.boundary, SCALE, "#4caf50");
  const accepted = acceptedBoundary(state);
  if (accepted && accepted !== state.boundary) drawBoundary(ctx, accepted, SCALE, "#2196f3");
  if (state.tracked && state.trackedVisible) {
    for (const tb of state.tracked) {
      if (tb.section === state.sectionIndex) drawBoundary(ctx, tb.points, SCALE, "#e91e63");
    }
  }
  if (state.seed) drawSeed(ctx, state.seed, SCALE);
}

async function runDetect(requestId: number): Promise<void> {
  if (!state.volumeId || !state.seed) return;
  try {
    const response = await client.detect({
      volume: state.volumeId,
      axis: state.axis,
      idx: state.sectionIndex,
      seed: state.seed,
      ...(state.tG !== null ? { t_g: state.tG } : {}),
      attr: "got",
    });
    dispatch({ kind: "detect-ok", requestId, response });
  } catch (err) {
    if (err instanceof RejectedError) {
      dispatch({ kind: "detect-rejected", requestId, code: err.code });
    } else {
      dispatch({ kind: "detect-failed", requestId, message: (err as Error).message });
    }
  }
}

async function changeSection(index: number): Promise<void> {
  dispatch({ kind: "section-changed", index });
  try {
    const range = await client.attrRange(state.volumeId!, state.axis, index, "got");
    dispatch({ kind: "range-loaded", min: range.min, max: range.max });
  } catch (err) {
    dispatch({ kind: "detect-failed", requestId: state.pendingRequestId, message: (err as Error).message });
  }
}

canvas.addEventListener("click", (ev) => {
  if (!state.volumeId) return;
  const rect = canvas.getBoundingClientRect();
  const col = Math.floor((ev.clientX - rect.left) / SCALE);
  const row = Math.floor((ev.clientY - rect.top) / SCALE);
  const requestId = nextRequestId++;
  dispatch({ kind: "seed-clicked", col, row, requestId });
  void runDetect(requestId);
});

slider.addEventListener("input", () => {
  const tG = sliderToTg(Number(slider.value));
  sliderLabel.textContent = tG.toFixed(2);
  window.clearTimeout(debounceTimer);
  debounceTimer = window.setTimeout(() => {
    const requestId = nextRequestId++;
    dispatch({ kind: "threshold-dragged", tG, requestId });
    if (state.seed) void runDetect(requestId);
  }, DEBOUNCE_MS);
});

autoButton.addEventListener("click", () => {
  const requestId = nextRequestId++;
  dispatch({ kind: "auto-threshold", requestId });
  sliderLabel.textContent = "auto (Otsu)";
  if (state.seed) void runDetect(requestId);
});

acceptButton.addEventListener("click", () => {
  const previous = state.sectionIndex;
  dispatch({ kind: "boundary-accepted" });
  if (state.sectionIndex !== previous) void changeSection(state.sectionIndex);
});

trackButton.addEventListener("click", async () => {
  const reference = acceptedBoundary(state) ?? state.boundary;
  if (!state.volumeId || !reference) return;
  try {
    const boundaries = await client.track({
      volume: state.volumeId,
      ref_idx: state.sectionIndex,
      boundary: reference,
      axis: state.axis,
    });
    dispatch({ kind: "track-ok", boundaries });
  } catch (err) {
    dispatch({ kind: "track-failed", message: (err as Error).message });
  }
});

prevButton.addEventListener("click", () => {
  if (state.sectionIndex > 0) void changeSection(state.sectionIndex - 1);
});
nextButton.addEventListener("click", () => {
  if (state.sectionIndex < state.nSections - 1) void changeSection(state.sectionIndex + 1);
});
layerSelect.addEventListener("change", () => {
  dispatch({ kind: "layer-changed", layer: layerSelect.value as Layer });
});

async function boot(): Promise<void> {
  try {
    const volumes = await client.volumes();
    if (!volumes.length) {
      bannerBox.textContent = "Service has no volumes loaded.";
      bannerBox.style.display = "block";
      return;
    }
    const vol = volumes[0];
    dispatch({ kind: "volume-loaded", volumeId: vol.id, nSections: vol.dims[0] });
    await changeSection(0);
  } catch (err) {
    bannerBox.textContent = `Cannot reach service at ${SERVICE_URL}: ${(err as Error).message}`;
    bannerBox.style.display = "block";
  }
}

void boot();

// exposed for the replay invariant: rebuilding state from the log must
// reproduce the current overlays
(window as any).salttexEventLog = eventLog;
