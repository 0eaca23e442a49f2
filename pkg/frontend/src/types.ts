export type Point = [number, number]; // (col, row)

export type Layer = "amplitude" | "got" | "directionality" | "overlay";

export interface VolumeInfo {
  id: string;
  dims: [number, number, number];
}

export interface DetectResponse {
  boundary: Point[];
  seed_used: Point;
  threshold_used: number;
  region_px: number;
  timings_ms: Record<string, number>;
}

export interface TrackedBoundary {
  section: number;
  points: Point[];
}

export interface AttrRange {
  min: number;
  max: number;
  border_margin: number;
}

export interface ViewState {
  volumeId: string | null;
  nSections: number;
  axis: string;
  sectionIndex: number;
  layer: Layer;
  seed: Point | null;
  tG: number | null; // null = automatic (Otsu)
  sliderRange: [number, number] | null;
  boundary: Point[] | null;
  thresholdUsed: number | null;
  regionPx: number | null;
  accepted: Record<number, Point[]>;
  tracked: TrackedBoundary[] | null;
  trackedVisible: boolean;
  prompt: string | null; // blocking guidance, e.g. re-click inside the salt body
  banner: string | null; // non-blocking failure notice
  pendingRequestId: number;
}

export type UiEvent =
  | { kind: "volume-loaded"; volumeId: string; nSections: number }
  | { kind: "section-changed"; index: number }
  | { kind: "layer-changed"; layer: Layer }
  | { kind: "range-loaded"; min: number; max: number }
  | { kind: "seed-clicked"; col: number; row: number; requestId: number }
  | { kind: "threshold-dragged"; tG: number; requestId: number }
  | { kind: "auto-threshold"; requestId: number }
  | { kind: "detect-ok"; requestId: number; response: DetectResponse }
  | { kind: "detect-rejected"; requestId: number; code: string }
  | { kind: "detect-failed"; requestId: number; message: string }
  | { kind: "boundary-accepted" }
  | { kind: "track-ok"; boundaries: TrackedBoundary[] }
  | { kind: "track-failed"; message: string }
  | { kind: "tracked-visibility"; visible: boolean };
