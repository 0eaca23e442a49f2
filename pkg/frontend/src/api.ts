import type { AttrRange, DetectResponse, Point, TrackedBoundary, VolumeInfo } from "./types";

export interface Grid {
  rows: number;
  cols: number;
  data: Float32Array;
}

/** Machine-coded rejection (HTTP 422) carrying the service's error code. */
export class RejectedError extends Error {
  code: string;

  constructor(code: string, message: string) {
    super(message);
    this.code = code;
  }
}

async function rejectionOf(response: Response): Promise<never> {
  let code = `HTTP ${response.status}`;
  let message = response.statusText;
  try {
    const body = await response.json();
    if (body?.detail?.code) {
      code = body.detail.code;
      message = body.detail.message ?? message;
    }
  } catch {
    /* non-JSON error body */
  }
  if (response.status === 422) throw new RejectedError(code, message);
  throw new Error(`${code}: ${message}`);
}

export class ServiceClient {
  constructor(private baseUrl: string, private fetchFn: typeof fetch = fetch) {}

  private async getJson<T>(path: string): Promise<T> {
    const r = await this.fetchFn(`${this.baseUrl}${path}`);
    if (!r.ok) await rejectionOf(r);
    return (await r.json()) as T;
  }

  async volumes(): Promise<VolumeInfo[]> {
    const body = await this.getJson<{ volumes: VolumeInfo[] }>("/v1/volumes");
    return body.volumes;
  }

  async sectionGrid(volume: string, axis: string, idx: number, attr?: string): Promise<Grid> {
    const suffix = attr ? `/attr/${attr}` : "";
    const r = await this.fetchFn(
      `${this.baseUrl}/v1/volumes/${volume}/sections/${axis}/${idx}${suffix}?as=grid`,
    );
    if (!r.ok) await rejectionOf(r);
    const dims = (r.headers.get("x-dims") ?? "").split(",").map(Number);
    const buffer = await r.arrayBuffer();
    return { rows: dims[0], cols: dims[1], data: new Float32Array(buffer) };
  }

  async attrRange(volume: string, axis: string, idx: number, attr: string): Promise<AttrRange> {
    return this.getJson<AttrRange>(`/v1/volumes/${volume}/sections/${axis}/${idx}/attr/${attr}/range`);
  }

  async detect(req: {
    volume: string;
    axis: string;
    idx: number;
    seed?: Point;
    t_g?: number;
    attr?: string;
  }): Promise<DetectResponse> {
    const r = await this.fetchFn(`${this.baseUrl}/v1/detect`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(req),
    });
    if (!r.ok) await rejectionOf(r);
    return (await r.json()) as DetectResponse;
  }

  async track(req: {
    volume: string;
    ref_idx: number;
    boundary: Point[];
    axis?: string;
    config?: Record<string, unknown>;
  }): Promise<TrackedBoundary[]> {
    const r = await this.fetchFn(`${this.baseUrl}/v1/track`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(req),
    });
    if (!r.ok) await rejectionOf(r);
    const body = (await r.json()) as { boundaries: TrackedBoundary[] };
    return body.boundaries;
  }
}
