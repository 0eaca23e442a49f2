import type { Grid } from "./api";
import type { Point } from "./types";

/** Min-max scaled grayscale rendering of a section/attribute grid. */
export function drawGrid(ctx: CanvasRenderingContext2D, grid: Grid, scale: number): void {
  const { rows, cols, data } = grid;
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of data) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  const span = hi > lo ? hi - lo : 1;
  const image = new ImageData(cols, rows);
  for (let i = 0; i < data.length; i++) {
    const g = Math.round(((data[i] - lo) / span) * 255);
    image.data[4 * i] = g;
    image.data[4 * i + 1] = g;
    image.data[4 * i + 2] = g;
    image.data[4 * i + 3] = 255;
  }
  const off = new OffscreenCanvas(cols, rows);
  const offCtx = off.getContext("2d")!;
  offCtx.putImageData(image, 0, 0);
  ctx.imageSmoothingEnabled = false;
  ctx.clearRect(0, 0, ctx.canvas.width, ctx.canvas.height);
  ctx.drawImage(off, 0, 0, cols * scale, rows * scale);
}

export function drawBoundary(
  ctx: CanvasRenderingContext2D,
  points: Point[],
  scale: number,
  color: string,
  close = true,
): void {
  if (points.length < 2) return;
  ctx.strokeStyle = color;
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  ctx.moveTo((points[0][0] + 0.5) * scale, (points[0][1] + 0.5) * scale);
  for (let i = 1; i < points.length; i++) {
    ctx.lineTo((points[i][0] + 0.5) * scale, (points[i][1] + 0.5) * scale);
  }
  if (close) ctx.closePath();
  ctx.stroke();
}

export function drawSeed(ctx: CanvasRenderingContext2D, seed: Point, scale: number): void {
  ctx.strokeStyle = "#ff9800";
  ctx.lineWidth = 1.5;
  const [c, r] = seed;
  const x = (c + 0.5) * scale;
  const y = (r + 0.5) * scale;
  ctx.beginPath();
  ctx.moveTo(x - 5, y);
  ctx.lineTo(x + 5, y);
  ctx.moveTo(x, y - 5);
  ctx.lineTo(x, y + 5);
  ctx.stroke();
}
