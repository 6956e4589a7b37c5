import type { CapturePoint } from "./capture";
import type { FrameTransform } from "./geometry";
import type { Task } from "./types";

/**
 * Repaint the drawing surface: letterboxed target underlay, completed
 * strokes, then the stroke in progress. `ctx` may be null (headless tests);
 * rendering is then a no-op.
 */
export function drawScene(
  ctx: CanvasRenderingContext2D | null,
  width: number,
  height: number,
  transform: FrameTransform | null,
  task: Task | null,
  strokes: readonly CapturePoint[][],
  activeStroke: readonly CapturePoint[] | null,
): void {
  if (!ctx) return;
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#f5f5f5";
  ctx.fillRect(0, 0, width, height);

  if (transform && task) {
    const rect = transform.targetRect();
    ctx.fillStyle = "#ffffff";
    ctx.fillRect(rect.x, rect.y, rect.width, rect.height);
    ctx.strokeStyle = task.mode === "primitive" ? "#c0c8d8" : "#d8c8c0";
    ctx.lineWidth = 1;
    ctx.strokeRect(rect.x + 0.5, rect.y + 0.5, rect.width - 1, rect.height - 1);
  }

  ctx.strokeStyle = "#1a1a1a";
  ctx.lineWidth = 2.5;
  ctx.lineCap = "round";
  ctx.lineJoin = "round";
  for (const stroke of strokes) {
    drawPolyline(ctx, stroke);
  }
  if (activeStroke && activeStroke.length > 0) {
    ctx.strokeStyle = "#444444";
    drawPolyline(ctx, activeStroke);
  }
}

function drawPolyline(ctx: CanvasRenderingContext2D,
                      points: readonly CapturePoint[]): void {
  ctx.beginPath();
  ctx.moveTo(points[0].x, points[0].y);
  for (let i = 1; i < points.length; i++) {
    ctx.lineTo(points[i].x, points[i].y);
  }
  if (points.length === 1) {
    ctx.lineTo(points[0].x + 0.1, points[0].y);
  }
  ctx.stroke();
}
