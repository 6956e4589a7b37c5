import { clamp } from "./geometry";
import type { StrokePoint } from "./types";

export interface CapturePoint {
  x: number;
  y: number;
  t: number; // event-clock milliseconds, absolute
}

/**
 * Freehand stroke accumulator in surface coordinates.
 *
 * Points arrive from pointer events (down/move/up); timestamps come from the
 * event clock and never decrease within a stroke. Coordinates are clamped to
 * the capture surface. A tap (down+up without movement) still yields a
 * two-point dot stroke so every stored stroke has at least two points.
 */
export class StrokeCapture {
  private completed: CapturePoint[][] = [];
  private active: CapturePoint[] | null = null;

  constructor(
    readonly surfaceWidth: number,
    readonly surfaceHeight: number,
  ) {}

  private clampPoint(x: number, y: number, t: number): CapturePoint {
    const last = this.active?.[this.active.length - 1];
    return {
      x: clamp(x, 0, this.surfaceWidth),
      y: clamp(y, 0, this.surfaceHeight),
      t: last ? Math.max(t, last.t) : t,
    };
  }

  get drawing(): boolean {
    return this.active !== null;
  }

  get strokes(): readonly CapturePoint[][] {
    return this.completed;
  }

  get strokeCount(): number {
    return this.completed.length;
  }

  begin(x: number, y: number, t: number): void {
    if (this.active) {
      this.end(t);
    }
    this.active = [this.clampPoint(x, y, t)];
  }

  extend(x: number, y: number, t: number): void {
    if (!this.active) return;
    this.active.push(this.clampPoint(x, y, t));
  }

  /**
   * Finish the active stroke; returns it, or null when nothing was active.
   * A pointer-lift time later than the last sample closes the stroke with a
   * duplicate point, so stroke durations cover the full pen-down interval.
   */
  end(t?: number): CapturePoint[] | null {
    if (!this.active) return null;
    const stroke = this.active;
    this.active = null;
    const last = stroke[stroke.length - 1];
    if (t !== undefined && t > last.t) {
      stroke.push({ x: last.x, y: last.y, t });
    } else if (stroke.length === 1) {
      stroke.push({ x: last.x, y: last.y, t: last.t });
    }
    this.completed.push(stroke);
    return stroke;
  }

  get activeStroke(): readonly CapturePoint[] | null {
    return this.active;
  }

  /** Remove exactly the last completed stroke. */
  undo(): boolean {
    return this.completed.pop() !== undefined;
  }

  clear(): void {
    this.completed = [];
    this.active = null;
  }

  strokeDurationsMs(): number[] {
    return this.completed.map((s) => s[s.length - 1].t - s[0].t);
  }

  firstEventTime(): number | null {
    return this.completed.length ? this.completed[0][0].t : null;
  }

  lastEventTime(): number | null {
    if (!this.completed.length) return null;
    const last = this.completed[this.completed.length - 1];
    return last[last.length - 1].t;
  }

  /**
   * Strokes mapped through `toTarget`, with per-stroke timestamps rebased to
   * start at zero — the shape the service stores.
   */
  toPayloadStrokes(toTarget: (x: number, y: number) => [number, number]): StrokePoint[][] {
    return this.completed.map((stroke) => {
      const t0 = stroke[0].t;
      return stroke.map((p) => {
        const [tx, ty] = toTarget(p.x, p.y);
        return [tx, ty, p.t - t0] as StrokePoint;
      });
    });
  }
}
