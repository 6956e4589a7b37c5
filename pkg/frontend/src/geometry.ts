import type { Task } from "./types";

/**
 * Uniform affine map between the drawing surface and the target frame
 * (asset crop pixels in primitive mode, layout canvas in full-sketch mode).
 * The target is letterboxed: one scale factor, centered offsets, so stored
 * coordinates are recoverable exactly.
 */
export class FrameTransform {
  readonly scale: number;
  readonly offsetX: number;
  readonly offsetY: number;

  constructor(
    readonly surfaceWidth: number,
    readonly surfaceHeight: number,
    readonly targetWidth: number,
    readonly targetHeight: number,
  ) {
    if (surfaceWidth <= 0 || surfaceHeight <= 0) {
      throw new Error("surface must have positive size");
    }
    if (targetWidth <= 0 || targetHeight <= 0) {
      throw new Error("target frame must have positive size");
    }
    this.scale = Math.min(surfaceWidth / targetWidth, surfaceHeight / targetHeight);
    this.offsetX = (surfaceWidth - targetWidth * this.scale) / 2;
    this.offsetY = (surfaceHeight - targetHeight * this.scale) / 2;
  }

  toTarget(x: number, y: number): [number, number] {
    return [(x - this.offsetX) / this.scale, (y - this.offsetY) / this.scale];
  }

  toSurface(x: number, y: number): [number, number] {
    return [x * this.scale + this.offsetX, y * this.scale + this.offsetY];
  }

  /** Surface-pixel rectangle the target occupies (for underlay rendering). */
  targetRect(): { x: number; y: number; width: number; height: number } {
    return {
      x: this.offsetX,
      y: this.offsetY,
      width: this.targetWidth * this.scale,
      height: this.targetHeight * this.scale,
    };
  }
}

const DEFAULT_CANVAS = 1000;

/** Width/height of the frame a task's strokes are expressed in. */
export function targetFrameOf(task: Task): [number, number] {
  const target = task.target ?? {};
  if (task.mode === "primitive") {
    return [target.source_width ?? DEFAULT_CANVAS, target.source_height ?? DEFAULT_CANVAS];
  }
  return [target.canvas_width ?? DEFAULT_CANVAS, target.canvas_height ?? DEFAULT_CANVAS];
}

export function clamp(v: number, lo: number, hi: number): number {
  return Math.min(hi, Math.max(lo, v));
}
