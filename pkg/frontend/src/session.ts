import type { AnnotationApi } from "./api";
import { StrokeCapture } from "./capture";
import { FrameTransform, targetFrameOf } from "./geometry";
import type { SubmissionPayload, Task, TaskMode } from "./types";

export type SessionState =
  | "idle"        // before start()
  | "loading"     // fetching the next task
  | "drawing"     // task on screen, strokes editable
  | "submitting"  // in-flight submission; drawing is locked out
  | "done"        // no tasks remaining
  | "error";      // start() failed; retry with start()

export interface SessionEvents {
  onChange?: () => void;
}

/**
 * One annotator working through the task queue.
 *
 * The state machine forbids drawing while a submission is in flight and
 * keeps all strokes when a submission fails, so a retry re-sends the same
 * drawing. At most one submission is in flight at a time.
 */
export class AnnotationSession {
  state: SessionState = "idle";
  task: Task | null = null;
  capture: StrokeCapture | null = null;
  transform: FrameTransform | null = null;
  lastError: string | null = null;
  lastRecordId: string | null = null;
  completedCount = 0;

  private surfaceWidth = 0;
  private surfaceHeight = 0;
  private taskShownAt = 0;
  private readonly now: () => number;

  constructor(
    private readonly api: AnnotationApi,
    readonly mode: TaskMode,
    readonly annotator: string,
    private readonly events: SessionEvents = {},
    now?: () => number,
  ) {
    this.now = now ?? (() => performance.now());
  }

  private changed(): void {
    this.events.onChange?.();
  }

  async start(surfaceWidth: number, surfaceHeight: number): Promise<void> {
    this.surfaceWidth = surfaceWidth;
    this.surfaceHeight = surfaceHeight;
    await this.loadNextTask();
  }

  private async loadNextTask(): Promise<void> {
    this.state = "loading";
    this.lastError = null;
    this.changed();
    try {
      const response = await this.api.nextTask(this.mode, this.annotator);
      if (response.status === "none_remaining" || !response.task) {
        this.state = "done";
        this.task = null;
        this.capture = null;
        this.transform = null;
      } else {
        this.task = response.task;
        const [targetW, targetH] = targetFrameOf(response.task);
        this.transform = new FrameTransform(
          this.surfaceWidth, this.surfaceHeight, targetW, targetH);
        this.capture = new StrokeCapture(this.surfaceWidth, this.surfaceHeight);
        this.taskShownAt = this.now();
        this.state = "drawing";
      }
    } catch (err) {
      this.state = "error";
      this.lastError = err instanceof Error ? err.message : String(err);
    }
    this.changed();
  }

  get drawingAllowed(): boolean {
    return this.state === "drawing";
  }

  pointerDown(x: number, y: number, t: number): void {
    if (!this.drawingAllowed || !this.capture) return;
    this.capture.begin(x, y, t);
    this.changed();
  }

  pointerMove(x: number, y: number, t: number): void {
    if (!this.drawingAllowed || !this.capture) return;
    this.capture.extend(x, y, t);
    this.changed();
  }

  pointerUp(t: number): void {
    if (!this.drawingAllowed || !this.capture) return;
    this.capture.end(t);
    this.changed();
  }

  undo(): void {
    if (!this.drawingAllowed || !this.capture) return;
    this.capture.undo();
    this.changed();
  }

  clear(): void {
    if (!this.drawingAllowed || !this.capture) return;
    this.capture.clear();
    this.changed();
  }

  get canSubmit(): boolean {
    return this.state === "drawing"
      && this.capture !== null
      && this.capture.strokeCount > 0
      && !this.capture.drawing;
  }

  buildPayload(): SubmissionPayload {
    if (!this.task || !this.capture || !this.transform) {
      throw new Error("no task in progress");
    }
    const transform = this.transform;
    return {
      task_id: this.task.id,
      annotator: this.annotator,
      strokes: this.capture.toPayloadStrokes((x, y) => transform.toTarget(x, y)),
      stroke_durations_ms: this.capture.strokeDurationsMs(),
      total_ms: this.now() - this.taskShownAt,
    };
  }

  /**
   * Post the current drawing. On success the next task is loaded; on
   * failure the strokes stay on the surface and the state returns to
   * drawing so the annotator can retry.
   */
  async submit(): Promise<string | null> {
    if (!this.canSubmit) return null;
    const payload = this.buildPayload();
    this.state = "submitting";
    this.changed();
    try {
      const ack = await this.api.submit(payload);
      this.lastRecordId = ack.record_id;
      this.completedCount += 1;
      await this.loadNextTask();
      return ack.record_id;
    } catch (err) {
      this.lastError = err instanceof Error ? err.message : String(err);
      this.state = "drawing"; // strokes preserved for retry
      this.changed();
      return null;
    }
  }
}
