/** Wire types for the annotation service JSON API. */

export type TaskMode = "primitive" | "full_sketch";

export interface TaskTarget {
  kind?: string;
  source_width?: number;
  source_height?: number;
  source_font_size?: number;
  crop_ref?: string;
  layout_id?: string;
  canvas_width?: number;
  canvas_height?: number;
}

export interface Task {
  id: string;
  mode: TaskMode;
  target: TaskTarget;
}

export interface NextTaskResponse {
  status: "ok" | "none_remaining";
  task: Task | null;
}

/** [x, y, t_ms]; coordinates in the target frame, t relative to stroke start. */
export type StrokePoint = [number, number, number];

export interface SubmissionPayload {
  task_id: string;
  annotator: string;
  strokes: StrokePoint[][];
  stroke_durations_ms: number[];
  total_ms: number;
}

export interface SubmissionAck {
  record_id: string;
}

export interface StoredRecord extends SubmissionPayload {
  record_id: string;
  mode: TaskMode;
  target: TaskTarget;
  received_at: string;
}
