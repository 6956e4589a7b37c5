import { ApiClient, type AnnotationApi } from "./api";
import { drawScene } from "./render";
import { AnnotationSession } from "./session";
import type { TaskMode } from "./types";

export interface AppElements {
  canvas: HTMLCanvasElement;
  status: HTMLElement;
  undoButton: HTMLButtonElement;
  clearButton: HTMLButtonElement;
  submitButton: HTMLButtonElement;
}

export interface AppOptions {
  api?: AnnotationApi;
  mode?: TaskMode;
  annotator?: string;
  now?: () => number;
}

/**
 * Wire the session to the DOM: pointer events on the canvas capture
 * strokes, buttons drive undo/clear/submit, and every state change
 * repaints and refreshes the toolbar.
 */
export function mountApp(elements: AppElements, options: AppOptions = {}): AnnotationSession {
  const { canvas } = elements;
  const api = options.api ?? new ApiClient("");
  const params = new URLSearchParams(
    typeof location !== "undefined" ? location.search : "");
  const mode = options.mode
    ?? ((params.get("mode") as TaskMode | null) ?? "primitive");
  const annotator = options.annotator
    ?? (params.get("annotator") ?? "anonymous");

  const session = new AnnotationSession(
    api, mode, annotator, { onChange: refresh }, options.now);

  let ctx: CanvasRenderingContext2D | null = null;
  try {
    ctx = canvas.getContext("2d");
  } catch {
    // headless DOM without canvas support; rendering becomes a no-op
  }

  function surfacePoint(event: MouseEvent): [number, number] {
    const rect = canvas.getBoundingClientRect();
    return [event.clientX - rect.left, event.clientY - rect.top];
  }

  function refresh(): void {
    drawScene(ctx, canvas.width, canvas.height, session.transform,
      session.task, session.capture?.strokes ?? [],
      session.capture?.activeStroke ?? null);
    elements.undoButton.disabled =
      !session.drawingAllowed || (session.capture?.strokeCount ?? 0) === 0;
    elements.clearButton.disabled = elements.undoButton.disabled;
    elements.submitButton.disabled = !session.canSubmit;
    elements.status.textContent = statusLine();
  }

  function statusLine(): string {
    switch (session.state) {
      case "idle":
      case "loading":
        return "loading task...";
      case "drawing": {
        const strokes = session.capture?.strokeCount ?? 0;
        const what = session.mode === "primitive"
          ? `${session.task?.target.kind ?? ""} asset`.trim()
          : `layout ${session.task?.target.layout_id ?? ""}`.trim();
        const error = session.lastError ? ` — ${session.lastError}, retry` : "";
        return `task ${session.task?.id}: draw the ${what} (${strokes} strokes)${error}`;
      }
      case "submitting":
        return "submitting...";
      case "done":
        return `all tasks complete — ${session.completedCount} submitted`;
      case "error":
        return `service unreachable: ${session.lastError ?? "unknown error"} — reload to retry`;
    }
  }

  let pointerActive = false;

  canvas.addEventListener("pointerdown", (event) => {
    if (!session.drawingAllowed) return;
    pointerActive = true;
    try {
      canvas.setPointerCapture?.(event.pointerId);
    } catch {
      // synthetic events (tests) have no real pointer id
    }
    const [x, y] = surfacePoint(event);
    session.pointerDown(x, y, event.timeStamp);
    event.preventDefault();
  });

  canvas.addEventListener("pointermove", (event) => {
    if (!pointerActive) return;
    const [x, y] = surfacePoint(event);
    session.pointerMove(x, y, event.timeStamp);
    event.preventDefault();
  });

  const finish = (event: PointerEvent) => {
    if (!pointerActive) return;
    pointerActive = false;
    session.pointerUp(event.timeStamp);
    event.preventDefault();
  };
  canvas.addEventListener("pointerup", finish);
  canvas.addEventListener("pointercancel", finish);
  canvas.addEventListener("pointerleave", finish);

  elements.undoButton.addEventListener("click", () => session.undo());
  elements.clearButton.addEventListener("click", () => session.clear());
  elements.submitButton.addEventListener("click", () => {
    void session.submit();
  });

  refresh();
  void session.start(canvas.width, canvas.height);
  return session;
}
