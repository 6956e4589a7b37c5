import { describe, expect, it } from "vitest";

import type { AnnotationApi } from "../src/api";
import { ApiError } from "../src/api";
import { AnnotationSession } from "../src/session";
import type {
  NextTaskResponse, StoredRecord, SubmissionAck, SubmissionPayload, Task,
} from "../src/types";

const PRIMITIVE_TASK: Task = {
  id: "t0",
  mode: "primitive",
  target: { kind: "text", source_width: 400, source_height: 100 },
};

class StubApi implements AnnotationApi {
  submissions: SubmissionPayload[] = [];
  queue: Task[];
  failNextSubmit = false;

  constructor(tasks: Task[]) {
    this.queue = [...tasks];
  }

  async nextTask(): Promise<NextTaskResponse> {
    const task = this.queue.shift();
    return task ? { status: "ok", task } : { status: "none_remaining", task: null };
  }

  async submit(payload: SubmissionPayload): Promise<SubmissionAck> {
    if (this.failNextSubmit) {
      this.failNextSubmit = false;
      throw new ApiError(409, "conflict");
    }
    this.submissions.push(payload);
    return { record_id: `rec${this.submissions.length - 1}` };
  }

  async getSubmission(): Promise<StoredRecord> {
    throw new Error("not used");
  }
}

function makeClock(start = 0) {
  let t = start;
  return {
    now: () => t,
    advance: (ms: number) => { t += ms; },
  };
}

function drawSquiggle(session: AnnotationSession, clock: ReturnType<typeof makeClock>) {
  session.pointerDown(100, 100, clock.now());
  clock.advance(50);
  session.pointerMove(200, 120, clock.now());
  clock.advance(50);
  session.pointerUp(clock.now());
}

describe("AnnotationSession", () => {
  it("start loads a task and enables drawing", async () => {
    const api = new StubApi([PRIMITIVE_TASK]);
    const session = new AnnotationSession(api, "primitive", "ann1");
    await session.start(800, 600);
    expect(session.state).toBe("drawing");
    expect(session.task?.id).toBe("t0");
    expect(session.transform?.targetWidth).toBe(400);
  });

  it("empty queue completes immediately", async () => {
    const session = new AnnotationSession(new StubApi([]), "primitive", "ann1");
    await session.start(800, 600);
    expect(session.state).toBe("done");
  });

  it("service failure during start surfaces an error state", async () => {
    const api = new StubApi([]);
    api.nextTask = async () => { throw new ApiError(500, "down"); };
    const session = new AnnotationSession(api, "primitive", "ann1");
    await session.start(800, 600);
    expect(session.state).toBe("error");
    expect(session.lastError).toContain("down");
  });

  it("cannot submit with zero strokes", async () => {
    const api = new StubApi([PRIMITIVE_TASK]);
    const session = new AnnotationSession(api, "primitive", "ann1");
    await session.start(800, 600);
    expect(session.canSubmit).toBe(false);
    expect(await session.submit()).toBeNull();
    expect(api.submissions).toHaveLength(0);
  });

  it("submit scales strokes into the target frame and advances", async () => {
    const next: Task = { ...PRIMITIVE_TASK, id: "t1" };
    const api = new StubApi([PRIMITIVE_TASK, next]);
    const clock = makeClock(10_000);
    const session = new AnnotationSession(api, "primitive", "ann1", {}, clock.now);
    await session.start(800, 600);
    clock.advance(500);
    drawSquiggle(session, clock);
    expect(session.canSubmit).toBe(true);
    const recordId = await session.submit();
    expect(recordId).toBe("rec0");
    expect(session.task?.id).toBe("t1");

    const payload = api.submissions[0];
    expect(payload.task_id).toBe("t0");
    // surface 800x600 -> target 400x100: scale 2, letterbox offsetY 200
    const transform = { scale: 2, offsetY: 200 };
    expect(payload.strokes[0][0][0]).toBeCloseTo(100 / transform.scale, 9);
    expect(payload.strokes[0][0][1]).toBeCloseTo(
      (100 - transform.offsetY) / transform.scale, 9);
    // coordinates land inside the target frame
    for (const [x, y] of payload.strokes[0]) {
      expect(x).toBeGreaterThanOrEqual(-0.001);
      expect(x).toBeLessThanOrEqual(400.001);
      expect(y).toBeGreaterThanOrEqual(-50.001); // clamped to surface, frame taller
    }
    expect(payload.total_ms).toBe(600); // 500 idle + 100 drawing on the fake clock
    expect(payload.stroke_durations_ms).toEqual([100]);
  });

  it("failed submit preserves strokes for retry", async () => {
    const api = new StubApi([PRIMITIVE_TASK]);
    api.failNextSubmit = true;
    const clock = makeClock();
    const session = new AnnotationSession(api, "primitive", "ann1", {}, clock.now);
    await session.start(800, 600);
    drawSquiggle(session, clock);
    expect(await session.submit()).toBeNull();
    expect(session.state).toBe("drawing");
    expect(session.lastError).toContain("conflict");
    expect(session.capture?.strokeCount).toBe(1);
    // retry succeeds with the same drawing
    const recordId = await session.submit();
    expect(recordId).toBe("rec0");
    expect(api.submissions).toHaveLength(1);
  });

  it("drawing is locked out while submitting", async () => {
    const api = new StubApi([PRIMITIVE_TASK, { ...PRIMITIVE_TASK, id: "t1" }]);
    let release: (value: SubmissionAck) => void = () => {};
    api.submit = () => new Promise((resolve) => { release = resolve; });
    const clock = makeClock();
    const session = new AnnotationSession(api, "primitive", "ann1", {}, clock.now);
    await session.start(800, 600);
    drawSquiggle(session, clock);
    const pending = session.submit();
    expect(session.state).toBe("submitting");
    session.pointerDown(5, 5, clock.now());
    expect(session.capture?.drawing).toBe(false); // ignored
    release({ record_id: "rec0" });
    await pending;
    expect(session.task?.id).toBe("t1");
  });

  it("undo and clear only apply while drawing", async () => {
    const api = new StubApi([PRIMITIVE_TASK]);
    const clock = makeClock();
    const session = new AnnotationSession(api, "primitive", "ann1", {}, clock.now);
    await session.start(800, 600);
    drawSquiggle(session, clock);
    drawSquiggle(session, clock);
    session.undo();
    expect(session.capture?.strokeCount).toBe(1);
    session.clear();
    expect(session.capture?.strokeCount).toBe(0);
  });
});
