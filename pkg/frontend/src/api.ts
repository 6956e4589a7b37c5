import type {
  NextTaskResponse, StoredRecord, SubmissionAck, SubmissionPayload, TaskMode,
} from "./types";

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let detail = response.statusText;
  try {
    const body = await response.json();
    if (body && typeof body.error === "string") detail = body.error;
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiError(response.status, detail);
}

/** The service surface the UI depends on (stubbed in tests). */
export interface AnnotationApi {
  nextTask(mode: TaskMode, annotator: string): Promise<NextTaskResponse>;
  submit(payload: SubmissionPayload): Promise<SubmissionAck>;
  getSubmission(recordId: string): Promise<StoredRecord>;
}

/** Thin fetch client for the annotation service. */
export class ApiClient implements AnnotationApi {
  constructor(
    readonly baseUrl: string = "",
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  async nextTask(mode: TaskMode, annotator: string): Promise<NextTaskResponse> {
    const url = `${this.baseUrl}/api/tasks/next?mode=${encodeURIComponent(mode)}` +
      `&annotator=${encodeURIComponent(annotator)}`;
    const response = await this.fetchImpl(url);
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as NextTaskResponse;
  }

  async submit(payload: SubmissionPayload): Promise<SubmissionAck> {
    const response = await this.fetchImpl(`${this.baseUrl}/api/submissions`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as SubmissionAck;
  }

  async getSubmission(recordId: string): Promise<StoredRecord> {
    const response = await this.fetchImpl(
      `${this.baseUrl}/api/submissions/${encodeURIComponent(recordId)}`);
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as StoredRecord;
  }
}
