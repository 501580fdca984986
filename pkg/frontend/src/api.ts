/** Typed fetch client for the annotation service /v1 API. */

import type {
  HealthPayload,
  ReportPayload,
  SessionPayload,
  SubmitRequest,
  SubmitResponse,
  TaskPayload,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

/** True for failures worth retrying later (network down, server gone). */
export function isRetryable(error: unknown): boolean {
  if (error instanceof ApiError) {
    return error.status >= 500;
  }
  // fetch rejects with TypeError when the network itself fails.
  return error instanceof TypeError;
}

async function errorDetail(res: Response): Promise<string> {
  try {
    const body = (await res.json()) as { detail?: unknown };
    if (typeof body?.detail === "string") {
      return body.detail;
    }
  } catch {
    // Non-JSON error body; fall through to the generic message.
  }
  return `request failed with status ${res.status}`;
}

/** The slice of the API the evaluator app consumes; mockable in tests. */
export interface SessionApi {
  loadSession(evaluatorId: string): Promise<SessionPayload>;
  audioUrl(task: TaskPayload): string;
  submit(evaluatorId: string, request: SubmitRequest): Promise<SubmitResponse>;
}

export class AnnotationApi implements SessionApi {
  /** @param baseUrl origin prefix, empty when served from the same host. */
  constructor(readonly baseUrl: string = "") {}

  private async getJson<T>(path: string): Promise<T> {
    const res = await fetch(this.baseUrl + path);
    if (!res.ok) {
      throw new ApiError(await errorDetail(res), res.status);
    }
    return (await res.json()) as T;
  }

  health(): Promise<HealthPayload> {
    return this.getJson("/v1/health");
  }

  /** Load (and lazily create) the evaluator's task list, in server order. */
  loadSession(evaluatorId: string): Promise<SessionPayload> {
    return this.getJson(`/v1/session/${encodeURIComponent(evaluatorId)}`);
  }

  /** Absolute URL for a task's audio stream. */
  audioUrl(task: TaskPayload): string {
    return this.baseUrl + task.audio_url;
  }

  async submit(evaluatorId: string, request: SubmitRequest): Promise<SubmitResponse> {
    const res = await fetch(
      `${this.baseUrl}/v1/session/${encodeURIComponent(evaluatorId)}/submit`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(request),
      },
    );
    if (!res.ok) {
      throw new ApiError(await errorDetail(res), res.status);
    }
    return (await res.json()) as SubmitResponse;
  }

  report(): Promise<ReportPayload> {
    return this.getJson("/v1/report");
  }
}
