/** Typed client for the interview service's /v1 JSON API. */

export type AnswerValue = "yes" | "no" | "dont_know";

export interface QuestionPayload {
  id: string;
  index: number;
  text: string | null;
}

export interface TopCause {
  cause: number;
  probability: number;
  label: string;
}

export interface FinalResult {
  cause: number;
  cause_label: string;
  posterior: number[];
  length: number;
  reason: string;
}

export interface CreateReply {
  schema_version: number;
  session_id: string;
  t: number;
  first_question: QuestionPayload;
  class_posterior_top3: TopCause[];
}

export interface ResponseReply {
  schema_version: number;
  session_id: string;
  t: number;
  class_posterior_top3: TopCause[];
  stop_fraction?: number;
  next_question?: QuestionPayload;
  final_result?: FinalResult;
}

export interface TranscriptRecord {
  t: number;
  question_id: string;
  response: number;
  stop_fraction?: number;
  [key: string]: unknown;
}

export interface StateReply {
  schema_version: number;
  session_id: string;
  t: number;
  stopped: boolean;
  transcript: TranscriptRecord[];
  class_posterior_top3: TopCause[];
  next_question?: QuestionPayload;
  final_result?: FinalResult;
}

export interface ModelInfo {
  schema_version: number;
  num_causes: number;
  num_questions: number;
  cause_labels: string[];
}

/** Service-reported failure, carrying the {code, message} error body. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const reply = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    const payload = await reply.json().catch(() => null);
    if (!reply.ok) {
      const detail = (payload ?? {}) as { code?: string; message?: string };
      throw new ApiError(
        reply.status,
        detail.code ?? "http_error",
        detail.message ?? `request failed with status ${reply.status}`,
      );
    }
    return payload as T;
  }

  createSession(overrides?: Record<string, unknown>): Promise<CreateReply> {
    return this.request("POST", "/v1/sessions", overrides ?? null);
  }

  submitResponse(
    sessionId: string,
    questionId: string,
    value: AnswerValue,
  ): Promise<ResponseReply> {
    return this.request("POST", `/v1/sessions/${encodeURIComponent(sessionId)}/responses`, {
      question_id: questionId,
      value,
    });
  }

  getState(sessionId: string): Promise<StateReply> {
    return this.request("GET", `/v1/sessions/${encodeURIComponent(sessionId)}`);
  }

  modelInfo(): Promise<ModelInfo> {
    return this.request("GET", "/v1/model/info");
  }
}
