/** Headless interview controller: all session state and transitions, no DOM.
 *
 * The view is a pure snapshot; every mutation flows through the service and
 * the controller only ever re-renders what the service returned. A failed
 * submission keeps the pending question so the interviewer can retry.
 */

import {
  AnswerValue,
  ApiClient,
  ApiError,
  FinalResult,
  QuestionPayload,
  TopCause,
} from "./api.js";

export type FlowPhase = "idle" | "starting" | "asking" | "submitting" | "finished";

export interface SessionView {
  phase: FlowPhase;
  sessionId: string | null;
  t: number;
  question: QuestionPayload | null;
  topCauses: TopCause[];
  stopFraction: number | null;
  /** Tolerance r from the session overrides, for the progress display. */
  targetFraction: number | null;
  finalResult: FinalResult | null;
  error: string | null;
}

export type ViewListener = (view: SessionView) => void;

export function initialView(): SessionView {
  return {
    phase: "idle",
    sessionId: null,
    t: 0,
    question: null,
    topCauses: [],
    stopFraction: null,
    targetFraction: null,
    finalResult: null,
    error: null,
  };
}

/** Display text for a question: sidecar text when present, id otherwise. */
export function questionLabel(question: QuestionPayload): string {
  const text = question.text?.trim();
  return text ? text : question.id;
}

function describeError(err: unknown): string {
  if (err instanceof ApiError) {
    return `${err.code}: ${err.message}`;
  }
  return err instanceof Error ? err.message : String(err);
}

function configuredTolerance(overrides?: Record<string, unknown>): number | null {
  const rule = overrides?.["rule"];
  if (rule && typeof rule === "object") {
    const r = (rule as Record<string, unknown>)["r"];
    if (typeof r === "number") {
      return r;
    }
  }
  return null;
}

export class InterviewFlow {
  private view: SessionView = initialView();
  private readonly listeners = new Set<ViewListener>();

  constructor(private readonly api: ApiClient) {}

  current(): SessionView {
    return this.view;
  }

  /** Register a listener; it is called immediately with the current view. */
  subscribe(listener: ViewListener): () => void {
    this.listeners.add(listener);
    listener(this.view);
    return () => this.listeners.delete(listener);
  }

  private update(patch: Partial<SessionView>): void {
    this.view = { ...this.view, ...patch };
    for (const listener of this.listeners) {
      listener(this.view);
    }
  }

  async start(overrides?: Record<string, unknown>): Promise<SessionView> {
    this.update({
      ...initialView(),
      phase: "starting",
      targetFraction: configuredTolerance(overrides),
    });
    try {
      const reply = await this.api.createSession(overrides);
      this.update({
        phase: "asking",
        sessionId: reply.session_id,
        t: reply.t,
        question: reply.first_question,
        topCauses: reply.class_posterior_top3,
      });
    } catch (err) {
      this.update({ phase: "idle", error: describeError(err) });
    }
    return this.view;
  }

  async answer(value: AnswerValue): Promise<SessionView> {
    const { phase, sessionId, question } = this.view;
    if (phase !== "asking" || sessionId === null || question === null) {
      return this.view;
    }
    this.update({ phase: "submitting", error: null });
    try {
      const reply = await this.api.submitResponse(sessionId, question.id, value);
      if (reply.final_result) {
        this.update({
          phase: "finished",
          t: reply.t,
          question: null,
          topCauses: reply.class_posterior_top3,
          stopFraction: reply.stop_fraction ?? this.view.stopFraction,
          finalResult: reply.final_result,
        });
      } else {
        this.update({
          phase: "asking",
          t: reply.t,
          question: reply.next_question ?? null,
          topCauses: reply.class_posterior_top3,
          stopFraction: reply.stop_fraction ?? this.view.stopFraction,
        });
      }
    } catch (err) {
      // Keep the pending question; the same answer can be retried.
      this.update({ phase: "asking", error: describeError(err) });
    }
    return this.view;
  }

  /** Rebuild the view for an existing session from the service's state. */
  async reload(sessionId: string): Promise<SessionView> {
    const target = this.view.targetFraction;
    this.update({ ...initialView(), phase: "starting", targetFraction: target });
    try {
      const state = await this.api.getState(sessionId);
      const last = state.transcript[state.transcript.length - 1];
      const fraction = typeof last?.stop_fraction === "number" ? last.stop_fraction : null;
      this.update({
        phase: state.stopped ? "finished" : "asking",
        sessionId: state.session_id,
        t: state.t,
        question: state.next_question ?? null,
        topCauses: state.class_posterior_top3,
        stopFraction: fraction,
        finalResult: state.final_result ?? null,
      });
    } catch (err) {
      this.update({ phase: "idle", error: describeError(err) });
    }
    return this.view;
  }
}
