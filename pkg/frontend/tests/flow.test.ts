/** Controller transitions against a scripted service stub. */

import { describe, expect, it } from "vitest";

import {
  ApiClient,
  ApiError,
  CreateReply,
  ResponseReply,
  StateReply,
  TopCause,
} from "../src/api.js";
import { InterviewFlow, questionLabel } from "../src/flow.js";

function top3(values: Array<[number, number, string]>): TopCause[] {
  return values.map(([cause, probability, label]) => ({ cause, probability, label }));
}

const FIRST = { id: "q07", index: 7, text: "Did the illness last weeks?" };
const SECOND = { id: "q02", index: 2, text: null };
const PRIOR = top3([[1, 0.4, "c1"], [2, 0.35, "c2"], [3, 0.25, "c3"]]);
const SHIFTED = top3([[2, 0.6, "c2"], [1, 0.3, "c1"], [3, 0.1, "c3"]]);

interface StubStep {
  reply?: CreateReply | ResponseReply | StateReply;
  error?: Error;
}

/** Minimal client stand-in replaying queued replies in call order. */
function stubClient(steps: StubStep[]): ApiClient {
  let cursor = 0;
  const next = () => {
    const step = steps[cursor];
    cursor += 1;
    if (!step) {
      throw new Error("stub exhausted");
    }
    return step.error ? Promise.reject(step.error) : Promise.resolve(step.reply);
  };
  return {
    createSession: next,
    submitResponse: next,
    getState: next,
  } as unknown as ApiClient;
}

function createReply(): CreateReply {
  return {
    schema_version: 1,
    session_id: "s-000001",
    t: 0,
    first_question: FIRST,
    class_posterior_top3: PRIOR,
  };
}

describe("start", () => {
  it("moves to asking with the first question and prior posterior", async () => {
    const flow = new InterviewFlow(stubClient([{ reply: createReply() }]));
    const view = await flow.start();
    expect(view.phase).toBe("asking");
    expect(view.sessionId).toBe("s-000001");
    expect(view.t).toBe(0);
    expect(view.question).toEqual(FIRST);
    expect(view.topCauses).toEqual(PRIOR);
    expect(view.error).toBeNull();
  });

  it("keeps the configured tolerance for the progress display", async () => {
    const flow = new InterviewFlow(stubClient([{ reply: createReply() }]));
    const view = await flow.start({ rule: { kind: "predictive", r: 0.7 } });
    expect(view.targetFraction).toBe(0.7);
  });

  it("reports a failed create and stays idle", async () => {
    const flow = new InterviewFlow(
      stubClient([{ error: new ApiError(400, "invalid_config", "p1st out of range") }]),
    );
    const view = await flow.start({ rule: { p1st: 1.5 } });
    expect(view.phase).toBe("idle");
    expect(view.error).toBe("invalid_config: p1st out of range");
  });
});

describe("answer", () => {
  it("advances to the next question with the updated posterior", async () => {
    const flow = new InterviewFlow(
      stubClient([
        { reply: createReply() },
        {
          reply: {
            schema_version: 1, session_id: "s-000001", t: 1,
            class_posterior_top3: SHIFTED, next_question: SECOND,
          },
        },
      ]),
    );
    await flow.start();
    const view = await flow.answer("yes");
    expect(view.phase).toBe("asking");
    expect(view.t).toBe(1);
    expect(view.question).toEqual(SECOND);
    expect(view.topCauses).toEqual(SHIFTED);
  });

  it("a dont_know answer shows the next question with the posterior unchanged", async () => {
    const flow = new InterviewFlow(
      stubClient([
        { reply: createReply() },
        {
          reply: {
            schema_version: 1, session_id: "s-000001", t: 1,
            class_posterior_top3: PRIOR, next_question: SECOND,
          },
        },
      ]),
    );
    await flow.start();
    const before = flow.current().topCauses;
    const view = await flow.answer("dont_know");
    expect(view.question).toEqual(SECOND);
    expect(view.topCauses).toEqual(before);
  });

  it("renders the final result when the service stops the session", async () => {
    const final = {
      cause: 2, cause_label: "c2", posterior: [0.05, 0.9, 0.05],
      length: 1, reason: "criterion_met",
    };
    const flow = new InterviewFlow(
      stubClient([
        { reply: createReply() },
        {
          reply: {
            schema_version: 1, session_id: "s-000001", t: 1,
            class_posterior_top3: SHIFTED, stop_fraction: 0.85, final_result: final,
          },
        },
      ]),
    );
    await flow.start();
    const view = await flow.answer("no");
    expect(view.phase).toBe("finished");
    expect(view.question).toBeNull();
    expect(view.finalResult).toEqual(final);
    expect(view.stopFraction).toBe(0.85);
  });

  it("keeps the pending question on a failed submit so it can be retried", async () => {
    const flow = new InterviewFlow(
      stubClient([
        { reply: createReply() },
        { error: new TypeError("fetch failed") },
        {
          reply: {
            schema_version: 1, session_id: "s-000001", t: 1,
            class_posterior_top3: SHIFTED, next_question: SECOND,
          },
        },
      ]),
    );
    await flow.start();
    const failed = await flow.answer("yes");
    expect(failed.phase).toBe("asking");
    expect(failed.question).toEqual(FIRST);
    expect(failed.error).toBe("fetch failed");
    expect(failed.t).toBe(0);

    const retried = await flow.answer("yes");
    expect(retried.question).toEqual(SECOND);
    expect(retried.error).toBeNull();
  });

  it("ignores answers while no question is pending", async () => {
    const flow = new InterviewFlow(stubClient([]));
    const view = await flow.answer("yes");
    expect(view.phase).toBe("idle");
  });
});

describe("reload", () => {
  it("rebuilds a live session from get_state, including the stop fraction", async () => {
    const state: StateReply = {
      schema_version: 1, session_id: "s-000009", t: 2, stopped: false,
      transcript: [
        { t: 1, question_id: "q07", response: 1, stop_fraction: 0.2 },
        { t: 2, question_id: "q02", response: 0, stop_fraction: 0.45 },
      ],
      class_posterior_top3: SHIFTED,
      next_question: SECOND,
    };
    const flow = new InterviewFlow(stubClient([{ reply: state }]));
    const view = await flow.reload("s-000009");
    expect(view.phase).toBe("asking");
    expect(view.sessionId).toBe("s-000009");
    expect(view.t).toBe(2);
    expect(view.question).toEqual(SECOND);
    expect(view.stopFraction).toBe(0.45);
  });

  it("rebuilds a stopped session as the result view", async () => {
    const final = {
      cause: 1, cause_label: "c1", posterior: [0.93, 0.04, 0.03],
      length: 2, reason: "criterion_met",
    };
    const state: StateReply = {
      schema_version: 1, session_id: "s-000010", t: 2, stopped: true,
      transcript: [
        { t: 1, question_id: "q07", response: 1 },
        { t: 2, question_id: "q02", response: 1 },
      ],
      class_posterior_top3: SHIFTED,
      final_result: final,
    };
    const flow = new InterviewFlow(stubClient([{ reply: state }]));
    const view = await flow.reload("s-000010");
    expect(view.phase).toBe("finished");
    expect(view.finalResult).toEqual(final);
    expect(view.stopFraction).toBeNull();
  });
});

describe("questionLabel", () => {
  it("prefers the sidecar text and falls back to the id", () => {
    expect(questionLabel(FIRST)).toBe("Did the illness last weeks?");
    expect(questionLabel(SECOND)).toBe("q02");
    expect(questionLabel({ id: "q01", index: 1, text: "   " })).toBe("q01");
  });
});
