/** End-to-end fidelity: the headless UI controller, driven over HTTP against
 * a live service, must reach exactly the final cause, length, and stop
 * reason that the library-direct session reaches for the same model,
 * session config, and scripted answers.
 */

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient, AnswerValue } from "../src/api.js";
import { InterviewFlow } from "../src/flow.js";
import {
  expectedOutcomes,
  Fixture,
  prepareFixture,
  ServiceHandle,
  startService,
} from "./helpers/service.js";

interface Script {
  name: string;
  overrides: Record<string, unknown> | null;
  values: number[];
}

const VALUE_WORDS: Record<number, AnswerValue> = {
  1: "yes",
  0: "no",
  [-1]: "dont_know",
};

/** Deterministic answer stream so both sides replay the identical log. */
function answerValues(seed: number, count: number): number[] {
  let state = seed >>> 0;
  const values: number[] = [];
  for (let i = 0; i < count; i++) {
    // mulberry32
    state = (state + 0x6d2b79f5) >>> 0;
    let z = state;
    z = Math.imul(z ^ (z >>> 15), z | 1);
    z ^= z + Math.imul(z ^ (z >>> 7), z | 61);
    const u = ((z ^ (z >>> 14)) >>> 0) / 4294967296;
    values.push(u < 0.45 ? 1 : u < 0.9 ? 0 : -1);
  }
  return values;
}

function buildScripts(): Script[] {
  const configs: Array<[string, Record<string, unknown> | null]> = [
    ["defaults", null],
    ["point-strict", { rule: { p1st: 0.9, d: 0.5 } }],
    ["point-loose", { rule: { p1st: 0.7, d: 0.75 } }],
    ["predictive-r5", {
      rule: { kind: "predictive", p1st: 0.8, d: 0.5, r: 0.5 },
      num_draws: 40, seed: 7,
    }],
    ["predictive-r7", {
      rule: { kind: "predictive", p1st: 0.8, d: 0.0, r: 0.7 },
      num_draws: 60, seed: 3,
    }],
    ["active-predictive", {
      strategy: "active_predictive",
      rule: { kind: "predictive", p1st: 0.85, d: 0.5, r: 0.6 },
      num_draws: 30, seed: 12,
    }],
    ["shared-yhat", {
      strategy: "active_predictive", shared_yhat: true,
      rule: { kind: "predictive", p1st: 0.8, d: 0.5, r: 0.5 },
      num_draws: 25, seed: 9,
    }],
    ["fixed-4", { rule: { kind: "fixed_length", length: 4 } }],
    ["fixed-7", { rule: { kind: "fixed_length", length: 7 } }],
    ["static-order", { strategy: "static_order", rule: { p1st: 0.9, d: 0.0 } }],
    ["penalized", { penalty_weight: 5, metric: "index", rule: { p1st: 0.85, d: 0.25 } }],
  ];
  const scripts: Script[] = [];
  let seed = 1;
  while (scripts.length < 20) {
    const [name, overrides] = configs[scripts.length % configs.length]!;
    scripts.push({
      name: `${name}-${seed}`,
      overrides,
      values: answerValues(seed * 2654435761, 24),
    });
    seed += 1;
  }
  return scripts;
}

async function driveInterview(
  url: string,
  script: Script,
): Promise<{ cause: number; cause_label: string; length: number; reason: string }> {
  const flow = new InterviewFlow(new ApiClient(url));
  let view = await flow.start(script.overrides ?? undefined);
  expect(view.error).toBeNull();
  let consumed = 0;
  while (view.phase === "asking") {
    if (consumed >= script.values.length) {
      throw new Error(`${script.name}: answer script exhausted at t=${view.t}`);
    }
    const value = script.values[consumed]!;
    consumed += 1;
    view = await flow.answer(VALUE_WORDS[value]!);
    expect(view.error).toBeNull();
  }
  expect(view.phase).toBe("finished");
  const result = view.finalResult;
  if (!result) {
    throw new Error(`${script.name}: finished without a final result`);
  }
  return {
    cause: result.cause,
    cause_label: result.cause_label,
    length: result.length,
    reason: result.reason,
  };
}

describe("scripted interviews match library-direct sessions", () => {
  let fixture: Fixture;
  let service: ServiceHandle;
  const scripts = buildScripts();

  beforeAll(async () => {
    fixture = prepareFixture();
    service = await startService(fixture.modelPath);
  });

  afterAll(() => {
    service?.stop();
    fixture?.cleanup();
  });

  it("reaches identical final cause, length, and reason on 20 scripts", async () => {
    const expected = expectedOutcomes(fixture, scripts);
    expect(expected).toHaveLength(20);
    for (const [i, script] of scripts.entries()) {
      const got = await driveInterview(service.url, script);
      const want = expected[i]!;
      expect(
        { name: script.name, ...got },
      ).toEqual({
        name: want.name,
        cause: want.cause,
        cause_label: want.cause_label,
        length: want.length,
        reason: want.reason,
      });
    }
  });

  it("a reloaded view mid-interview matches the live one", async () => {
    const api = new ApiClient(service.url);
    const first = new InterviewFlow(api);
    let view = await first.start({
      rule: { kind: "predictive", p1st: 0.95, d: 0.0, r: 0.9 },
      num_draws: 30,
      seed: 21,
    });
    for (const value of [1, 0, -1]) {
      expect(view.phase).toBe("asking");
      view = await first.answer(VALUE_WORDS[value]!);
      expect(view.error).toBeNull();
    }
    const second = new InterviewFlow(api);
    const rebuilt = await second.reload(view.sessionId!);
    expect(rebuilt.phase).toBe(view.phase);
    expect(rebuilt.t).toBe(view.t);
    expect(rebuilt.question).toEqual(view.question);
    expect(rebuilt.topCauses).toEqual(view.topCauses);
    expect(rebuilt.stopFraction).toBe(view.stopFraction);
  });
});
