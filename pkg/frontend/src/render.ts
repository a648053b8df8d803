/** DOM rendering for the interview view. Pure view -> elements; every value
 * shown comes verbatim from the service payloads carried by the view. */

import { AnswerValue } from "./api.js";
import { questionLabel, SessionView } from "./flow.js";

export interface Actions {
  answer(value: AnswerValue): void;
  start(): void;
}

const ANSWER_LABELS: ReadonlyArray<[AnswerValue, string, string]> = [
  ["yes", "Yes", "y"],
  ["no", "No", "n"],
  ["dont_know", "Don't know", "d"],
];

export function formatProbability(p: number): string {
  return p.toFixed(3);
}

function el(
  tag: string,
  className: string | null,
  testId: string | null,
  text?: string,
): HTMLElement {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (testId) {
    node.dataset.testid = testId;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function progressElement(view: SessionView): HTMLElement {
  const box = el("div", "progress", "progress");
  box.appendChild(el("span", "progress-item", "progress-t", `answered ${view.t}`));
  const top = view.topCauses[0];
  if (top) {
    box.appendChild(
      el(
        "span",
        "progress-item",
        "progress-top",
        `top cause ${formatProbability(top.probability)}`,
      ),
    );
  }
  if (view.stopFraction !== null) {
    const target =
      view.targetFraction !== null
        ? ` / target ${formatProbability(view.targetFraction)}`
        : "";
    box.appendChild(
      el(
        "span",
        "progress-item",
        "progress-fraction",
        `stop fraction ${formatProbability(view.stopFraction)}${target}`,
      ),
    );
  }
  return box;
}

function questionCard(view: SessionView, actions: Actions): HTMLElement {
  const card = el("section", "card question-card", "question-card");
  const question = view.question;
  if (question) {
    card.appendChild(el("h2", "question-text", "question-text", questionLabel(question)));
  }
  const row = el("div", "answer-row", null);
  for (const [value, label, key] of ANSWER_LABELS) {
    const button = el("button", "answer", `answer-${value}`, `${label} (${key})`) as
      HTMLButtonElement;
    button.type = "button";
    button.disabled = view.phase !== "asking";
    button.addEventListener("click", () => actions.answer(value));
    row.appendChild(button);
  }
  card.appendChild(row);
  return card;
}

function resultCard(view: SessionView, actions: Actions): HTMLElement {
  const result = view.finalResult;
  const card = el("section", "card result-card", "result-card");
  if (result) {
    card.appendChild(el("h2", "result-cause", "result-cause", result.cause_label));
    card.appendChild(
      el("p", "result-length", "result-length", `${result.length} questions asked`),
    );
    card.appendChild(el("span", "badge", "stop-reason", result.reason));
  }
  const again = el("button", "start", "start-button", "New interview") as HTMLButtonElement;
  again.type = "button";
  again.addEventListener("click", () => actions.start());
  card.appendChild(again);
  return card;
}

function idleCard(actions: Actions): HTMLElement {
  const card = el("section", "card", "idle-card");
  const button = el("button", "start", "start-button", "Start interview") as
    HTMLButtonElement;
  button.type = "button";
  button.addEventListener("click", () => actions.start());
  card.appendChild(button);
  return card;
}

function posteriorPanel(view: SessionView): HTMLElement {
  const panel = el("section", "posterior", "posterior-bars");
  panel.appendChild(el("h3", null, null, "Leading causes"));
  for (const entry of view.topCauses) {
    const row = el("div", "bar-row", "bar-row");
    row.appendChild(
      el(
        "span",
        "bar-label",
        "bar-label",
        `${entry.label} ${formatProbability(entry.probability)}`,
      ),
    );
    const track = el("div", "bar-track", null);
    const fill = el("div", "bar-fill", "bar-fill");
    fill.style.width = `${entry.probability * 100}%`;
    track.appendChild(fill);
    row.appendChild(track);
    panel.appendChild(row);
  }
  return panel;
}

/** Map y/n/d keys to answer actions; returns the unbind function. */
export function bindKeyboard(target: EventTarget, actions: Actions): () => void {
  const onKeydown = (event: Event): void => {
    const key = event as KeyboardEvent;
    if (key.altKey || key.ctrlKey || key.metaKey) {
      return;
    }
    const pressed = key.key.toLowerCase();
    if (pressed === "y") {
      actions.answer("yes");
    } else if (pressed === "n") {
      actions.answer("no");
    } else if (pressed === "d") {
      actions.answer("dont_know");
    }
  };
  target.addEventListener("keydown", onKeydown);
  return () => target.removeEventListener("keydown", onKeydown);
}

export function render(view: SessionView, root: HTMLElement, actions: Actions): void {
  root.textContent = "";
  root.appendChild(progressElement(view));
  if (view.error !== null) {
    root.appendChild(el("div", "error", "error", view.error));
  }
  if (view.phase === "finished") {
    root.appendChild(resultCard(view, actions));
  } else if (view.phase === "idle") {
    root.appendChild(idleCard(actions));
  } else {
    root.appendChild(questionCard(view, actions));
  }
  if (view.topCauses.length > 0) {
    root.appendChild(posteriorPanel(view));
  }
}
