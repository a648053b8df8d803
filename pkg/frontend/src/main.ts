/** Browser entry point: wires the controller to the page, the keyboard, and
 * the session id kept in the URL hash so a reload rejoins the session. */

import { ApiClient } from "./api.js";
import { InterviewFlow } from "./flow.js";
import { Actions, bindKeyboard, render } from "./render.js";

function sessionIdFromHash(): string | null {
  const match = window.location.hash.match(/^#s=(.+)$/);
  return match?.[1] ?? null;
}

export function main(): void {
  const root = document.getElementById("app");
  if (!root) {
    throw new Error("missing #app element");
  }
  const flow = new InterviewFlow(new ApiClient(window.location.origin));
  const actions: Actions = {
    answer: (value) => void flow.answer(value),
    start: () => void flow.start(),
  };

  flow.subscribe((view) => {
    render(view, root, actions);
    if (view.sessionId) {
      window.history.replaceState(null, "", `#s=${view.sessionId}`);
    }
  });

  bindKeyboard(document, actions);

  const existing = sessionIdFromHash();
  if (existing) {
    void flow.reload(existing);
  } else {
    void flow.start();
  }
}

main();
