/** DOM glue: wires the pure view model to the page.
 *
 * Kept deliberately thin; everything testable lives in client.ts/view.ts/
 * autocomplete.ts. One connection per tab, one request in flight (the
 * client serializes).
 */

import { SessionClient, ServerError } from "./client.js";
import { WsTransport } from "./transport.js";
import { completions, applyCompletion, type Vocabulary } from "./autocomplete.js";
import {
  initialView,
  positionMarker,
  withError,
  withFreshGoal,
  withMoreSolutions,
  withState,
  type SessionView,
} from "./view.js";

interface Elements {
  status: HTMLElement;
  goal: HTMLElement;
  metavars: HTMLElement;
  depth: HTMLElement;
  query: HTMLInputElement;
  solver: HTMLInputElement;
  errorBox: HTMLElement;
  errorMarker: HTMLElement;
  solutions: HTMLElement;
  suggestions: HTMLElement;
}

export function mount(doc: Document, endpoint: string): void {
  const el: Elements = {
    status: doc.getElementById("status")!,
    goal: doc.getElementById("goal")!,
    metavars: doc.getElementById("metavars")!,
    depth: doc.getElementById("depth")!,
    query: doc.getElementById("query") as HTMLInputElement,
    solver: doc.getElementById("solver") as HTMLInputElement,
    errorBox: doc.getElementById("error")!,
    errorMarker: doc.getElementById("error-marker")!,
    solutions: doc.getElementById("solutions")!,
    suggestions: doc.getElementById("suggestions")!,
  };

  let view = initialView();
  let client: SessionClient | null = null;
  const vocab: Vocabulary = { combinators: [], solvers: [], theorems: [] };

  function render(activeInput: string): void {
    el.status.textContent = view.statusLine;
    el.goal.textContent = view.goalDisplay;
    el.metavars.textContent = view.metavars.map((m) => `\`${m}\``).join(", ");
    el.depth.textContent = String(view.stackDepth);
    el.solutions.replaceChildren(
      ...view.solutionRows.map((row) => {
        const pre = doc.createElement("pre");
        pre.textContent = row;
        return pre;
      }),
    );
    if (view.inputError) {
      el.errorBox.textContent = view.inputError.message;
      el.errorMarker.textContent = positionMarker(activeInput, view.inputError.position);
    } else {
      el.errorBox.textContent = "";
      el.errorMarker.textContent = "";
    }
  }

  async function guarded(input: string, action: () => Promise<SessionView>): Promise<void> {
    try {
      view = await action();
    } catch (e) {
      if (e instanceof ServerError) {
        view = withError(view, e.message, e.position);
      } else {
        view = withError(view, String(e));
      }
    }
    render(input);
  }

  async function refreshVocabulary(): Promise<void> {
    if (!client) return;
    const sv = await client.listSolvers();
    const th = await client.listTheorems();
    vocab.combinators = sv.combinators;
    vocab.solvers = sv.solvers;
    vocab.theorems = th.theorems;
  }

  doc.getElementById("connect")!.addEventListener("click", () => {
    void (async () => {
      const ws = await WsTransport.connect(endpoint);
      client = new SessionClient(ws);
      await refreshVocabulary();
      view = { ...view, statusLine: "connected" };
      render("");
    })();
  });

  doc.getElementById("submit-query")!.addEventListener("click", () => {
    if (!client) return;
    const text = el.query.value;
    void guarded(text, async () => withFreshGoal(view, await client!.startGoal(text)));
  });

  doc.getElementById("apply-solver")!.addEventListener("click", () => {
    if (!client) return;
    const text = el.solver.value;
    void guarded(text, async () =>
      withState(view, await client!.applySolver(text), "solver applied"),
    );
  });

  doc.getElementById("back")!.addEventListener("click", () => {
    if (!client) return;
    void guarded("", async () => withState(view, await client!.back(), "backtracked"));
  });

  doc.getElementById("pull")!.addEventListener("click", () => {
    if (!client) return;
    void guarded("", async () =>
      withMoreSolutions(view, (await client!.solutions(2)).solutions),
    );
  });

  el.solver.addEventListener("input", () => {
    const items = completions(vocab, el.solver.value).slice(0, 12);
    el.suggestions.replaceChildren(
      ...items.map((name) => {
        const b = doc.createElement("button");
        b.textContent = name;
        b.addEventListener("click", () => {
          el.solver.value = applyCompletion(el.solver.value, name);
          el.suggestions.replaceChildren();
          el.solver.focus();
        });
        return b;
      }),
    );
  });

  render("");
}
