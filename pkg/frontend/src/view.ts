/** Pure view model: a function of the last server responses, nothing else.
 *
 * Every term string shown comes verbatim from the server; the view layer
 * arranges strings and never inspects or rewrites them. Solution rows use
 * the server's `text` field, which is byte-identical to the CLI rendering.
 */

import type { SolutionPayload } from "./protocol.js";

export interface SessionView {
  goalDisplay: string;
  metavars: string[];
  stackDepth: number;
  /** One entry per solution pulled so far, in order. */
  solutionRows: string[];
  statusLine: string;
  /** Inline error for the input buffer, when the last action failed. */
  inputError: InputError | null;
}

export interface InputError {
  message: string;
  /** Character offset into the input buffer, when the server gave one. */
  position: number | null;
}

export function initialView(): SessionView {
  return {
    goalDisplay: "No goal set.",
    metavars: [],
    stackDepth: 0,
    solutionRows: [],
    statusLine: "disconnected",
    inputError: null,
  };
}

export function withState(
  view: SessionView,
  state: { display: string; depth: number; metavars: string[] },
  status: string,
): SessionView {
  return {
    ...view,
    goalDisplay: state.display,
    metavars: state.metavars,
    stackDepth: state.depth,
    statusLine: status,
    inputError: null,
  };
}

export function withFreshGoal(
  view: SessionView,
  state: { display: string; depth: number; metavars: string[] },
): SessionView {
  return { ...withState(view, state, "goal started"), solutionRows: [] };
}

/** Append newly pulled solutions; earlier rows are never re-requested. */
export function withMoreSolutions(
  view: SessionView,
  solutions: SolutionPayload[],
): SessionView {
  const rows = view.solutionRows.concat(renderSolutionRows(solutions));
  const status = solutions.length
    ? `${rows.length} solution(s)`
    : "no further solutions";
  return { ...view, solutionRows: rows, statusLine: status, inputError: null };
}

export function withError(
  view: SessionView,
  message: string,
  position?: number,
): SessionView {
  return {
    ...view,
    statusLine: "error",
    inputError: { message, position: position ?? null },
  };
}

export function renderSolutionRows(solutions: SolutionPayload[]): string[] {
  return solutions.map((s) => s.text);
}

/** Caret line pointing at an error offset inside the input buffer. */
export function positionMarker(input: string, position: number | null): string {
  if (position === null || position < 0 || position > input.length) {
    return "";
  }
  return " ".repeat(position) + "^";
}
