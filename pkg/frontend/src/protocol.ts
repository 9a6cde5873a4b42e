/** Message shapes of the newline-delimited JSON session protocol.
 *
 * Everything the server sends about terms is pre-rendered text; the client
 * never parses or rebuilds terms, only displays the strings verbatim.
 */

export interface ProtocolError {
  code: string;
  message: string;
  position?: number;
}

export interface ErrorResponse {
  error: ProtocolError;
}

export interface OkResponse {
  ok: true;
  [key: string]: unknown;
}

export type Response = OkResponse | ErrorResponse;

export function isError(r: Response): r is ErrorResponse {
  return (r as ErrorResponse).error !== undefined;
}

export interface Binding {
  var: string;
  term: string;
}

export interface SolutionPayload {
  bindings: Binding[];
  certificate: string;
  /** Exact text the CLI renders for the same solution. */
  text: string;
}

export interface StartGoalResult {
  metavars: string[];
  goal: string | null;
  display: string;
  depth: number;
}

export interface StateResult {
  display: string;
  depth: number;
  metavars: string[];
}

export interface SolutionsResult {
  solutions: SolutionPayload[];
  returned: number;
}

export interface VocabularyResult {
  solvers: string[];
  combinators: string[];
}

export type Request =
  | { op: "load_builtin"; name: string }
  | { op: "start_goal"; query: string }
  | { op: "apply"; solver: string; every_subgoal?: boolean }
  | { op: "back" }
  | { op: "solutions"; count: number }
  | { op: "state" }
  | { op: "list_theorems" }
  | { op: "list_solvers" };
