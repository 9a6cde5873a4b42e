/** Solver-input completions from the vocabulary the server reports.
 *
 * Nothing is hardcoded: combinators and named solvers come from
 * `list_solvers`, theorem names from `list_theorems` (they complete inside
 * accept(...), rule(...), prolog([...])).
 */

export interface Vocabulary {
  combinators: string[];
  solvers: string[];
  theorems: string[];
}

const THEOREM_CONTEXT = /(accept|rule|prolog)\s*\(\s*\[?\s*([A-Za-z_][A-Za-z0-9_']*)?$/;

export function completions(vocab: Vocabulary, input: string): string[] {
  const theoremCtx = THEOREM_CONTEXT.exec(input);
  if (theoremCtx) {
    const prefix = theoremCtx[2] ?? "";
    return vocab.theorems.filter((t) => t.startsWith(prefix)).sort();
  }
  const word = /([A-Za-z_][A-Za-z0-9_']*)$/.exec(input)?.[1] ?? "";
  const names = vocab.combinators
    .map((c) => c.replace(/\(.*$/, ""))
    .concat(vocab.solvers);
  const unique = [...new Set(names)];
  return unique.filter((n) => n.startsWith(word)).sort();
}

/** Replace the trailing word of the buffer with the chosen completion. */
export function applyCompletion(input: string, completion: string): string {
  return input.replace(/([A-Za-z_][A-Za-z0-9_']*)?$/, completion);
}
