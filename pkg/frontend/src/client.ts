/** Session client: one request in flight at a time, strictly in order.
 *
 * The server answers requests on a connection sequentially, so the client
 * queues sends and resolves responses FIFO.
 */

import type {
  Request,
  Response,
  SolutionsResult,
  StartGoalResult,
  StateResult,
  VocabularyResult,
} from "./protocol.js";
import { isError } from "./protocol.js";
import type { Transport } from "./transport.js";

export class ServerError extends Error {
  readonly code: string;
  readonly position?: number;

  constructor(code: string, message: string, position?: number) {
    super(message);
    this.code = code;
    this.position = position;
  }
}

export class SessionClient {
  private transport: Transport;
  private pending: Array<{
    resolve: (r: Response) => void;
    reject: (e: Error) => void;
  }> = [];
  private queue: Promise<unknown> = Promise.resolve();

  constructor(transport: Transport) {
    this.transport = transport;
    transport.onMessage((resp) => {
      const waiter = this.pending.shift();
      if (waiter) waiter.resolve(resp);
    });
    transport.onClose((reason) => {
      while (this.pending.length) {
        this.pending.shift()!.reject(new Error(reason));
      }
    });
  }

  /** Send one request; serialized with every other call on this client. */
  private call<T>(req: Request): Promise<T> {
    const run = () =>
      new Promise<T>((resolve, reject) => {
        this.pending.push({
          resolve: (resp) => {
            if (isError(resp)) {
              const e = resp.error;
              reject(new ServerError(e.code, e.message, e.position));
            } else {
              resolve(resp as T);
            }
          },
          reject,
        });
        this.transport.send(req);
      });
    const next = this.queue.then(run, run);
    this.queue = next.catch(() => undefined);
    return next;
  }

  loadBuiltin(name: string): Promise<{ theorems: string[]; solvers: string[] }> {
    return this.call({ op: "load_builtin", name });
  }

  startGoal(query: string): Promise<StartGoalResult> {
    return this.call({ op: "start_goal", query });
  }

  applySolver(solver: string, everySubgoal = false): Promise<StateResult> {
    return this.call({ op: "apply", solver, every_subgoal: everySubgoal });
  }

  back(): Promise<StateResult> {
    return this.call({ op: "back" });
  }

  solutions(count: number): Promise<SolutionsResult> {
    return this.call({ op: "solutions", count });
  }

  state(): Promise<StateResult> {
    return this.call({ op: "state" });
  }

  listTheorems(): Promise<{ theorems: string[] }> {
    return this.call({ op: "list_theorems" });
  }

  listSolvers(): Promise<VocabularyResult> {
    return this.call({ op: "list_solvers" });
  }

  close(): void {
    this.transport.close();
  }
}
