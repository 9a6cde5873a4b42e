"""Command-line entry points: batch solving, a REPL, and the JSON server.

Exit codes: 0 when at least one solution was found, 1 when the search
finished empty, 2 on errors (parse failures, exceeded step budgets, ...).
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence, TextIO

from . import solver, stream, theories
from .kernel import KernelError
from .render import render_solution, solution_json
from .session import Session, SessionError
from .solver import SolverError, StepBudgetExceeded
from .syntax import ParseError
from .theory import Theory, TheoryError, merge_theories


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="certlog",
        description="Relational queries solved with backtracking search; every "
        "answer comes with a theorem certifying it against the loaded clauses.",
    )
    sub = p.add_subparsers(dest="mode", required=True)

    def common(sp):
        sp.add_argument(
            "--builtin",
            action="append",
            default=[],
            metavar="NAME",
            help=f"load a builtin theory ({', '.join(theories.BUILTIN_NAMES)}); repeatable",
        )
        sp.add_argument(
            "--theory",
            action="append",
            default=[],
            metavar="PATH",
            help="load a .thy file; repeatable",
        )
        sp.add_argument(
            "--max-steps",
            type=int,
            default=None,
            metavar="N",
            help="abort after N elementary solver applications",
        )

    sp = sub.add_parser("solve", help="run one query in batch mode")
    common(sp)
    sp.add_argument("--solver", required=True, help="solver name or expression")
    sp.add_argument("--query", required=True, help="a ??-query, e.g. '??x. APPEND [1;2] [3] = x'")
    sp.add_argument("--take", type=int, default=1, help="maximum number of solutions (default 1)")
    sp.add_argument("--json", action="store_true", help="one JSON object per solution")

    sp = sub.add_parser("repl", help="interactive goal-stack session")
    common(sp)

    sp = sub.add_parser("serve", help="newline-delimited JSON protocol server")
    common(sp)
    sp.add_argument("--port", type=int, default=7466)
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--stdio", action="store_true", help="serve a single session on stdio")
    sp.add_argument("--http", action="store_true", help="WebSocket bridge (needs the server extra)")
    return p


def _context(args) -> Theory:
    return theories.theory_context(args.builtin, args.theory)


def cmd_solve(args, out: TextIO) -> int:
    if args.take < 1:
        print("error: --take must be at least 1", file=sys.stderr)
        return 2
    try:
        context = _context(args)
        slv = context.parse_solver_text(args.solver)
        query_vars, body = context.parse_query(args.query)
        from . import kernel

        query = body
        for v in reversed(query_vars):
            query = kernel.mk_query(v, query)
        if args.max_steps is not None:
            solver.set_step_budget(args.max_steps)
        try:
            sols = stream.take(solver.solve(slv, query), args.take)
        finally:
            solver.clear_step_budget()
    except StepBudgetExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ParseError, TheoryError, SolverError, KernelError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    if args.json:
        for s in sols:
            out.write(solution_json(s) + "\n")
    else:
        for s in sols:
            out.write(render_solution(s) + "\n\n")
        if not sols:
            print("no solutions", file=sys.stderr)
    return 0 if sols else 1


_REPL_HELP = """commands:
  gg <query>      start a goal, e.g.  gg ??x. 2 + 2 = x
  ee <solver>     apply a solver expression to the current state
  ee_all <solver> apply it to every subgoal instead of the first
  bb              undo the last ee
  top [n]         show up to n solutions from the start (default 10)
  take <n>        show the next n solutions (resumable)
  load <path>     load a .thy file into the context
  builtin <name>  load a builtin theory into the context
  thms | solvers  list available names
  help | quit
"""


def cmd_repl(args, inp: TextIO, out: TextIO) -> int:
    try:
        context = _context(args)
    except (ParseError, TheoryError, KernelError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    session = Session(context)
    if args.max_steps is not None:
        solver.set_step_budget(args.max_steps)
    out.write("certlog session; `help` lists commands.\n")
    while True:
        out.write("# ")
        out.flush()
        line = inp.readline()
        if not line:
            break
        line = line.strip()
        if not line:
            continue
        cmd, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            if cmd in ("quit", "exit"):
                break
            elif cmd == "help":
                out.write(_REPL_HELP)
            elif cmd == "gg":
                out.write(session.start_goal(rest) + "\n")
            elif cmd in ("ee", "ee_all"):
                out.write(session.apply_text(rest, every_subgoal=cmd == "ee_all") + "\n")
            elif cmd == "bb":
                if session.depth() <= 1:
                    out.write("Already at the initial state.\n")
                    if session.started():
                        out.write(session.display() + "\n")
                else:
                    out.write(session.back() + "\n")
            elif cmd == "top":
                n = int(rest) if rest else 10
                sols = stream.take(session.solutions(), n)
                _print_solutions(out, sols)
            elif cmd == "take":
                n = int(rest) if rest else 1
                _print_solutions(out, session.take_solutions(n))
            elif cmd == "load":
                extra = theories.load_path(rest)
                context = merge_theories(f"{context.name}+{extra.name}", [context, extra])
                session = Session(context)
                out.write(f"loaded {extra.name}\n")
            elif cmd == "builtin":
                extra = theories.load_builtin(rest)
                context = merge_theories(f"{context.name}+{extra.name}", [context, extra])
                session = Session(context)
                out.write(f"loaded builtin {extra.name}\n")
            elif cmd == "thms":
                out.write(" ".join(context.theorem_names()) + "\n")
            elif cmd == "solvers":
                out.write(" ".join(context.solver_names()) + "\n")
            else:
                out.write(f"unknown command {cmd!r}; `help` lists commands.\n")
        except (ParseError, TheoryError, SessionError, SolverError, KernelError, ValueError) as e:
            out.write(f"error: {e}\n")
    solver.clear_step_budget()
    return 0


def _print_solutions(out: TextIO, sols) -> None:
    if not sols:
        out.write("No solutions.\n")
        return
    for s in sols:
        out.write(render_solution(s) + "\n\n")


def cmd_serve(args) -> int:
    from . import server

    try:
        context = _context(args)
    except (ParseError, TheoryError, KernelError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    if args.stdio:
        return server.serve_stdio(context)
    if args.http:
        return server.serve_http(context, args.host, args.port)
    return server.serve_tcp(context, args.host, args.port)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.mode == "solve":
        return cmd_solve(args, sys.stdout)
    if args.mode == "repl":
        return cmd_repl(args, sys.stdin, sys.stdout)
    return cmd_serve(args)


if __name__ == "__main__":
    sys.exit(main())
