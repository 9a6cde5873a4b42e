"""Interactive goal-stack sessions: start a query, apply solvers, backtrack.

A session holds a stack of levels; each level is a lazy stream of goal
states.  Applying a solver maps it over the first open subgoal of every
state in the top level and pushes the result; backtracking pops a level
(never below the initial one).  Solution streams are memoized, so pulling
more answers later never redoes solver work.
"""

from __future__ import annotations

from typing import Optional

from . import kernel, solver, stream, syntax
from .kernel import EMPTY_INST, Var
from .solver import Goal, Goalstate, Solution, Solver, apply_to_goal
from .stream import Stream
from .theory import Theory, eval_solver, parse_solver
from .unify import compose


class SessionError(Exception):
    pass


def _apply_first(st: Goalstate, slv: Solver) -> Stream:
    """Apply a solver to the first open subgoal of a state, keeping the rest."""
    if not st.subgoals:
        return stream.singleton(st)
    g1, rest = st.subgoals[0], st.subgoals[1:]

    def per(st1: Goalstate) -> Goalstate:
        rest1 = tuple(apply_to_goal(st1.inst, g, st1.metavars) for g in rest)
        n1 = len(st1.subgoals)

        def just(d, ths, _j0=st.justify, _j1=st1.justify, _i1=st1.inst, _n1=n1):
            p1 = _j1(d, ths[:_n1])
            return _j0(solver._compose(d, _i1), [p1] + list(ths[_n1:]))

        return Goalstate(
            st1.metavars, solver._compose(st1.inst, st.inst), st1.subgoals + rest1, just
        )

    return stream.smap(per, slv(g1))


class Session:
    """One interactive proof search; independent of any other session."""

    def __init__(self, theory: Theory):
        self.theory = theory
        self.qvars: list[Var] = []
        self.levels: list[Stream] = []
        self._sols: Optional[Stream] = None
        self._taken = 0

    # -- queries

    def started(self) -> bool:
        return bool(self.levels)

    def start_goal(self, query_text: str) -> str:
        """``gg``: begin a fresh goal from a ``??`` query."""
        qvars, body = syntax.parse_query(query_text, self.theory.sig)
        goal = Goal(frozenset(qvars), (), body)
        st = Goalstate(goal.metavars, EMPTY_INST, (goal,), lambda d, ths: ths[0])
        self.qvars = qvars
        self.levels = [stream.singleton(st)]
        self._invalidate()
        return self.display()

    def apply_text(self, solver_text: str, every_subgoal: bool = False) -> str:
        """``ee``: parse a solver expression and apply it to the top level."""
        slv = eval_solver(parse_solver(solver_text), self.theory)
        return self.apply_solver(slv, every_subgoal=every_subgoal)

    def apply_solver(self, slv: Solver, every_subgoal: bool = False) -> str:
        if not self.levels:
            raise SessionError("no goal started (use gg first)")
        top = self.levels[-1]
        if every_subgoal:
            new = stream.bind_fair(top, lambda st: _solve_all(st, slv))
        else:
            new = stream.bind_fair(top, lambda st: _apply_first(st, slv))
        self.levels.append(new)
        self._invalidate()
        return self.display()

    def back(self) -> str:
        """``bb``: restore the previous level (floor at the initial one)."""
        if not self.levels:
            raise SessionError("no goal started (use gg first)")
        if len(self.levels) > 1:
            self.levels.pop()
        self._invalidate()
        return self.display()

    # -- harvesting

    def top_theorems(self) -> Stream:
        """Lazy (instantiation, theorem) pairs from the complete states of
        the top level."""
        if not self.levels:
            raise SessionError("no goal started (use gg first)")
        complete = stream.filter_stream(lambda st: not st.subgoals, self.levels[-1])
        return stream.smap(
            lambda st: (solver.materialize_inst(st.inst), st.justify(EMPTY_INST, ())),
            complete,
        )

    def solutions(self) -> Stream:
        if not self.levels:
            raise SessionError("no goal started (use gg first)")
        if self._sols is None:
            complete = stream.filter_stream(lambda st: not st.subgoals, self.levels[-1])
            qvars = self.qvars

            def to_sol(st: Goalstate) -> Solution:
                cert = st.justify(EMPTY_INST, ())
                return Solution(tuple((v, st.inst.apply_term(v)) for v in qvars), cert)

            self._sols = stream.smap(to_sol, complete)
        return self._sols

    def take_solutions(self, n: int) -> list[Solution]:
        """The next n solutions (resumable: consecutive calls return
        consecutive chunks)."""
        sols = stream.take(self.solutions(), self._taken + n)
        fresh = sols[self._taken :]
        self._taken = len(sols)
        return fresh

    def _invalidate(self):
        self._sols = None
        self._taken = 0

    # -- display

    def depth(self) -> int:
        return len(self.levels)

    def display(self) -> str:
        """Show the first state of the top level without forcing the rest."""
        if not self.levels:
            return "No goal set."
        head = stream.force(self.levels[-1])
        if head is stream.EMPTY:
            return "No goal states."
        st = head.head
        if not st.subgoals:
            return "No sub(m)goals"
        goal = st.subgoals[0]
        lines = []
        if len(st.subgoals) > 1:
            lines.append(f"{len(st.subgoals)} subgoals; the first is")
        lines.append(f"`{syntax.print_term(goal.concl)}`")
        shown = [v for v in self.qvars if v in st.metavars] or sorted(
            st.metavars, key=lambda v: v.name
        )
        lines.append("Metavariables: " + " ".join(f"`{v.name}`," for v in shown))
        return "\n".join(lines)


def _solve_all(st: Goalstate, slv: Solver) -> Stream:
    """All subgoals of a state attacked left to right (used by ee_all)."""

    def fin(item):
        m2, i2, resid, prove = item
        i = solver._compose(i2, st.inst)

        def just(d, ths, _j0=st.justify, _i2=i2, _prove=prove):
            return _j0(solver._compose(d, _i2), _prove(d, list(ths)))

        return Goalstate(m2, i, resid, just)

    return solver._attack(st.subgoals, st.metavars, slv, fin)
