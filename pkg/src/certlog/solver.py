"""Goals, goal states, the elementary solvers, and their combinators.

A solver maps a goal to a lazy stream of goal states.  A goal state records
the metavariables introduced so far, the instantiation performed on the
goal, the remaining subgoals, and a justification that rebuilds a kernel
theorem once theorems for the subgoals are available.  ``solve`` runs a
solver over a ``??`` query, keeps the states with no subgoals left, and
pairs each metavariable binding with its certificate theorem.

The justification contract: given a downstream instantiation ``d`` and
theorems whose conclusions alpha-match ``d`` applied to the state's
subgoals, ``justify(d, proofs)`` returns a theorem whose conclusion
alpha-matches ``d`` applied to the instantiated goal.  Combinators thread
``d`` so that every stored piece of evidence is transported (via kernel
instantiation) before it is combined.
"""

from __future__ import annotations

import gc
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from . import kernel, stream, unify
from .kernel import (
    EMPTY_INST,
    Instantiation,
    Term,
    Theorem,
    Var,
    alpha_eq,
    dest_conj,
    dest_eq,
    dest_imp,
    dest_neg,
    dest_string_lit,
    strip_forall,
    strip_query,
)
from .stream import Stream
from .unify import FreshSource, compose

Justification = Callable[[Instantiation, Sequence[Theorem]], Theorem]

# Search allocates heavily while memoized streams keep most of the graph
# alive, which makes the default generational GC rescan a huge live heap on
# nearly every allocation burst (measured at ~3x total runtime).  Raising
# the thresholds keeps cycle collection working at a sane cadence.
gc.set_threshold(200_000, 25, 25)


class _ComposedInst:
    """Lazy composition of instantiations: apply = outer after inner.

    The search composes instantiations at every node, but most goal states
    die unused, so the flattened substitution is built only on first
    application and cached; children's caches make each chain node pay for
    at most one pairwise composition.
    """

    __slots__ = ("outer", "inner", "_flat")

    def __init__(self, outer, inner):
        self.outer = outer
        self.inner = inner
        self._flat = None

    def is_empty(self) -> bool:
        return self.outer.is_empty() and self.inner.is_empty()

    def flat(self) -> Instantiation:
        got = self._flat
        if got is None:
            got = compose(materialize_inst(self.outer), materialize_inst(self.inner))
            self._flat = got
        return got

    def apply_term(self, t: Term) -> Term:
        return self.flat().apply_term(t)


def _compose(outer, inner):
    if inner.is_empty():
        return outer
    if outer.is_empty():
        return inner
    return _ComposedInst(outer, inner)


def materialize_inst(i) -> Instantiation:
    """Flatten a (possibly lazily composed) instantiation."""
    if isinstance(i, _ComposedInst):
        return i.flat()
    return i


def _inst_thm(i, th: Theorem) -> Theorem:
    """Kernel instantiation along a possibly lazy composition chain."""
    if isinstance(i, _ComposedInst):
        return _inst_thm(i.outer, _inst_thm(i.inner, th))
    return kernel.inst(i, th)


class SolverError(Exception):
    pass


class InvalidJustification(SolverError):
    """A goal state's justification broke its contract."""


class StepBudgetExceeded(SolverError):
    """The configured solver-application budget ran out."""


class Goal:
    """What remains to prove: metavariables, assumptions, conclusion."""

    __slots__ = ("metavars", "assumptions", "concl", "_names")

    def __init__(self, metavars: frozenset, assumptions: tuple, concl: Term):
        self.metavars = metavars
        self.assumptions = assumptions
        self.concl = concl
        self._names = None

    def metavar_names(self) -> set:
        got = self._names
        if got is None:
            got = self._names = {v.name for v in self.metavars}
        return got

    def __repr__(self):
        return f"Goal({sorted(v.name for v in self.metavars)}, {self.concl!r})"


class Goalstate:
    __slots__ = ("metavars", "inst", "subgoals", "justify")

    def __init__(self, metavars, inst, subgoals, justify):
        self.metavars = metavars
        self.inst = inst
        self.subgoals = subgoals
        self.justify = justify

    def __repr__(self):
        return f"Goalstate({len(self.subgoals)} subgoals)"


@dataclass(frozen=True, slots=True)
class Solution:
    """One answer: the query variables' images and the certifying theorem."""

    bindings: tuple
    certificate: Theorem


Solver = Callable[[Goal], Stream]


# ---------------------------------------------------------------------------
# Step budget (used by the CLI to bound runaway searches)

_budget: list = [None]


def set_step_budget(n: Optional[int]) -> None:
    _budget[0] = [n] if n is not None else None


def clear_step_budget() -> None:
    _budget[0] = None


@contextmanager
def step_budget(n: int):
    prev = _budget[0]
    _budget[0] = [n]
    try:
        yield
    finally:
        _budget[0] = prev


def _charge() -> None:
    b = _budget[0]
    if b is not None:
        if b[0] <= 0:
            raise StepBudgetExceeded("solver step budget exceeded")
        b[0] -= 1


# ---------------------------------------------------------------------------
# Helpers


def goal_of_query(query: Term) -> tuple[list[Var], Goal]:
    qvars, body = strip_query(query)
    if not qvars:
        raise SolverError("query must start with the ?? binder")
    if body.ty != kernel.BOOL:
        raise SolverError("query body must be Boolean")
    return qvars, Goal(frozenset(qvars), (), body)


def apply_to_goal(i: Instantiation, g: Goal, metavars: Optional[frozenset] = None) -> Goal:
    mv = metavars if metavars is not None else g.metavars
    if i.is_empty():
        return g if mv is g.metavars else Goal(mv, g.assumptions, g.concl)
    asl = tuple((lbl, kernel.inst(i, th)) for lbl, th in g.assumptions)
    return Goal(mv, asl, i.apply_term(g.concl))


def _pass_through(d: Instantiation, proofs: Sequence[Theorem]) -> Theorem:
    return proofs[0]


# ---------------------------------------------------------------------------
# Elementary solvers


def succeed(goal: Goal) -> Stream:
    """Leave the goal untouched (the identity goal state)."""
    _charge()
    return stream.singleton(Goalstate(goal.metavars, EMPTY_INST, (goal,), _pass_through))


def fail(goal: Goal) -> Stream:
    """No states at all."""
    return stream.EMPTY


def _head_const_name(t: Term) -> Optional[str]:
    while type(t) is kernel.App:
        t = t.fn
    return t.name if type(t) is kernel.Const else None


def accept(th: Theorem, src: Optional[FreshSource] = None) -> Solver:
    """Close the goal by unifying with the (freshened) theorem."""
    _, _, _, template_body = unify._theorem_template(th)
    clause_head = _head_const_name(template_body)

    def slv(goal: Goal) -> Stream:
        _charge()
        if clause_head is not None:
            goal_head = _head_const_name(goal.concl)
            if goal_head is not None and goal_head != clause_head:
                return stream.EMPTY
        fresh, body, specialize = unify.freshen_theorem(th, src)
        names = goal.metavar_names()
        if fresh:
            names = names.copy()
            names.update(v.name for v in fresh)
        sub = unify.unify(body, goal.concl, (), names)
        if sub is None:
            return stream.EMPTY
        sigma = sub.inst

        def just(d: Instantiation, proofs: Sequence[Theorem]) -> Theorem:
            return _inst_thm(_compose(d, sigma), specialize())

        return stream.singleton(Goalstate(goal.metavars.union(fresh), sigma, (), just))

    return slv


def rule(th: Theorem, src: Optional[FreshSource] = None) -> Solver:
    """Backward chaining: unify the clause head with the goal and leave the
    instantiated antecedent as the single subgoal."""
    _, body0 = strip_forall(th.concl)
    d0 = dest_imp(body0)
    if d0 is None:
        raise SolverError(f"rule needs an implication, got {kernel.term_str(th.concl)}")
    ant0, concl0 = d0
    clause_head = _head_const_name(concl0)

    def slv(goal: Goal) -> Stream:
        _charge()
        if clause_head is not None:
            goal_head = _head_const_name(goal.concl)
            if goal_head is not None and goal_head != clause_head:
                return stream.EMPTY
        # refresh only the clause head before unifying; the antecedent is
        # renamed only when the head actually matched
        fresh, refresh, specialize = unify._make_refresher(th, src or unify.GLOBAL_FRESH)
        concl = refresh(concl0)
        names = goal.metavar_names()
        if fresh:
            names = names.copy()
            names.update(v.name for v in fresh)
        sub = unify.unify(concl, goal.concl, (), names)
        if sub is None:
            return stream.EMPTY
        sigma = sub.inst
        ant = refresh(ant0)
        unifiables = goal.metavars.union(fresh)
        subgoal = Goal(unifiables, goal.assumptions, sigma.apply_term(ant))

        def just(d: Instantiation, proofs: Sequence[Theorem]) -> Theorem:
            return kernel.mp(_inst_thm(_compose(d, sigma), specialize()), proofs[0])

        return stream.singleton(Goalstate(unifiables, sigma, (subgoal,), just))

    return slv


def refl(goal: Goal) -> Stream:
    """Close an equation by unifying its two sides."""
    _charge()
    d = dest_eq(goal.concl)
    if d is None:
        return stream.EMPTY
    l, r = d
    sub = unify.unify(l, r, (), goal.metavar_names())
    if sub is None:
        return stream.EMPTY
    sigma = sub.inst

    def just(dn: Instantiation, proofs: Sequence[Theorem]) -> Theorem:
        return kernel.refl(_compose(dn, sigma).apply_term(l))

    return stream.singleton(Goalstate(goal.metavars, sigma, (), just))


def conj(goal: Goal) -> Stream:
    """Split one conjunction into its two subgoals."""
    _charge()
    d = dest_conj(goal.concl)
    if d is None:
        return stream.EMPTY
    a, b = d
    ga = Goal(goal.metavars, goal.assumptions, a)
    gb = Goal(goal.metavars, goal.assumptions, b)

    def just(dn: Instantiation, proofs: Sequence[Theorem]) -> Theorem:
        return kernel.conj(proofs[0], proofs[1])

    return stream.singleton(Goalstate(goal.metavars, EMPTY_INST, (ga, gb), just))


def split_conj(goal: Goal) -> Stream:
    """Split a conjunction tree into all of its leaves; the identity state on
    anything else."""
    _charge()
    leaves = kernel.conjuncts_of(goal.concl)
    subgoals = tuple(Goal(goal.metavars, goal.assumptions, c) for c in leaves)

    def just(dn: Instantiation, proofs: Sequence[Theorem]) -> Theorem:
        it = iter(proofs)

        def build(t: Term) -> Theorem:
            dd = dest_conj(t)
            if dd is None:
                return next(it)
            left = build(dd[0])
            return kernel.conj(left, build(dd[1]))

        return build(goal.concl)

    return stream.singleton(Goalstate(goal.metavars, EMPTY_INST, subgoals, just))


def string_ne_solver(goal: Goal) -> Stream:
    """Discharge ``~(s1 = s2)`` for distinct string literals."""
    _charge()
    inner = dest_neg(goal.concl)
    d = dest_eq(inner) if inner is not None else None
    if d is None:
        return stream.EMPTY
    s1, s2 = d
    a, b = dest_string_lit(s1), dest_string_lit(s2)
    if a is None or b is None or a == b:
        return stream.EMPTY

    def just(dn: Instantiation, proofs: Sequence[Theorem]) -> Theorem:
        return kernel.string_ne(s1, s2)

    return stream.singleton(Goalstate(goal.metavars, EMPTY_INST, (), just))


# ---------------------------------------------------------------------------
# Combinators


def concat(s1: Solver, s2: Solver) -> Solver:
    """All states of s1 followed by all states of s2 (suspended)."""

    def slv(goal: Goal) -> Stream:
        return stream.append(s1(goal), lambda: s2(goal))

    return slv


def collect(solvers: Iterable[Solver]) -> Solver:
    """concat folded over a list; the empty list never succeeds."""
    solvers = tuple(solvers)
    if not solvers:
        return fail
    if len(solvers) == 1:
        return solvers[0]

    last = len(solvers) - 1

    def slv(goal: Goal) -> Stream:
        def chain(i: int) -> Stream:
            # evaluate alternatives eagerly past empty results: elementary
            # solvers are cheap and this keeps the stream tower shallow
            while i < last:
                r = solvers[i](goal)
                if r is stream.EMPTY:
                    i += 1
                    continue
                return stream.append(r, lambda i=i: chain(i + 1))
            return solvers[last](goal)

        return chain(0)

    return slv


def map_collect(f: Callable, items: Iterable) -> Solver:
    return collect([f(x) for x in items])


def _emit_item(d, ths):
    return []


def _attack(subgoals: tuple, metavars: frozenset, slv: Solver, k) -> Stream:
    """Solve subgoals left to right with slv, feeding each result through k.

    Results are (metavars, inst, residual_subgoals, prove) where prove maps
    (downstream, proofs-for-residuals) to one theorem per original subgoal.
    Instantiations made while closing subgoal i are applied to subgoals
    i+1.. before slv attacks them.  The per-subgoal streams are combined
    with the interleaving bind so that an infinite branch in one subgoal
    cannot starve the alternatives behind it.
    """
    if not subgoals:
        return stream.singleton(k((metavars, EMPTY_INST, (), _emit_item)))
    head, rest = subgoals[0], subgoals[1:]
    if not rest:
        def per_single(st1: Goalstate, _k=k) -> Stream:
            def prove(d, ths, _j=st1.justify):
                return [_j(d, ths)]

            return stream.singleton(_k((st1.metavars, st1.inst, st1.subgoals, prove)))

        return stream.bind_fair(stream.delay(lambda: slv(head)), per_single)

    def per_state(st1: Goalstate) -> Stream:
        rest1 = tuple(apply_to_goal(st1.inst, g, st1.metavars) for g in rest)

        def combine(item, _k=k, _st1=st1):
            m2, i2, resid2, prove2 = item
            i = _compose(i2, _st1.inst)
            resid1 = tuple(apply_to_goal(i2, g, m2) for g in _st1.subgoals)
            n1 = len(resid1)

            def prove(d, ths, _j1=_st1.justify, _i2=i2, _p2=prove2, _n1=n1):
                th1 = _j1(_compose(d, _i2), ths[:_n1])
                return [th1] + _p2(d, ths[_n1:])

            return _k((m2, i, resid1 + resid2, prove))

        return _attack(rest1, st1.metavars, slv, combine)

    return stream.bind_fair(stream.delay(lambda: slv(head)), per_state)


def then(s1: Solver, s2: Solver) -> Solver:
    """Apply s1, then s2 to every subgoal of each resulting state."""

    def slv(goal: Goal) -> Stream:
        def per(st0: Goalstate) -> Stream:
            def fin(item, _st0=st0):
                m2, i2, resid, prove = item
                i = _compose(i2, _st0.inst)

                def just(d, ths, _j0=_st0.justify, _i2=i2, _prove=prove):
                    return _j0(_compose(d, _i2), _prove(d, list(ths)))

                return Goalstate(m2, i, resid, just)

            return _attack(st0.subgoals, st0.metavars, s2, fin)

        return stream.bind_fair(s1(goal), per)

    return slv


def every(solvers: Iterable[Solver]) -> Solver:
    """then folded over a list; the empty list is the identity."""
    solvers = list(solvers)
    if not solvers:
        return succeed
    out = solvers[-1]
    for s in reversed(solvers[:-1]):
        out = then(s, out)
    return out


def repeat(s: Solver) -> Solver:
    """Keep applying s; every stage also offers the untouched goal, so open
    states are emitted alongside fully closed ones (solve filters them)."""

    def slv(goal: Goal) -> Stream:
        return stream.append(then(s, slv)(goal), lambda: succeed(goal))

    return slv


def interleave(solvers: Sequence[Solver]) -> Solver:
    """Fair round robin over the solvers' state streams."""
    solvers = list(solvers)
    if not solvers:
        return fail

    def slv(goal: Goal) -> Stream:
        return stream.mergef(solvers, [], goal)

    return slv


def relassoc_with(head: Theorem, tail: Theorem) -> Solver:
    """Environment lookup: backchain over the head/tail clauses, discharging
    the symbol distinctness side conditions along the way."""

    def rec(goal: Goal) -> Stream:
        return inner(goal)

    inner = collect(
        [string_ne_solver, accept(head), then(rule(tail), then(split_conj, rec))]
    )
    return rec


def prolog(theorems: Sequence[Theorem]) -> Solver:
    """Backward chaining over a clause database, Prolog style.

    Every theorem is split into its conjuncts; implications become
    backchaining steps (rule, split the antecedent, recurse) and facts are
    accepted outright.  Alternatives are tried in database order.
    """
    clauses = [c for th in theorems for c in kernel.conjuncts(th)]
    steps: list[Solver] = []

    def rec(goal: Goal) -> Stream:
        return body(goal)

    for c in clauses:
        _, inner = strip_forall(c.concl)
        if dest_imp(inner) is not None:
            steps.append(every([rule(c), split_conj, rec]))
        else:
            steps.append(accept(c))
    body = collect(steps)
    return then(split_conj, body)


def valid(s: Solver, name: Optional[str] = None) -> Solver:
    """Check each state's justification against its contract.

    The justification is exercised with marker-hypothesis proofs of the
    subgoals; the result must alpha-match the instantiated goal, otherwise
    an InvalidJustification diagnostic names the offending solver.
    """

    def slv(goal: Goal) -> Stream:
        def check(st: Goalstate) -> Goalstate:
            dummies = [kernel.fthm(g.concl) for g in st.subgoals]
            got = st.justify(EMPTY_INST, dummies)
            want = st.inst.apply_term(goal.concl)
            if not alpha_eq(got.concl, want):
                who = name or getattr(s, "__name__", "solver")
                raise InvalidJustification(
                    f"{who}: justification produced {kernel.term_str(got.concl)} "
                    f"but the instantiated goal is {kernel.term_str(want)}"
                )
            return st

        return stream.smap(check, s(goal))

    return slv


# ---------------------------------------------------------------------------
# Running queries


def run(s: Solver, goal: Goal) -> Stream:
    """The raw state stream of a solver on a goal."""
    return s(goal)


def solve_goal(s: Solver, goal: Goal, qvars: Sequence[Var] = ()) -> Stream:
    """Complete states only, mapped to Solutions."""

    def to_solution(st: Goalstate) -> Solution:
        cert = st.justify(EMPTY_INST, ())
        bindings = tuple((v, st.inst.apply_term(v)) for v in qvars)
        return Solution(bindings, cert)

    complete = stream.filter_stream(lambda st: not st.subgoals, s(goal))
    return stream.smap(to_solution, complete)


def solve(s: Solver, query: Term) -> Stream:
    """Run a solver over ``??v1 .. vn. body`` and stream the solutions.

    Each solution binds every query variable to its image under the
    accumulated instantiation (unconstrained variables are reported
    verbatim, possibly as residual fresh variables) together with the
    certificate theorem.
    """
    qvars, goal = goal_of_query(query)
    return solve_goal(s, goal, qvars)


def prove(s: Solver, t: Term) -> Stream:
    """Prove a closed Boolean term: the stream of certificate theorems."""
    if t.ty != kernel.BOOL:
        raise SolverError("prove needs a Boolean term")
    goal = Goal(frozenset(), (), t)
    return stream.smap(lambda sol: sol.certificate, solve_goal(s, goal, ()))
