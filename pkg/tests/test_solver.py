"""Elementary solvers, combinators, solve, and validity checking."""

import pytest

from certlog import kernel, solver, stream
from certlog.kernel import (
    EMPTY_INST,
    alpha_eq,
    vsubst,
)
from certlog.solver import (
    Goal,
    Goalstate,
    InvalidJustification,
    StepBudgetExceeded,
    accept,
    collect,
    map_collect,
    concat,
    conj,
    every,
    fail,
    interleave,
    materialize_inst,
    prolog,
    refl,
    relassoc_with,
    repeat,
    rule,
    solve,
    split_conj,
    step_budget,
    succeed,
    then,
    valid,
)
from conftest import query_term


def goal_of(theory, text):
    qvars, body = theory.parse_query(text)
    return qvars, Goal(frozenset(qvars), (), body)


def bindings_text(theory, sol):
    from certlog.syntax import print_term

    return {v.name: print_term(t) for v, t in sol.bindings}


def check_solution(theory, sol, qtext):
    """Certificate soundness: empty hyps, conclusion alpha-equal to the
    bindings-substituted query body."""
    qvars, body = theory.parse_query(qtext)
    assert not sol.certificate.hyps
    byname = {v.name: t for v, t in sol.bindings}
    theta = {v: byname[v.name] for v in qvars if byname[v.name] != v}
    assert alpha_eq(sol.certificate.concl, vsubst(theta, body))


# -- accept


def test_accept_closes_with_append_nil(lists_thy):
    q = "??x. APPEND [] [1;2;3] = x"
    sols = stream.to_list(solve(accept(lists_thy.theorem("APPEND_NIL")), query_term(lists_thy, q)))
    assert len(sols) == 1
    assert bindings_text(lists_thy, sols[0]) == {"x": "[1; 2; 3]"}
    check_solution(lists_thy, sols[0], q)


def test_accept_arith_fact(arith_thy):
    q = "??x. 2 + 2 = x"
    sols = stream.to_list(solve(accept(arith_thy.theorem("ARITH_2_2_4")), query_term(arith_thy, q)))
    assert len(sols) == 1
    assert bindings_text(arith_thy, sols[0]) == {"x": "4"}


def test_accept_clash_is_empty(lists_thy):
    _, g = goal_of(lists_thy, "??y z. APPEND [1] y = z")
    assert stream.to_list(accept(lists_thy.theorem("APPEND_NIL"))(g)) == []


# -- rule


def test_rule_backchains_append_cons(lists_thy):
    _, g = goal_of(lists_thy, "??x y. APPEND x y = [1;2;3]")
    states = stream.to_list(rule(lists_thy.theorem("APPEND_CONS"))(g))
    assert len(states) == 1
    st = states[0]
    assert len(st.subgoals) == 1
    # subgoal is APPEND xs' y = [2; 3] for a fresh xs'
    sub = st.subgoals[0].concl
    lhs, rhs = kernel.dest_eq(sub)
    assert rhs == lists_thy.parse_term("[2; 3]")
    # x was refined to 1 :: xs'
    x = [v for v in g.metavars if v.name == "x"][0]
    image = st.inst.apply_term(x)
    d = kernel.dest_binary("CONS", image)
    assert d is not None


def test_rule_on_eval_symb(lisp_thy):
    _, g = goal_of(lisp_thy, "??e v. EVAL e (Symbol \"a\") v")
    states = stream.to_list(rule(lisp_thy.theorem("EVAL_SYMB"))(g))
    assert len(states) == 1
    head = states[0].subgoals[0].concl
    # RELASSOC "a" e v
    name = solver._head_const_name(head)
    assert name == "RELASSOC"


def test_rule_clash_is_empty(lists_thy):
    _, g = goal_of(lists_thy, "??y z. APPEND [] y = z")
    assert stream.to_list(rule(lists_thy.theorem("APPEND_CONS"))(g)) == []


def test_rule_requires_implication(lists_thy):
    with pytest.raises(solver.SolverError):
        rule(lists_thy.theorem("APPEND_NIL"))


# -- conj / split_conj


def test_conj_splits(arith_thy):
    _, g = goal_of(arith_thy, "??x. 1 = 1 /\\ 2 = x")
    states = stream.to_list(conj(g))
    assert len(states) == 1
    assert [s.concl for s in states[0].subgoals] == [
        arith_thy.parse_term("1 = 1"),
        arith_thy.parse_term("2 = x"),
    ]


def test_conj_on_non_conjunction(arith_thy):
    _, g = goal_of(arith_thy, "??x. 2 = x")
    assert stream.to_list(conj(g)) == []


def test_split_conj_flattens(arith_thy):
    _, g = goal_of(arith_thy, "??x. (1 = 1 /\\ 2 = 2) /\\ 3 = x")
    states = stream.to_list(split_conj(g))
    assert len(states[0].subgoals) == 3


def test_split_conj_identity_on_atom(arith_thy):
    _, g = goal_of(arith_thy, "??x. 3 = x")
    states = stream.to_list(split_conj(g))
    assert len(states) == 1
    assert [s.concl for s in states[0].subgoals] == [g.concl]


# -- refl


def test_refl_unifies_sides(arith_thy):
    q = "??x. 2 + 2 = x"
    sols = stream.to_list(solve(refl, query_term(arith_thy, q)))
    assert len(sols) == 1
    assert bindings_text(arith_thy, sols[0]) == {"x": "2 + 2"}
    check_solution(arith_thy, sols[0], q)


def test_refl_trivial_equation(arith_thy):
    qvars, g = goal_of(arith_thy, "??x. x = x")
    states = stream.to_list(refl(g))
    assert len(states) == 1
    assert materialize_inst(states[0].inst).is_empty()
    cert = states[0].justify(EMPTY_INST, ())
    assert alpha_eq(cert.concl, g.concl)


def test_refl_occurs_check(lists_thy):
    _, g = goal_of(lists_thy, "??x. 1 :: x = x")
    assert stream.to_list(refl(g)) == []


# -- succeed / fail / concat / collect


def test_succeed_and_fail(arith_thy):
    _, g = goal_of(arith_thy, "??x. 2 = x")
    states = stream.to_list(succeed(g))
    assert len(states) == 1 and states[0].subgoals == (g,)
    assert stream.to_list(fail(g)) == []


def test_concat_order(arith_thy):
    q = "??x. 2 + 2 = x"
    slv = concat(refl, accept(arith_thy.theorem("ARITH_2_2_4")))
    sols = stream.to_list(solve(slv, query_term(arith_thy, q)))
    assert [bindings_text(arith_thy, s)["x"] for s in sols] == ["2 + 2", "4"]
    for s in sols:
        check_solution(arith_thy, s, q)


def test_concat_fail_is_identity(arith_thy):
    q = query_term(arith_thy, "??x. 2 + 2 = x")
    a = stream.to_list(solve(concat(fail, refl), q))
    b = stream.to_list(solve(refl, q))
    assert [s.bindings[0][1] for s in a] == [s.bindings[0][1] for s in b]


def test_map_collect_over_theorems(lisp_thy):
    # the STEP-style pattern: one solver per clause, alternatives in order
    thms = [lisp_thy.theorem("ALL2_NIL"), lisp_thy.theorem("ALL2_CONS")]

    def step(th):
        from certlog.kernel import dest_imp, strip_forall

        return rule(th) if dest_imp(strip_forall(th.concl)[1]) else accept(th)

    slv = map_collect(step, thms)
    q = query_term(lisp_thy, "??l. ALL2 (EVAL []) l l")
    states = stream.take(slv(Goal(frozenset(q_vars(lisp_thy)), (), q_body(lisp_thy))), 2)
    assert len(states) == 2  # nil accepts, cons backchains


def q_vars(lisp_thy):
    return lisp_thy.parse_query("??l. ALL2 (EVAL []) l l")[0]


def q_body(lisp_thy):
    return lisp_thy.parse_query("??l. ALL2 (EVAL []) l l")[1]


def test_collect_degenerate(arith_thy):
    q = query_term(arith_thy, "??x. 2 + 2 = x")
    assert stream.to_list(solve(collect([]), q)) == []
    one = stream.to_list(solve(collect([refl]), q))
    assert len(one) == 1


# -- then / every


def test_then_identity_laws(arith_thy):
    q = query_term(arith_thy, "??x. 2 + 2 = x")
    for slv in (then(succeed, refl), then(refl, succeed)):
        sols = stream.to_list(solve(slv, q))
        assert [bindings_text(arith_thy, s)["x"] for s in sols] == ["2 + 2"]


def test_then_passes_through_closed_states(arith_thy):
    q = query_term(arith_thy, "??x. 2 + 2 = x")
    sols = stream.to_list(solve(then(refl, fail), q))
    assert len(sols) == 1  # refl closed everything; fail never ran


def test_every_empty_is_identity(arith_thy):
    _, g = goal_of(arith_thy, "??x. 2 = x")
    states = stream.to_list(every([])(g))
    assert len(states) == 1 and states[0].subgoals == (g,)


def test_then_threads_instantiations(lists_thy):
    # conj of two equations sharing x: solving the first fixes the second
    q = "??x y. x = [1;2] /\\ y = x"
    slv = then(conj, refl)
    sols = stream.to_list(solve(slv, query_term(lists_thy, q)))
    assert len(sols) == 1
    assert bindings_text(lists_thy, sols[0]) == {"x": "[1; 2]", "y": "[1; 2]"}
    check_solution(lists_thy, sols[0], q)


# -- repeat


def test_repeat_forward_append(lists_thy):
    q = "??x. APPEND [1;2] [3] = x"
    sols = stream.to_list(solve(lists_thy.solver("APPEND_SLV"), query_term(lists_thy, q)))
    assert len(sols) == 1
    assert bindings_text(lists_thy, sols[0]) == {"x": "[1; 2; 3]"}
    check_solution(lists_thy, sols[0], q)


def test_repeat_backward_append_order(lists_thy):
    q = "??x y. APPEND x y = [1;2;3]"
    sols = stream.to_list(solve(lists_thy.solver("APPEND_SLV"), query_term(lists_thy, q)))
    assert [bindings_text(lists_thy, s)["x"] for s in sols] == [
        "[]",
        "[1]",
        "[1; 2]",
        "[1; 2; 3]",
    ]
    for s in sols:
        check_solution(lists_thy, s, q)


def test_repeat_fail_behaves_like_succeed(arith_thy):
    q = query_term(arith_thy, "??x. 2 + 2 = x")
    a = stream.to_list(solve(repeat(fail), q))
    b = stream.to_list(solve(succeed, q))
    assert len(a) == len(b) == 0  # open states are filtered either way


# -- interleave


def test_interleave_empty_and_singleton(arith_thy):
    q = query_term(arith_thy, "??x. 2 + 2 = x")
    assert stream.to_list(solve(interleave([]), q)) == []
    one = stream.to_list(solve(interleave([refl]), q))
    assert len(one) == 1


def test_interleave_does_not_starve(arith_thy):
    # a productive but solution-free solver next to an immediate accept
    def spinner(goal):
        return stream.delay(lambda: spinner(goal))

    slv = interleave([spinner, accept(arith_thy.theorem("ARITH_2_2_4"))])
    q = query_term(arith_thy, "??x. 2 + 2 = x")
    sols = stream.take(solve(slv, q), 1)
    assert len(sols) == 1
    assert bindings_text(arith_thy, sols[0]) == {"x": "4"}


# -- relassoc


def test_relassoc_head_match(lisp_thy):
    slv = relassoc_with(lisp_thy.theorem("RELASSOC_HEAD"), lisp_thy.theorem("RELASSOC_TAIL"))
    q = '??r. RELASSOC "x" [(Symbol "v", "x")] r'
    sols = stream.take(solve(slv, query_term(lisp_thy, q)), 2)
    assert len(sols) == 1
    assert bindings_text(lisp_thy, sols[0])["r"] == 'Symbol "v"'


def test_relassoc_tail_match(lisp_thy):
    slv = relassoc_with(lisp_thy.theorem("RELASSOC_HEAD"), lisp_thy.theorem("RELASSOC_TAIL"))
    q = '??r. RELASSOC "y" [(Symbol "v", "x"); (Symbol "w", "y")] r'
    sols = stream.take(solve(slv, query_term(lisp_thy, q)), 2)
    assert len(sols) == 1
    assert bindings_text(lisp_thy, sols[0])["r"] == 'Symbol "w"'
    check_solution(lisp_thy, sols[0], q)


def test_relassoc_empty_env(lisp_thy):
    slv = relassoc_with(lisp_thy.theorem("RELASSOC_HEAD"), lisp_thy.theorem("RELASSOC_TAIL"))
    q = '??r. RELASSOC "z" [] r'
    assert stream.to_list(solve(slv, query_term(lisp_thy, q))) == []


# -- prolog


def test_prolog_small_arith(arith_thy):
    slv = prolog([arith_thy.theorem("ARITH_LT_HORN"), arith_thy.theorem("ARITH_LE_HORN")])
    certs = stream.take(solver.prove(slv, arith_thy.parse_term("3 < 5")), 1)
    assert len(certs) == 1
    assert alpha_eq(certs[0].concl, arith_thy.parse_term("3 < 5"))
    assert stream.take(solver.prove(slv, arith_thy.parse_term("5 < 3")), 1) == []


# -- valid


def test_valid_passthrough(arith_thy):
    q = query_term(arith_thy, "??x. 2 + 2 = x")
    a = stream.to_list(solve(valid(refl, "refl"), q))
    b = stream.to_list(solve(refl, q))
    assert len(a) == len(b) == 1
    assert a[0].bindings[0][1] == b[0].bindings[0][1]


def test_valid_catches_corrupted_justification(arith_thy):
    def corrupted(goal):
        bogus = kernel.refl(arith_thy.parse_term("7"))
        return stream.singleton(
            Goalstate(goal.metavars, EMPTY_INST, (), lambda d, ths: bogus)
        )

    _, g = goal_of(arith_thy, "??x. 2 + 2 = x")
    with pytest.raises(InvalidJustification):
        stream.to_list(valid(corrupted, "corrupted")(g))


def test_valid_append_suite(lists_thy):
    q = "??x y. APPEND x y = [1;2;3]"
    wrapped = stream.to_list(
        solve(valid(lists_thy.solver("APPEND_SLV"), "APPEND_SLV"), query_term(lists_thy, q))
    )
    plain = stream.to_list(solve(lists_thy.solver("APPEND_SLV"), query_term(lists_thy, q)))
    assert [bindings_text(lists_thy, s) for s in wrapped] == [
        bindings_text(lists_thy, s) for s in plain
    ]


# -- solve plumbing


def test_solve_requires_query_binder(arith_thy):
    with pytest.raises(solver.SolverError):
        solve(refl, arith_thy.parse_term("2 + 2 = 4"))


def test_solve_reports_unconstrained_vars_verbatim(arith_thy):
    q = query_term(arith_thy, "??x. x = x")
    sols = stream.to_list(solve(refl, q))
    assert len(sols) == 1
    v, t = sols[0].bindings[0]
    assert t == v  # identity image is reported as-is


def test_instantiation_discipline(lists_thy):
    # dom(inst.tmsubst) stays within the goal's metavariables plus the
    # fresh variables introduced by the state
    qvars, g = goal_of(lists_thy, "??x y. APPEND x y = [1;2;3]")
    states = stream.to_list(rule(lists_thy.theorem("APPEND_CONS"))(g))
    st = states[0]
    flat = materialize_inst(st.inst)
    allowed = {v.name for v in st.metavars}
    assert all(v.name in allowed for v in flat.tmsubst)


def test_step_budget_aborts(lisp_thy):
    q = query_term(lisp_thy, "??q. EVAL [] q q")
    with step_budget(5):
        with pytest.raises(StepBudgetExceeded):
            stream.take(solve(lisp_thy.solver("EVAL_SLV"), q), 3)


def test_prove_rejects_non_boolean(arith_thy):
    with pytest.raises(solver.SolverError):
        solver.prove(refl, arith_thy.parse_term("2 + 2"))


def test_prove_on_closed_term(arith_thy):
    certs = stream.take(
        solver.prove(arith_thy.solver("ARITH_SLV"), arith_thy.parse_term("3 <= 5")), 1
    )
    assert len(certs) == 1 and not certs[0].hyps


def test_concurrent_sessions_are_independent(lists_thy, arith_thy):
    # two searches running on separate threads share nothing observable
    import threading

    results = {}

    def run_append():
        q = query_term(lists_thy, "??x y. APPEND x y = [1;2;3]")
        results["append"] = [
            bindings_text(lists_thy, s)
            for s in stream.to_list(solve(lists_thy.solver("APPEND_SLV"), q))
        ]

    def run_arith():
        q = query_term(arith_thy, "??x. 2 + 2 = x")
        results["arith"] = [
            bindings_text(arith_thy, s)
            for s in stream.to_list(
                solve(concat(refl, accept(arith_thy.theorem("ARITH_2_2_4"))), q)
            )
        ]

    threads = [threading.Thread(target=run_append), threading.Thread(target=run_arith)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert [b["x"] for b in results["append"]] == ["[]", "[1]", "[1; 2]", "[1; 2; 3]"]
    assert [b["x"] for b in results["arith"]] == ["2 + 2", "4"]


def test_stream_handoff_between_threads(lists_thy):
    # a state stream may migrate between threads mid-consumption
    import threading

    q = query_term(lists_thy, "??x y. APPEND x y = [1;2;3]")
    sols = solve(lists_thy.solver("APPEND_SLV"), q)
    first = stream.take(sols, 1)
    rest_box = {}

    def consume():
        rest_box["rest"] = [bindings_text(lists_thy, s) for s in stream.to_list(sols)]

    t = threading.Thread(target=consume)
    t.start()
    t.join()
    assert bindings_text(lists_thy, first[0])["x"] == "[]"
    assert [b["x"] for b in rest_box["rest"]] == ["[]", "[1]", "[1; 2]", "[1; 2; 3]"]


def test_then_never_leaks_bound_metavars_to_later_subgoals(lists_thy):
    # after closing subgoal i, subgoals i+1.. reaching the second solver
    # must not mention the metavariables subgoal i's instantiation bound
    seen = []

    def probe(goal):
        seen.append(goal.concl)
        return refl(goal)

    q = "??x y. x = [1;2] /\\ y = x"
    sols = stream.to_list(solve(then(conj, probe), query_term(lists_thy, q)))
    assert len(sols) == 1
    # the second equation the probe saw has x already replaced by [1; 2]
    from certlog.syntax import print_term as pt

    second = [t for t in seen if pt(t).startswith("y =")]
    assert second and pt(second[0]) == "y = [1; 2]"


def test_valid_wrapped_shipped_solvers_match_unwrapped(
    lists_thy, arith_thy, sort_thy, lisp_thy, lock_thy
):
    def texts(thy, name, qtext, n):
        slv = thy.solver(name)
        q = query_term(thy, qtext)
        plain = stream.take(solve(slv, q), n)
        wrapped = stream.take(solve(valid(slv, name), q), n)
        render = lambda ss: [bindings_text(thy, s) for s in ss]
        assert render(plain) == render(wrapped)
        return len(plain)

    assert texts(lists_thy, "APPEND_SLV", "??x y. APPEND x y = [1;2;3]", 10) == 4
    assert texts(arith_thy, "ARITH_SLV", "??m. m < 5", 1) == 1
    assert texts(sort_thy, "SORT_SLV", "??ys. SORT (<=) [3;1;2] ys", 2) == 1
    assert (
        texts(lisp_thy, "EVAL_SLV", "??ret. EVAL [] '((lambda (x) x) (quote a)) ret", 1)
        == 1
    )
    assert texts(lock_thy, "LOCK_SLV", "??k. LOCK2 [5;4;6;4;2;5;4;6;4;2] k", 1) == 1
