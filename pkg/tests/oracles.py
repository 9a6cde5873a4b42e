"""Independent reference implementations the tests check the engine against.

Everything here is deliberately naive and shares no code with the package:
a textbook Robinson unifier with eager substitution, a de Bruijn-indexed
substitution routine, a list-based round-robin merge, a decimal-to-bits
converter, and a direct environment-passing evaluator for the little LISP.
"""

from __future__ import annotations

from certlog.kernel import App, Const, Lam, Term, Var


# ---------------------------------------------------------------------------
# Naive Robinson unification (monomorphic terms, eager substitution)


def naive_apply(sub: dict, t: Term) -> Term:
    if type(t) is Var:
        got = sub.get(t.name)
        return naive_apply(sub, got) if got is not None else t
    if type(t) is Const:
        return t
    if type(t) is App:
        return App(naive_apply(sub, t.fn), naive_apply(sub, t.arg))
    return Lam(t.bound, naive_apply({k: v for k, v in sub.items() if k != t.bound.name}, t.body))


def naive_occurs(name: str, t: Term) -> bool:
    if type(t) is Var:
        return t.name == name
    if type(t) is Const:
        return False
    if type(t) is App:
        return naive_occurs(name, t.fn) or naive_occurs(name, t.arg)
    return t.bound.name != name and naive_occurs(name, t.body)


def naive_unify(t1: Term, t2: Term, unifiable_names: set) -> dict | None:
    """Robinson's algorithm; returns a fully applied (idempotent) mapping
    name -> Term or None."""

    def go(a: Term, b: Term, sub: dict) -> dict | None:
        a = naive_apply(sub, a)
        b = naive_apply(sub, b)
        if type(a) is Var and a.name in unifiable_names:
            if type(b) is Var and b.name == a.name:
                return sub
            if naive_occurs(a.name, b):
                return None
            return _extend(sub, a.name, b)
        if type(b) is Var and b.name in unifiable_names:
            if naive_occurs(b.name, a):
                return None
            return _extend(sub, b.name, a)
        if type(a) is Var and type(b) is Var:
            return sub if a.name == b.name else None
        if type(a) is Const and type(b) is Const:
            return sub if a.name == b.name and a.ty == b.ty else None
        if type(a) is App and type(b) is App:
            sub1 = go(a.fn, b.fn, sub)
            if sub1 is None:
                return None
            return go(a.arg, b.arg, sub1)
        return None

    def _extend(sub: dict, name: str, t: Term) -> dict:
        single = {name: t}
        out = {k: naive_apply(single, v) for k, v in sub.items()}
        out[name] = t
        return out

    return go(t1, t2, {})


# ---------------------------------------------------------------------------
# Capture-avoiding substitution via de Bruijn conversion


def _to_db(t: Term, env: list) -> tuple:
    if type(t) is Var:
        for i, v in enumerate(reversed(env)):
            if v == t:
                return ("b", i)
        return ("f", t.name, t.ty)
    if type(t) is Const:
        return ("c", t.name, t.ty)
    if type(t) is App:
        return ("a", _to_db(t.fn, env), _to_db(t.arg, env))
    return ("l", t.bound.ty, _to_db(t.body, env + [t.bound]))


def db_subst(theta: dict, t: Term) -> tuple:
    """Substitute then convert to de Bruijn form, entirely independently of
    the package's vsubst: substitute at the de Bruijn level where capture is
    impossible by construction."""

    def go(d: tuple, depth: int) -> tuple:
        tag = d[0]
        if tag == "f":
            for v, s in theta.items():
                if v.name == d[1] and v.ty == d[2]:
                    return _shift(_to_db(s, []), depth)
            return d
        if tag in ("b", "c"):
            return d
        if tag == "a":
            return ("a", go(d[1], depth), go(d[2], depth))
        return ("l", d[1], go(d[2], depth + 1))

    def _shift(d: tuple, by: int) -> tuple:
        # closed terms only (free names stay free); bound indices are
        # internal to the inserted term, so no shifting is actually needed
        return d

    return go(_to_db(t, []), 0)


# ---------------------------------------------------------------------------
# Round-robin merge reference


def round_robin(lists: list) -> list:
    """Fair merge of fully materialized lists."""
    out = []
    queues = [list(xs) for xs in lists]
    while any(queues):
        nxt = []
        for q in queues:
            if q:
                out.append(q.pop(0))
                nxt.append(q)
        queues = nxt
    return out


# ---------------------------------------------------------------------------
# Little-endian binary numerals


def bits_le(n: int) -> list:
    """Little-endian bit list of n (empty for 0)."""
    out = []
    while n:
        out.append(n & 1)
        n >>= 1
    return out


# ---------------------------------------------------------------------------
# Direct evaluator for the little LISP (sexps as nested Python lists/strings)


class LispStuck(Exception):
    pass


def lisp_eval(env: list, e):
    """Environment-passing evaluator matching the relational rules.

    Sexps are strings (symbols) or lists; env holds (value, name) pairs.
    """
    if isinstance(e, str):
        for value, name in env:
            if name == e:
                return value
        raise LispStuck(f"unbound symbol {e}")
    if isinstance(e, list):
        if len(e) == 2 and e[0] == "quote":
            return e[1]
        if e and e[0] == "lambda":
            return e
        if e and e[0] == "list":
            return [lisp_eval(env, x) for x in e[1:]]
        if len(e) == 2:
            f = lisp_eval(env, e[0])
            if not (isinstance(f, list) and len(f) == 3 and f[0] == "lambda"):
                raise LispStuck(f"not a unary lambda: {f}")
            [_, params, body] = f
            if not (isinstance(params, list) and len(params) == 1):
                raise LispStuck("expected a single parameter")
            arg = lisp_eval(env, e[1])
            return lisp_eval([(arg, params[0])] + env, body)
    raise LispStuck(f"stuck on {e}")


def eq_up_to_renaming(a: Term, b: Term) -> bool:
    """Structural equality modulo a bijective renaming of variables."""
    ren: dict = {}
    used: set = set()

    def go(x, y):
        tx = type(x)
        if tx is not type(y):
            return False
        if tx is Var:
            got = ren.get(x.name)
            if got is None:
                if y.name in used:
                    return False
                ren[x.name] = y.name
                used.add(y.name)
                return x.ty == y.ty
            return got == y.name and x.ty == y.ty
        if tx is Const:
            return x == y
        if tx is App:
            return go(x.fn, y.fn) and go(x.arg, y.arg)
        return False

    return go(a, b)
