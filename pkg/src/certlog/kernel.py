"""Trusted core: types, terms, theorems and the fixed set of inference rules.

The only ways to obtain a ``Theorem`` are the rule functions in this module
and ``Signature.new_axiom``.  Everything else in the package (unification,
search, parsing) manipulates plain terms and delegates to these rules, so any
theorem that falls out of a search is valid relative to the registered
axioms and nothing else.

Terms are immutable and well typed by construction: ``App`` refuses an
operand whose type does not match the operator's domain.  Hashes and free
variable sets are cached per node because the search layer uses terms
heavily as dictionary keys.
"""

from __future__ import annotations

import threading
from contextlib import contextmanager
from typing import Mapping, Optional, Sequence


class KernelError(Exception):
    """A kernel precondition was violated."""


class TypeMismatch(KernelError):
    """Two types that had to agree did not."""


# ---------------------------------------------------------------------------
# Types


class HolType:
    __slots__ = ()


class TyVar(HolType):
    """Interned: constructing the same name twice yields the same object."""

    __slots__ = ("name", "_hash")
    _interned: dict = {}

    def __new__(cls, name: str):
        got = cls._interned.get(name)
        if got is None:
            got = super().__new__(cls)
            got.name = name
            got._hash = hash(("tyv", name))
            cls._interned[name] = got
        return got

    def __eq__(self, other):
        return self is other or (type(other) is TyVar and self.name == other.name)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"TyVar({self.name!r})"


class TyCon(HolType):
    """Interned like TyVar, so type equality is usually a pointer check."""

    __slots__ = ("name", "args", "_hash")
    _interned: dict = {}

    def __new__(cls, name: str, args: tuple = ()):
        args = tuple(args)
        key = (name, args)
        got = cls._interned.get(key)
        if got is None:
            got = super().__new__(cls)
            got.name = name
            got.args = args
            got._hash = hash(key)
            cls._interned[key] = got
        return got

    def __eq__(self, other):
        return self is other or (
            type(other) is TyCon and self.name == other.name and self.args == other.args
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"TyCon({self.name!r}, {self.args!r})" if self.args else f"TyCon({self.name!r})"


BOOL = TyCon("bool")
NUM = TyCon("num")
STRING = TyCon("string")


def fun_ty(dom: HolType, cod: HolType) -> HolType:
    return TyCon("fun", (dom, cod))


def list_ty(elem: HolType) -> HolType:
    return TyCon("list", (elem,))


def prod_ty(a: HolType, b: HolType) -> HolType:
    return TyCon("prod", (a, b))


def dest_fun_ty(ty: HolType) -> Optional[tuple[HolType, HolType]]:
    if type(ty) is TyCon and ty.name == "fun":
        return ty.args
    return None


def type_subst(tysub: Mapping[TyVar, HolType], ty: HolType) -> HolType:
    if not tysub:
        return ty
    if type(ty) is TyVar:
        return tysub.get(ty, ty)
    if not ty.args or type_vars_cached(ty).isdisjoint(tysub):
        return ty
    args = tuple(type_subst(tysub, a) for a in ty.args)
    return ty if args == ty.args else TyCon(ty.name, args)


def type_vars(ty: HolType) -> frozenset[TyVar]:
    acc: set[TyVar] = set()
    stack = [ty]
    while stack:
        t = stack.pop()
        if type(t) is TyVar:
            acc.add(t)
        else:
            stack.extend(t.args)
    return frozenset(acc)


_TYPE_VARS_MEMO: dict = {}
_NO_TYVARS: frozenset = frozenset()


def type_vars_cached(ty: HolType) -> frozenset:
    got = _TYPE_VARS_MEMO.get(ty)
    if got is None:
        if type(ty) is TyVar:
            got = frozenset((ty,))
        elif not ty.args:
            got = _NO_TYVARS
        else:
            got = _NO_TYVARS
            for a in ty.args:
                got = got | type_vars_cached(a)
        _TYPE_VARS_MEMO[ty] = got
    return got


def type_has_vars(ty: HolType) -> bool:
    return bool(type_vars_cached(ty))


def type_match(pattern: HolType, ty: HolType, env: Optional[dict] = None) -> Optional[dict]:
    """One sided: a substitution over pattern's TyVars with sigma(pattern) == ty."""
    if env is None:
        env = {}
    if type(pattern) is TyVar:
        bound = env.get(pattern)
        if bound is None:
            env[pattern] = ty
            return env
        return env if bound == ty else None
    if type(ty) is not TyCon or pattern.name != ty.name or len(pattern.args) != len(ty.args):
        return None
    for p, t in zip(pattern.args, ty.args):
        if type_match(p, t, env) is None:
            return None
    return env


def type_str(ty: HolType) -> str:
    if type(ty) is TyVar:
        return ty.name
    if ty.name == "fun":
        return f"({type_str(ty.args[0])} -> {type_str(ty.args[1])})"
    if ty.name == "prod":
        return f"({type_str(ty.args[0])} # {type_str(ty.args[1])})"
    if ty.name == "list":
        return f"({type_str(ty.args[0])}) list"
    if not ty.args:
        return ty.name
    return "(" + ", ".join(type_str(a) for a in ty.args) + ") " + ty.name


# ---------------------------------------------------------------------------
# Terms


class Term:
    """Base class for term nodes; immutable, compared structurally."""

    __slots__ = ("_hash",)
    ty: HolType


class Var(Term):
    __slots__ = ("name", "ty", "_frees")

    def __init__(self, name: str, ty: HolType):
        self.name = name
        self.ty = ty
        self._hash = None
        self._frees = None

    def __eq__(self, other):
        return self is other or (
            type(other) is Var and self.name == other.name and self.ty == other.ty
        )

    def __hash__(self):
        h = self._hash
        if h is None:
            self._hash = h = hash((1, self.name, self.ty))
        return h

    def __repr__(self):
        return f"`{term_str(self)}`"


class Const(Term):
    __slots__ = ("name", "ty")

    def __init__(self, name: str, ty: HolType):
        self.name = name
        self.ty = ty
        self._hash = None

    def __eq__(self, other):
        return self is other or (
            type(other) is Const and self.name == other.name and self.ty == other.ty
        )

    def __hash__(self):
        h = self._hash
        if h is None:
            self._hash = h = hash((2, self.name, self.ty))
        return h

    def __repr__(self):
        return f"`{term_str(self)}`"


class App(Term):
    __slots__ = ("fn", "arg", "ty", "_frees", "_hastv")

    def __init__(self, fn: Term, arg: Term):
        fty = fn.ty
        if type(fty) is not TyCon or fty.name != "fun":
            raise TypeMismatch(f"operator is not a function: {term_str(fn)} : {type_str(fty)}")
        dom, cod = fty.args
        if dom != arg.ty:
            raise TypeMismatch(
                f"operand type {type_str(arg.ty)} does not match domain {type_str(dom)} "
                f"in {term_str(fn)} applied to {term_str(arg)}"
            )
        self.fn = fn
        self.arg = arg
        self.ty = cod
        self._hash = None
        self._frees = None
        self._hastv = None

    def __eq__(self, other):
        if self is other:
            return True
        if type(other) is not App:
            return False
        if self._hash is not None and other._hash is not None and self._hash != other._hash:
            return False
        return self.fn == other.fn and self.arg == other.arg

    def __hash__(self):
        h = self._hash
        if h is None:
            self._hash = h = hash((3, self.fn, self.arg))
        return h

    def __repr__(self):
        return f"`{term_str(self)}`"


class Lam(Term):
    __slots__ = ("bound", "body", "ty", "_frees", "_hastv")

    def __init__(self, bound: Var, body: Term):
        if type(bound) is not Var:
            raise KernelError("lambda binder must be a variable")
        self.bound = bound
        self.body = body
        self.ty = fun_ty(bound.ty, body.ty)
        self._hash = None
        self._frees = None
        self._hastv = None

    def __eq__(self, other):
        if self is other:
            return True
        if type(other) is not Lam:
            return False
        return self.bound == other.bound and self.body == other.body

    def __hash__(self):
        h = self._hash
        if h is None:
            self._hash = h = hash((4, self.bound, self.body))
        return h

    def __repr__(self):
        return f"`{term_str(self)}`"


_NO_FREES: frozenset = frozenset()


def type_of(t: Term) -> HolType:
    return t.ty


def frees(t: Term) -> frozenset:
    """Free variables of t, cached on the node."""
    tt = type(t)
    if tt is Const:
        return _NO_FREES
    if tt is Var:
        f = t._frees
        if f is None:
            t._frees = f = frozenset((t,))
        return f
    f = t._frees
    if f is None:
        if tt is App:
            f = frees(t.fn) | frees(t.arg)
        else:
            f = frees(t.body) - frozenset((t.bound,))
        t._frees = f
    return f


def term_tyvars(t: Term) -> frozenset:
    """All type variables occurring anywhere in the term (cached per node)."""
    tt = type(t)
    if tt is Var or tt is Const:
        return type_vars_cached(t.ty)
    got = t._hastv
    if got is None:
        if tt is App:
            got = term_tyvars(t.fn) | term_tyvars(t.arg)
        else:
            got = type_vars_cached(t.bound.ty) | term_tyvars(t.body)
        t._hastv = got
    return got


def term_has_tyvars(t: Term) -> bool:
    return bool(term_tyvars(t))


def term_type_vars(t: Term) -> frozenset[TyVar]:
    acc: set[TyVar] = set()
    stack = [t]
    while stack:
        x = stack.pop()
        tx = type(x)
        if tx is App:
            stack.append(x.fn)
            stack.append(x.arg)
        elif tx is Lam:
            acc |= type_vars(x.bound.ty)
            stack.append(x.body)
        else:
            acc |= type_vars(x.ty)
    return frozenset(acc)


def term_str(t: Term) -> str:
    """Crude structural rendering used in error messages; the pretty printer
    lives in the syntax module."""
    tt = type(t)
    if tt is Var or tt is Const:
        return t.name
    if tt is App:
        return f"({term_str(t.fn)} {term_str(t.arg)})"
    return f"(\\{t.bound.name}. {term_str(t.body)})"


def alpha_eq(t1: Term, t2: Term) -> bool:
    """Equality up to renaming of bound variables."""

    def go(a: Term, b: Term, benv: list) -> bool:
        ta = type(a)
        if ta is not type(b):
            return False
        if ta is Var:
            for va, vb in reversed(benv):
                if a == va:
                    return b == vb
                if b == vb:
                    return False
            return a == b
        if ta is Const:
            return a == b
        if ta is App:
            return go(a.fn, b.fn, benv) and go(a.arg, b.arg, benv)
        if a.bound.ty != b.bound.ty:
            return False
        benv.append((a.bound, b.bound))
        ok = go(a.body, b.body, benv)
        benv.pop()
        return ok

    if t1 is t2:
        return True
    return go(t1, t2, [])


def variant(v: Var, avoid_names: set) -> Var:
    name = v.name
    while name in avoid_names:
        name += "'"
    return v if name == v.name else Var(name, v.ty)


def _vsubst(theta: Mapping[Var, Term], dom: frozenset, t: Term) -> Term:
    if dom.isdisjoint(frees(t)):
        return t
    tt = type(t)
    if tt is Var:
        return theta.get(t, t)
    if tt is App:
        fn = _vsubst(theta, dom, t.fn)
        arg = _vsubst(theta, dom, t.arg)
        return t if fn is t.fn and arg is t.arg else App(fn, arg)
    # Lam
    v, b = t.bound, t.body
    bfrees = frees(b)
    theta2 = {x: s for x, s in theta.items() if x != v and x in bfrees}
    if not theta2:
        return t
    dom2 = frozenset(theta2)
    if any(v in frees(s) for s in theta2.values()):
        avoid = {x.name for x in bfrees}
        for s in theta2.values():
            avoid.update(x.name for x in frees(s))
        v2 = variant(v, avoid)
        b2 = _vsubst({v: v2}, frozenset((v,)), b)
        return Lam(v2, _vsubst(theta2, dom2, b2))
    return Lam(v, _vsubst(theta2, dom2, b))


def _apply_both(tysub, tydom, tmsub, tmdom, t: Term, tymemo: dict) -> Term:
    """inst_type followed by vsubst, in one traversal.

    Only valid on binder-free subtrees (the common case in searches); a Lam
    node falls back to the sequential route for full capture handling.
    """
    touch_ty = not tydom.isdisjoint(term_tyvars(t))
    touch_tm = not tmdom.isdisjoint(frees(t)) if not touch_ty else True
    if not touch_ty and not touch_tm:
        return t
    tt = type(t)
    if tt is Var:
        if touch_ty:
            nty = tymemo.get(t.ty)
            if nty is None:
                nty = type_subst(tysub, t.ty)
                tymemo[t.ty] = nty
            v = Var(t.name, nty)
        else:
            v = t
        return tmsub.get(v, v)
    if tt is Const:
        if not touch_ty:
            return t
        nty = tymemo.get(t.ty)
        if nty is None:
            nty = type_subst(tysub, t.ty)
            tymemo[t.ty] = nty
        return Const(t.name, nty)
    if tt is App:
        fn = _apply_both(tysub, tydom, tmsub, tmdom, t.fn, tymemo)
        arg = _apply_both(tysub, tydom, tmsub, tmdom, t.arg, tymemo)
        return t if fn is t.fn and arg is t.arg else App(fn, arg)
    # binders: go through the precise two-pass machinery
    t1 = inst_type(tysub, t)
    return _vsubst(tmsub, tmdom, t1)


def vsubst(theta: Mapping[Var, Term], t: Term) -> Term:
    """Capture avoiding substitution of terms for free variables."""
    if not theta:
        return t
    for v, s in theta.items():
        if type(v) is not Var:
            raise KernelError("vsubst domain must contain variables")
        if v.ty != s.ty:
            raise TypeMismatch(
                f"cannot substitute {term_str(s)} : {type_str(s.ty)} "
                f"for {v.name} : {type_str(v.ty)}"
            )
    return _vsubst(theta, frozenset(theta), t)


def inst_type(tysub: Mapping[TyVar, HolType], t: Term) -> Term:
    """Apply a type substitution everywhere in a term, renaming bound
    variables if the instantiation would otherwise merge them with frees."""
    if not tysub:
        return t

    dom = frozenset(tysub)

    def go(x: Term, benv: dict, dirty: bool) -> Term:
        # `dirty` records whether an enclosing binder was renamed; only then
        # is it unsafe to skip a subtree the substitution cannot touch.
        if not dirty and dom.isdisjoint(term_tyvars(x)):
            return x
        tx = type(x)
        if tx is Var:
            mapped = benv.get(x)
            if mapped is not None:
                return mapped
            return Var(x.name, type_subst(tysub, x.ty))
        if tx is Const:
            return Const(x.name, type_subst(tysub, x.ty))
        if tx is App:
            return App(go(x.fn, benv, dirty), go(x.arg, benv, dirty))
        v, b = x.bound, x.body
        v1 = Var(v.name, type_subst(tysub, v.ty))
        clash = any(u.name == v.name and u != v for u in frees(b))
        if clash:
            avoid = {u.name for u in frees(b) if u != v}
            v1 = variant(v1, avoid)
        benv2 = dict(benv)
        benv2[v] = v1
        return Lam(v1, go(b, benv2, dirty or v1.name != v.name))

    return go(t, {}, False)


# ---------------------------------------------------------------------------
# Core constants and term builders

FALSITY = Const("_FALSITY_", BOOL)


def _bin_const(name: str, opty: HolType) -> Const:
    return Const(name, opty)


def mk_eq(a: Term, b: Term) -> Term:
    if a.ty != b.ty:
        raise TypeMismatch(f"equation sides differ: {type_str(a.ty)} vs {type_str(b.ty)}")
    c = Const("=", fun_ty(a.ty, fun_ty(a.ty, BOOL)))
    return App(App(c, a), b)


def _mk_bool_bin(name: str, a: Term, b: Term) -> Term:
    c = Const(name, fun_ty(BOOL, fun_ty(BOOL, BOOL)))
    return App(App(c, a), b)


def mk_conj(a: Term, b: Term) -> Term:
    return _mk_bool_bin("/\\", a, b)


def mk_disj(a: Term, b: Term) -> Term:
    return _mk_bool_bin("\\/", a, b)


def mk_imp(a: Term, b: Term) -> Term:
    return _mk_bool_bin("==>", a, b)


def mk_neg(a: Term) -> Term:
    return App(Const("~", fun_ty(BOOL, BOOL)), a)


def mk_binder(name: str, v: Var, body: Term) -> Term:
    c = Const(name, fun_ty(fun_ty(v.ty, BOOL), BOOL))
    return App(c, Lam(v, body))


def mk_forall(v: Var, body: Term) -> Term:
    return mk_binder("!", v, body)


def mk_query(v: Var, body: Term) -> Term:
    return mk_binder("??", v, body)


def list_mk_forall(vs: Sequence[Var], body: Term) -> Term:
    for v in reversed(vs):
        body = mk_forall(v, body)
    return body


def list_mk_conj(ts: Sequence[Term]) -> Term:
    if not ts:
        raise KernelError("list_mk_conj of nothing")
    acc = ts[-1]
    for t in reversed(ts[:-1]):
        acc = mk_conj(t, acc)
    return acc


def mk_pair(a: Term, b: Term) -> Term:
    c = Const(",", fun_ty(a.ty, fun_ty(b.ty, prod_ty(a.ty, b.ty))))
    return App(App(c, a), b)


def mk_string_lit(s: str) -> Const:
    if '"' in s or "\n" in s:
        raise KernelError("string literals may not contain quotes or newlines")
    return Const('"' + s + '"', STRING)


def dest_string_lit(t: Term) -> Optional[str]:
    if type(t) is Const and t.ty == STRING and len(t.name) >= 2 and t.name[0] == '"':
        return t.name[1:-1]
    return None


# ---------------------------------------------------------------------------
# Destructors.  Wrong shape is a recoverable signal: they return None.


def dest_binary(name: str, t: Term) -> Optional[tuple[Term, Term]]:
    if (
        type(t) is App
        and type(t.fn) is App
        and type(t.fn.fn) is Const
        and t.fn.fn.name == name
    ):
        return t.fn.arg, t.arg
    return None


def dest_eq(t: Term) -> Optional[tuple[Term, Term]]:
    return dest_binary("=", t)


def dest_conj(t: Term) -> Optional[tuple[Term, Term]]:
    return dest_binary("/\\", t)


def dest_imp(t: Term) -> Optional[tuple[Term, Term]]:
    return dest_binary("==>", t)


def dest_neg(t: Term) -> Optional[Term]:
    if type(t) is App and type(t.fn) is Const and t.fn.name == "~":
        return t.arg
    return None


def dest_binder(name: str, t: Term) -> Optional[tuple[Var, Term]]:
    if (
        type(t) is App
        and type(t.fn) is Const
        and t.fn.name == name
        and type(t.arg) is Lam
    ):
        return t.arg.bound, t.arg.body
    return None


def dest_forall(t: Term) -> Optional[tuple[Var, Term]]:
    return dest_binder("!", t)


def dest_query(t: Term) -> Optional[tuple[Var, Term]]:
    """Split one layer of the metavariable binder ``??``."""
    return dest_binder("??", t)


def strip_forall(t: Term) -> tuple[list[Var], Term]:
    vs: list[Var] = []
    while (d := dest_forall(t)) is not None:
        vs.append(d[0])
        t = d[1]
    return vs, t


def strip_query(t: Term) -> tuple[list[Var], Term]:
    vs: list[Var] = []
    while (d := dest_query(t)) is not None:
        vs.append(d[0])
        t = d[1]
    return vs, t


def conjuncts_of(t: Term) -> list[Term]:
    """Flatten a conjunction tree into its leaves (a non conjunction is its
    own single leaf)."""
    d = dest_conj(t)
    if d is None:
        return [t]
    return conjuncts_of(d[0]) + conjuncts_of(d[1])


# ---------------------------------------------------------------------------
# Theorems

_MINT = object()
_trace_enabled = [False]


def record_traces(on: bool) -> None:
    """Globally enable or disable construction traces on new theorems."""
    _trace_enabled[0] = bool(on)


@contextmanager
def tracing():
    prev = _trace_enabled[0]
    _trace_enabled[0] = True
    try:
        yield
    finally:
        _trace_enabled[0] = prev


class Theorem:
    """``hyps |- concl``.  Instances are minted only by the rules below."""

    __slots__ = ("hyps", "concl", "trace")

    def __init__(self, hyps, concl, trace=None, *, _mint=None):
        if _mint is not _MINT:
            raise KernelError("theorems can only be created by kernel rules")
        self.hyps = hyps
        self.concl = concl
        self.trace = trace

    def __repr__(self):
        pre = ", ".join(term_str(h) for h in sorted(self.hyps, key=term_str))
        return f"{pre} |- {term_str(self.concl)}" if pre else f"|- {term_str(self.concl)}"


def _thm(hyps: frozenset, concl: Term, rule: str, args: tuple) -> Theorem:
    tr = (rule, args) if _trace_enabled[0] else None
    return Theorem(hyps, concl, tr, _mint=_MINT)


class Instantiation:
    """A paired type/term substitution; types are applied first.

    Term substitution keys carry their post type-substitution types, so the
    whole thing can be applied in one pass.  Instantiations produced by the
    unifier are idempotent.
    """

    __slots__ = ("tysubst", "tmsubst", "_dom", "_tymemo")

    def __init__(self, tysubst: Optional[dict] = None, tmsubst: Optional[dict] = None):
        self.tysubst = dict(tysubst) if tysubst else {}
        self.tmsubst = dict(tmsubst) if tmsubst else {}
        self._dom = frozenset(self.tmsubst)
        self._tymemo = {}
        for v, s in self.tmsubst.items():
            if v.ty != s.ty:
                raise TypeMismatch(
                    f"instantiation binds {v.name} : {type_str(v.ty)} "
                    f"to a term of type {type_str(s.ty)}"
                )

    @staticmethod
    def _trusted(tysubst: dict, tmsubst: dict) -> "Instantiation":
        # Internal fast path: takes ownership, skips validation.
        i = Instantiation.__new__(Instantiation)
        i.tysubst = tysubst
        i.tmsubst = tmsubst
        i._dom = frozenset(tmsubst)
        i._tymemo = {}
        return i

    def is_empty(self) -> bool:
        return not self.tysubst and not self.tmsubst

    def apply_type(self, ty: HolType) -> HolType:
        return type_subst(self.tysubst, ty)

    def apply_term(self, t: Term) -> Term:
        tysub, tmsub = self.tysubst, self.tmsubst
        if not tysub:
            if not tmsub:
                return t
            return _vsubst(tmsub, self._dom, t)
        if not tmsub:
            return inst_type(tysub, t)
        return _apply_both(tysub, frozenset(tysub), tmsub, self._dom, t, self._tymemo)

    def __eq__(self, other):
        return (
            isinstance(other, Instantiation)
            and self.tysubst == other.tysubst
            and self.tmsubst == other.tmsubst
        )

    def __repr__(self):
        tys = {a.name: type_str(ty) for a, ty in self.tysubst.items()}
        tms = {v.name: term_str(s) for v, s in self.tmsubst.items()}
        return f"Instantiation({tys}, {tms})"


EMPTY_INST = Instantiation()


# ---------------------------------------------------------------------------
# Inference rules


def refl(t: Term) -> Theorem:
    """|- t = t"""
    return _thm(_NO_FREES, mk_eq(t, t), "REFL", (t,))


def inst(i: Instantiation, th: Theorem) -> Theorem:
    """Instantiate hypotheses and conclusion."""
    if i.is_empty():
        return th
    hyps = frozenset(i.apply_term(h) for h in th.hyps)
    return _thm(hyps, i.apply_term(th.concl), "INST", (i, th))


def specl(ts: Sequence[Term], th: Theorem) -> Theorem:
    """Strip universal quantifiers, substituting the given terms."""
    if not ts:
        return th
    concl = th.concl
    for t in ts:
        d = dest_forall(concl)
        if d is None:
            raise KernelError(f"SPECL: not a universal: {term_str(concl)}")
        v, b = d
        if v.ty != t.ty:
            raise TypeMismatch(
                f"SPECL: {term_str(t)} : {type_str(t.ty)} cannot replace "
                f"{v.name} : {type_str(v.ty)}"
            )
        concl = _vsubst({v: t}, frozenset((v,)), b)
    return _thm(th.hyps, concl, "SPECL", (tuple(ts), th))


def mp(imp_th: Theorem, ant: Theorem) -> Theorem:
    """From |- p ==> q and |- p conclude |- q (p matched up to alpha)."""
    d = dest_imp(imp_th.concl)
    if d is None:
        raise KernelError(f"MP: not an implication: {term_str(imp_th.concl)}")
    p, q = d
    if not alpha_eq(p, ant.concl):
        raise KernelError(
            f"MP: antecedent mismatch: {term_str(p)} vs {term_str(ant.concl)}"
        )
    return _thm(imp_th.hyps | ant.hyps, q, "MP", (imp_th, ant))


def conj(a: Theorem, b: Theorem) -> Theorem:
    """|- a /\\ b"""
    return _thm(a.hyps | b.hyps, mk_conj(a.concl, b.concl), "CONJ", (a, b))


def conjuncts(th: Theorem) -> list[Theorem]:
    """Split a (nested) conjunction into one theorem per leaf."""
    parts = conjuncts_of(th.concl)
    if len(parts) == 1:
        return [th]
    return [_thm(th.hyps, p, "CONJUNCT", (th, i)) for i, p in enumerate(parts)]


def beta(t: Term) -> Theorem:
    """|- (\\x. b) a = b[a/x]"""
    if type(t) is not App or type(t.fn) is not Lam:
        raise KernelError(f"BETA: not a redex: {term_str(t)}")
    lam, a = t.fn, t.arg
    reduced = _vsubst({lam.bound: a}, frozenset((lam.bound,)), lam.body)
    return _thm(_NO_FREES, mk_eq(t, reduced), "BETA", (t,))


def string_ne(s1: Term, s2: Term) -> Theorem:
    """|- ~(s1 = s2) for distinct string literals."""
    a, b = dest_string_lit(s1), dest_string_lit(s2)
    if a is None or b is None:
        raise KernelError("STRING_NE expects string literals")
    if a == b:
        raise KernelError(f'STRING_NE: literals are equal: "{a}"')
    return _thm(_NO_FREES, mk_neg(mk_eq(s1, s2)), "STRING_NE", (s1, s2))


def fthm(t: Term) -> Theorem:
    """Debug rule for validity checking: |- t under the marker hypothesis
    ``_FALSITY_``, which poisons anything built from it."""
    if t.ty != BOOL:
        raise KernelError("fthm needs a Boolean term")
    return _thm(frozenset((FALSITY,)), t, "FTHM", (t,))


def replay(th: Theorem, _memo: Optional[dict] = None) -> Theorem:
    """Re-derive a theorem from its construction trace.

    Raises ``KernelError`` when the theorem carries no trace (traces are
    recorded only while ``record_traces(True)`` / ``tracing()`` is active).
    """
    if _memo is None:
        _memo = {}
    got = _memo.get(id(th))
    if got is not None:
        return got
    if th.trace is None:
        raise KernelError("theorem has no construction trace to replay")
    rule, args = th.trace
    if rule == "REFL":
        new = refl(args[0])
    elif rule == "INST":
        new = inst(args[0], replay(args[1], _memo))
    elif rule == "SPECL":
        new = specl(args[0], replay(args[1], _memo))
    elif rule == "MP":
        new = mp(replay(args[0], _memo), replay(args[1], _memo))
    elif rule == "CONJ":
        new = conj(replay(args[0], _memo), replay(args[1], _memo))
    elif rule == "CONJUNCT":
        new = conjuncts(replay(args[0], _memo))[args[1]]
    elif rule == "BETA":
        new = beta(args[0])
    elif rule == "STRING_NE":
        new = string_ne(args[0], args[1])
    elif rule == "FTHM":
        new = fthm(args[0])
    elif rule == "AXIOM":
        sig, name = args
        new = sig.axiom(name)
    else:
        raise KernelError(f"unknown trace rule {rule!r}")
    if not alpha_eq(new.concl, th.concl):
        raise KernelError(f"replay of {rule} diverged: {new!r} vs {th!r}")
    _memo[id(th)] = new
    return new


# ---------------------------------------------------------------------------
# Signatures


class Signature:
    """Declared type constructors, constants, and the axiom registry.

    Axiom registration is append only and serialized by a lock; everything
    else is treated as immutable after theory loading.
    """

    def __init__(self):
        self._tycons: dict[str, int] = {}
        self._consts: dict[str, HolType] = {}
        self._axioms: dict[str, Theorem] = {}
        self._axiom_order: list[str] = []
        self._lock = threading.Lock()

    # -- declarations

    def declare_tycon(self, name: str, arity: int) -> None:
        if name in self._tycons:
            raise KernelError(f"type constructor {name!r} already declared")
        self._tycons[name] = arity

    def declare_const(self, name: str, ty: HolType) -> None:
        if name in self._consts:
            raise KernelError(f"constant {name!r} already declared")
        self._check_type(ty)
        self._consts[name] = ty

    def tycon_arity(self, name: str) -> Optional[int]:
        return self._tycons.get(name)

    def const_gen_ty(self, name: str) -> Optional[HolType]:
        return self._consts.get(name)

    def has_const(self, name: str) -> bool:
        return name in self._consts

    @property
    def constants(self) -> Mapping[str, HolType]:
        return dict(self._consts)

    @property
    def tycons(self) -> Mapping[str, int]:
        return dict(self._tycons)

    # -- axioms

    def new_axiom(self, name: str, t: Term) -> Theorem:
        """Register ``|- t`` under a fresh name.

        The term must be closed, Boolean, and well typed against this
        signature.  The registry is the trust base certificates refer to.
        """
        with self._lock:
            if name in self._axioms:
                raise KernelError(f"axiom {name!r} already registered")
            if t.ty != BOOL:
                raise KernelError(f"axiom {name!r} is not Boolean")
            if frees(t):
                names = ", ".join(sorted(v.name for v in frees(t)))
                raise KernelError(f"axiom {name!r} has free variables: {names}")
            self.check_term(t)
            # axioms always carry their trace: replay bottoms out here
            th = Theorem(_NO_FREES, t, ("AXIOM", (self, name)), _mint=_MINT)
            self._axioms[name] = th
            self._axiom_order.append(name)
            return th

    def axiom(self, name: str) -> Theorem:
        th = self._axioms.get(name)
        if th is None:
            raise KernelError(f"unknown axiom {name!r}")
        return th

    def axiom_names(self) -> list[str]:
        return list(self._axiom_order)

    # -- validation

    def _check_type(self, ty: HolType) -> None:
        if type(ty) is TyVar:
            return
        arity = self._tycons.get(ty.name)
        if arity is None:
            raise KernelError(f"unknown type constructor {ty.name!r}")
        if arity != len(ty.args):
            raise KernelError(
                f"type constructor {ty.name!r} expects {arity} arguments, got {len(ty.args)}"
            )
        for a in ty.args:
            self._check_type(a)

    def check_term(self, t: Term) -> None:
        """Verify every constant instance and type in t against this signature."""
        tt = type(t)
        if tt is Const:
            if dest_string_lit(t) is not None:
                return
            gen = self._consts.get(t.name)
            if gen is None:
                raise KernelError(f"unknown constant {t.name!r}")
            self._check_type(t.ty)
            if type_match(gen, t.ty) is None:
                raise KernelError(
                    f"constant {t.name!r} used at {type_str(t.ty)}, which is not an "
                    f"instance of {type_str(gen)}"
                )
        elif tt is Var:
            self._check_type(t.ty)
        elif tt is App:
            self.check_term(t.fn)
            self.check_term(t.arg)
        else:
            self.check_term(t.bound)
            self.check_term(t.body)

    def clone(self) -> "Signature":
        sig = Signature()
        sig._tycons = dict(self._tycons)
        sig._consts = dict(self._consts)
        sig._axioms = dict(self._axioms)
        sig._axiom_order = list(self._axiom_order)
        return sig

    @staticmethod
    def standard() -> "Signature":
        """The logical base: connectives, binders, pairs, lists, numerals."""
        sig = Signature()
        for name, arity in (
            ("bool", 0), ("fun", 2), ("prod", 2), ("num", 0), ("string", 0), ("list", 1)
        ):
            sig.declare_tycon(name, arity)
        A, B = TyVar("A"), TyVar("B")
        bb = fun_ty(BOOL, fun_ty(BOOL, BOOL))
        nn = fun_ty(NUM, NUM)
        nnb = fun_ty(NUM, fun_ty(NUM, BOOL))
        for name, ty in (
            ("=", fun_ty(A, fun_ty(A, BOOL))),
            ("/\\", bb),
            ("\\/", bb),
            ("==>", bb),
            ("~", fun_ty(BOOL, BOOL)),
            ("!", fun_ty(fun_ty(A, BOOL), BOOL)),
            ("?", fun_ty(fun_ty(A, BOOL), BOOL)),
            ("??", fun_ty(fun_ty(A, BOOL), BOOL)),
            (",", fun_ty(A, fun_ty(B, prod_ty(A, B)))),
            ("NIL", list_ty(A)),
            ("CONS", fun_ty(A, fun_ty(list_ty(A), list_ty(A)))),
            ("NUMERAL", nn),
            ("_0", NUM),
            ("BIT0", nn),
            ("BIT1", nn),
            ("SUC", nn),
            ("+", fun_ty(NUM, fun_ty(NUM, NUM))),
            ("<", nnb),
            ("<=", nnb),
            (">", nnb),
            (">=", nnb),
            ("_FALSITY_", BOOL),
        ):
            sig.declare_const(name, ty)
        return sig
