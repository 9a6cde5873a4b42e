"""First-order unification and matching over kernel terms.

Unification is syntactic with an occurs check.  A type substitution is
threaded alongside the term bindings so polymorphic clauses
(``APPEND : A list -> A list -> A list``) unify against monomorphic goals:
binding a variable first unifies its type, which may refine type variables
on either side.  Returned substitutions are idempotent.

Terms under binders are opaque: two lambdas unify only when they are alpha
equal after the current substitution is applied, and no variable is ever
bound inside a binder's scope.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from . import kernel
from .kernel import (
    App,
    Const,
    HolType,
    Instantiation,
    Lam,
    Term,
    Theorem,
    TyCon,
    TyVar,
    Var,
    dest_forall,
    dest_imp,
    type_subst,
)

_FRESH_RE = re.compile(r"_\d+$")


def is_fresh_name(name: str) -> bool:
    return _FRESH_RE.fullmatch(name) is not None


class FreshSource:
    """Monotone counter handing out ``_N`` names.

    The ``_N`` namespace is reserved: the parser refuses it for user
    variables, so generated names never collide with user identifiers.
    Backed by itertools.count, whose increment is atomic.
    """

    def __init__(self, start: int = 0):
        self._counter = itertools.count(start)

    def fresh_name(self) -> str:
        return f"_{next(self._counter)}"

    def fresh_var(self, ty: HolType) -> Var:
        return Var(self.fresh_name(), ty)

    def fresh_tyvar(self) -> TyVar:
        return TyVar(self.fresh_name())


GLOBAL_FRESH = FreshSource()


@dataclass(frozen=True)
class Subst:
    """An idempotent substitution restricted to the given unifiable set."""

    inst: Instantiation
    unifiables: frozenset

    def apply(self, t: Term) -> Term:
        return self.inst.apply_term(t)

    @property
    def tmsubst(self):
        return self.inst.tmsubst

    @property
    def tysubst(self):
        return self.inst.tysubst


def occurs_in(v: Var, t: Term) -> bool:
    """Whether v occurs free in t."""
    return v in kernel.frees(t)


class _UState:
    """Triangular bindings (by variable name) plus a type environment."""

    __slots__ = ("uni", "tyenv", "tmenv", "tmty", "one_sided", "_tyres", "_resmemo")

    def __init__(self, uni_names: set, one_sided: bool = False):
        self.uni = uni_names
        self.tyenv: dict[str, HolType] = {}
        self.tmenv: dict[str, Term] = {}
        self.tmty: dict[str, HolType] = {}
        self.one_sided = one_sided
        self._tyres: dict = {}
        self._resmemo: dict = {}

    # -- types

    def ty_walk(self, ty: HolType) -> HolType:
        while type(ty) is TyVar:
            nxt = self.tyenv.get(ty.name)
            if nxt is None:
                return ty
            ty = nxt
        return ty

    def _ty_occurs(self, name: str, ty: HolType) -> bool:
        ty = self.ty_walk(ty)
        if type(ty) is TyVar:
            return ty.name == name
        return any(self._ty_occurs(name, a) for a in ty.args)

    def unify_types(self, a: HolType, b: HolType) -> bool:
        if a is b:
            return True
        a, b = self.ty_walk(a), self.ty_walk(b)
        if a is b or a == b:
            return True
        if type(a) is TyVar:
            if (type(b) is TyVar or kernel.type_has_vars(b)) and self._ty_occurs(a.name, b):
                return False
            self.tyenv[a.name] = b
            if self._tyres:
                self._tyres.clear()
            if self._resmemo:
                self._resmemo.clear()
            return True
        if type(b) is TyVar:
            if (type(a) is TyVar or kernel.type_has_vars(a)) and self._ty_occurs(b.name, a):
                return False
            self.tyenv[b.name] = a
            if self._tyres:
                self._tyres.clear()
            if self._resmemo:
                self._resmemo.clear()
            return True
        if a.name != b.name or len(a.args) != len(b.args):
            return False
        return all(self.unify_types(x, y) for x, y in zip(a.args, b.args))

    # -- terms

    def walk(self, t: Term) -> Term:
        while type(t) is Var:
            nxt = self.tmenv.get(t.name)
            if nxt is None:
                return t
            t = nxt
        return t

    def occurs(self, name: str, t: Term, shadow: frozenset = frozenset()) -> bool:
        tt = type(t)
        if tt is Var:
            if t.name in shadow:
                return False
            w = self.tmenv.get(t.name)
            if w is not None:
                return self.occurs(name, w, shadow)
            return t.name == name
        if tt is Const:
            return False
        if tt is App:
            return self.occurs(name, t.fn, shadow) or self.occurs(name, t.arg, shadow)
        return self.occurs(name, t.body, shadow | {t.bound.name})

    def resolve(self, t: Term, shadow: frozenset = frozenset()) -> Term:
        """Substitute term bindings and the type environment all the way
        through, producing a fully resolved (well-typed) term."""
        tt = type(t)
        if tt is Var:
            if t.name not in shadow:
                w = self.tmenv.get(t.name)
                if w is not None:
                    return self.resolve(w, shadow)
            return Var(t.name, self._ty_resolve(t.ty))
        if tt is Const:
            return Const(t.name, self._ty_resolve(t.ty))
        if tt is App:
            if not shadow:
                # solution extraction revisits shared structure; memoize
                got = self._resmemo.get(id(t))
                if got is not None:
                    return got
                r = App(self.resolve(t.fn), self.resolve(t.arg))
                self._resmemo[id(t)] = r
                return r
            return App(self.resolve(t.fn, shadow), self.resolve(t.arg, shadow))
        bound = Var(t.bound.name, self._ty_resolve(t.bound.ty))
        return Lam(bound, self.resolve(t.body, shadow | {t.bound.name}))

    def bind(self, v: Var, t: Term) -> bool:
        if type(t) is Var and t.name == v.name:
            return self.unify_types(v.ty, t.ty)
        if not self.unify_types(v.ty, t.ty):
            return False
        if self.occurs(v.name, t):
            return False
        self.tmenv[v.name] = t
        self.tmty.setdefault(v.name, v.ty)
        if self._resmemo:
            self._resmemo.clear()
        return True

    def unify_terms(self, a: Term, b: Term) -> bool:
        a, b = self.walk(a), self.walk(b)
        ta, tb = type(a), type(b)
        if ta is Var and a.name in self.uni:
            return self.bind(a, b)
        if tb is Var and b.name in self.uni and not self.one_sided:
            return self.bind(b, a)
        if ta is not tb:
            return False
        if ta is Var:
            return a.name == b.name and self.unify_types(a.ty, b.ty)
        if ta is Const:
            return a.name == b.name and self.unify_types(a.ty, b.ty)
        if ta is App:
            return self.unify_terms(a.fn, b.fn) and self.unify_terms(a.arg, b.arg)
        # lambdas: opaque up to alpha once fully resolved
        if not self.unify_types(a.bound.ty, b.bound.ty):
            return False
        ra = self._full(a)
        rb = self._full(b)
        return kernel.alpha_eq(ra, rb)

    def _full(self, t: Term) -> Term:
        return self.resolve(t)

    # -- solving

    def _ty_resolve(self, ty: HolType) -> HolType:
        # Memoized per unification: resolve is called once per term node.
        got = self._tyres.get(ty)
        if got is not None:
            return got
        r = self.ty_walk(ty)
        if type(r) is TyCon and r.args:
            r = TyCon(r.name, tuple(self._ty_resolve(a) for a in r.args))
        self._tyres[ty] = r
        return r

    def _final_tysubst(self) -> dict:
        out = {}
        for a in self.tyenv:
            tv = TyVar(a)
            r = self._ty_resolve(tv)
            if r != tv:
                out[tv] = r
        return out

    def solution(self, unifiables: Iterable[Var]) -> Subst:
        tysub = self._final_tysubst()
        tmsub: dict[Var, Term] = {}
        for name in self.tmenv:
            t = self.resolve(Var(name, self.tmty[name]))
            key = Var(name, self._ty_resolve(self.tmty[name]))
            if key != t:
                tmsub[key] = t
        return Subst(Instantiation._trusted(tysub, tmsub), frozenset(unifiables))


def unify(
    t1: Term, t2: Term, unifiables: Iterable[Var], names: Optional[set] = None
) -> Optional[Subst]:
    """Most general unifier of t1 and t2 binding only the given variables.

    Returns None on clash or occurs-check failure.  The traversal is
    deterministic (left to right, depth first) so the binding chosen among
    symmetric unifiers is reproducible.
    """
    st = _UState(names if names is not None else {v.name for v in unifiables})
    if not st.unify_terms(t1, t2):
        return None
    return st.solution(frozenset(unifiables))


def match_pat(pattern: Term, t: Term, unifiables: Iterable[Var]) -> Optional[Subst]:
    """One sided unification: bindings only on the pattern side, t unchanged."""
    unifiables = frozenset(unifiables)
    st = _UState({v.name for v in unifiables}, one_sided=True)
    if not st.unify_terms(pattern, t):
        return None
    sub = st.solution(unifiables)
    if sub.apply(t) != t:
        return None
    return sub


def compose(outer: Instantiation, inner: Instantiation) -> Instantiation:
    """The substitution applying ``inner`` first, then ``outer``.

    ``apply(compose(o, i), t) == apply(o, apply(i, t))`` for all t.
    """
    if inner.is_empty():
        return outer
    if outer.is_empty():
        return inner
    tysub: dict = {}
    for a, ty in inner.tysubst.items():
        ty2 = type_subst(outer.tysubst, ty)
        if ty2 != a:
            tysub[a] = ty2
    for a, ty in outer.tysubst.items():
        if a not in inner.tysubst:
            tysub[a] = ty
    inner_names = {v.name for v in inner.tmsubst}
    tmsub: dict = {}
    for v, s in inner.tmsubst.items():
        v2 = Var(v.name, type_subst(outer.tysubst, v.ty))
        s2 = outer.apply_term(s)
        if v2 != s2:
            tmsub[v2] = s2
    for v, s in outer.tmsubst.items():
        if v.name not in inner_names:
            tmsub[v] = s
    return Instantiation._trusted(tysub, tmsub)


_template_cache: dict[int, tuple] = {}


def _theorem_template(th: Theorem) -> tuple:
    """(theorem, sorted tyvars, outer binder vars, unstripped body), cached
    per theorem object."""
    info = _template_cache.get(id(th))
    if info is not None and info[0] is th:
        return info
    tvs = sorted(kernel.term_type_vars(th.concl), key=lambda tv: tv.name)
    binders: list[Var] = []
    body = th.concl
    while (d := dest_forall(body)) is not None:
        binders.append(d[0])
        body = d[1]
    info = (th, tuple(tvs), tuple(binders), body)
    _template_cache[id(th)] = info
    return info


def _refresh_term(t: Term, varmap: dict, tyfn, shadow: frozenset) -> Term:
    """One-pass renaming of free variables (by name) and types."""
    tt = type(t)
    if tt is Var:
        if t.name not in shadow:
            got = varmap.get(t.name)
            if got is not None:
                return got
        nty = tyfn(t.ty)
        return t if nty is t.ty else Var(t.name, nty)
    if tt is Const:
        nty = tyfn(t.ty)
        return t if nty is t.ty else Const(t.name, nty)
    if tt is App:
        fn = _refresh_term(t.fn, varmap, tyfn, shadow)
        arg = _refresh_term(t.arg, varmap, tyfn, shadow)
        return t if fn is t.fn and arg is t.arg else App(fn, arg)
    nty = tyfn(t.bound.ty)
    bound = t.bound if nty is t.bound.ty else Var(t.bound.name, nty)
    body = _refresh_term(t.body, varmap, tyfn, shadow | {t.bound.name})
    return t if bound is t.bound and body is t.body else Lam(bound, body)


def _make_refresher(th: Theorem, src: FreshSource):
    """Fresh maps for one clause application: (fresh vars, refresh fn,
    specialize fn)."""
    _, tvs, binders, _ = _theorem_template(th)
    tymap = {tv: src.fresh_tyvar() for tv in tvs}
    tycache: dict = {}

    def tyfn(ty):
        if not kernel.type_vars_cached(ty):
            return ty
        got = tycache.get(ty)
        if got is None:
            got = type_subst(tymap, ty)
            tycache[ty] = got
        return got

    fresh: list[Var] = []
    varmap: dict = {}
    for v in binders:
        f = Var(src.fresh_name(), tyfn(v.ty))
        fresh.append(f)
        varmap[v.name] = f

    def refresh(t: Term) -> Term:
        return _refresh_term(t, varmap, tyfn, frozenset())

    def specialize() -> Theorem:
        th1 = kernel.inst(Instantiation(tymap, {}), th) if tymap else th
        return kernel.specl(fresh, th1)

    return fresh, refresh, specialize


def freshen_theorem(
    th: Theorem, src: Optional[FreshSource] = None
) -> tuple[list[Var], Term, Callable[[], Theorem]]:
    """Rename a theorem's type variables and outer universals apart.

    Returns ``(fresh_vars, body, specialize)`` where ``body`` is the
    conclusion with the universal prefix stripped and ``specialize`` mints
    the matching kernel theorem ``|- body`` on demand (so failed unification
    attempts never pay for theorem construction).
    """
    src = src or GLOBAL_FRESH
    _, _, _, body0 = _theorem_template(th)
    fresh, refresh, specialize = _make_refresher(th, src)
    return fresh, refresh(body0), specialize


def instantiate_rule(
    th: Theorem, src: Optional[FreshSource] = None
) -> tuple[list[Var], Optional[Term], Term]:
    """Freshen a clause: universals stripped with fresh variables, and the
    body split into (antecedent, conclusion).  Facts have no antecedent."""
    fresh, body, _ = freshen_theorem(th, src)
    d = dest_imp(body)
    if d is not None:
        return fresh, d[0], d[1]
    return fresh, None, body
