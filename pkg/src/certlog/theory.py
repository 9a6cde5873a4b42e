"""Theories and the runtime solver DSL.

A theory bundles signature extensions (type constructors, constants), named
axioms, and named solver definitions.  Theories come from ``.thy`` files:
UTF-8, line oriented, ``#`` comments, with indented continuation lines:

    import lists
    tycon sexp 0
    const Symbol : string -> sexp
    axiom EVAL_QUOTED : !e q. EVAL e (List [Symbol "quote"; q]) q
    instance NUM_APPEND_HORN = APPEND_HORN [A = num]
    solver APPEND_SLV = repeat(concat(accept(APPEND_NIL), rule(APPEND_CONS)))
    rec solver EVAL_SLV = concat(all, then(STEP_SLV, EVAL_SLV))

``instance`` derives a theorem by instantiating an existing one's type
variables; it extends the named theorems, not the axiom registry.

The solver DSL is the combinator vocabulary: ``accept(THM)``, ``rule(THM)``,
``conj``, ``splitconj``, ``refl``, ``all``, ``no``, ``relassoc``,
``concat(e, e)``, ``then(e, e)``, ``repeat(e)``, ``valid(e)``,
``collect([e, ...])``, ``every([e, ...])``, ``interleave([e, ...])``,
``prolog([THM, ...])``, plus references to named solvers.  References are
resolved at application time, so recursive definitions stay suspended.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from . import kernel, solver, syntax
from .kernel import Signature, Term, Theorem
from .solver import Solver
from .syntax import ParseError, Token, tokenize


class TheoryError(Exception):
    pass


# ---------------------------------------------------------------------------
# Solver expressions


@dataclass(frozen=True)
class SolverExpr:
    pos: int


@dataclass(frozen=True)
class SName(SolverExpr):
    name: str


@dataclass(frozen=True)
class SCall(SolverExpr):
    name: str
    args: tuple


@dataclass(frozen=True)
class SList(SolverExpr):
    items: tuple


_NULLARY = {"conj", "splitconj", "refl", "all", "no", "relassoc"}
_COMBINATORS = {
    "accept": 1,
    "rule": 1,
    "concat": 2,
    "then": 2,
    "repeat": 1,
    "valid": 1,
    "collect": 1,
    "every": 1,
    "interleave": 1,
    "prolog": 1,
}


class _DslParser:
    def __init__(self, src: str):
        self.src = src
        self.toks = tokenize(src)
        self.i = 0

    def peek(self) -> Token:
        return self.toks[self.i]

    def next(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def at(self, text: str) -> bool:
        t = self.peek()
        if t.kind == "punct" and t.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str):
        t = self.next()
        if t.kind != "punct" or t.text != text:
            raise ParseError(f"expected {text!r} in solver expression", t.pos, self.src)

    def expr(self) -> SolverExpr:
        t = self.next()
        if t.kind == "punct" and t.text == "[":
            items = []
            if not self.at("]"):
                items.append(self.expr())
                while self.at(","):
                    items.append(self.expr())
                self.expect("]")
            return SList(t.pos, tuple(items))
        if t.kind != "ident":
            raise ParseError(
                f"expected a solver name, found {t.text or 'end of input'!r}", t.pos, self.src
            )
        if self.at("("):
            args = []
            if not self.at(")"):
                args.append(self.expr())
                while self.at(","):
                    args.append(self.expr())
                self.expect(")")
            return SCall(t.pos, t.text, tuple(args))
        return SName(t.pos, t.text)

    def parse(self) -> SolverExpr:
        e = self.expr()
        t = self.peek()
        if t.kind != "eof":
            raise ParseError(f"unexpected {t.text!r} after solver expression", t.pos, self.src)
        return e


def parse_solver(src: str) -> SolverExpr:
    return _DslParser(src).parse()


def eval_solver(expr: SolverExpr, theory: "Theory") -> Solver:
    """Compile a solver expression against a theory.

    Named references are looked up when the solver is applied, which is what
    makes ``rec`` definitions productive.
    """
    if isinstance(expr, SList):
        raise TheoryError("a solver list is only valid as a combinator argument")
    if isinstance(expr, SName):
        name = expr.name
        if name in _NULLARY:
            return _nullary(name, theory)
        if name in _COMBINATORS:
            raise TheoryError(f"{name} expects arguments")
        theory.check_solver_name(name)

        def late(goal, _name=name):
            return theory.solver(_name)(goal)

        late.__name__ = name
        return late
    # SCall
    name, args = expr.name, expr.args
    if name in _NULLARY:
        raise TheoryError(f"{name} takes no arguments")
    arity = _COMBINATORS.get(name)
    if arity is None:
        raise TheoryError(f"unknown solver combinator {name!r}")
    if len(args) != arity:
        raise TheoryError(f"{name} expects {arity} argument(s), got {len(args)}")
    if name == "accept":
        return solver.accept(_thm_arg(args[0], theory))
    if name == "rule":
        return solver.rule(_thm_arg(args[0], theory))
    if name == "prolog":
        return solver.prolog([_thm_arg(a, theory) for a in _list_arg(args[0])])
    if name == "concat":
        return solver.concat(eval_solver(args[0], theory), eval_solver(args[1], theory))
    if name == "then":
        return solver.then(eval_solver(args[0], theory), eval_solver(args[1], theory))
    if name == "repeat":
        return solver.repeat(eval_solver(args[0], theory))
    if name == "valid":
        return solver.valid(eval_solver(args[0], theory), name=_describe(args[0]))
    subs = [eval_solver(a, theory) for a in _list_arg(args[0])]
    if name == "collect":
        return solver.collect(subs)
    if name == "every":
        return solver.every(subs)
    return solver.interleave(subs)


def _describe(expr: SolverExpr) -> str:
    if isinstance(expr, SName):
        return expr.name
    if isinstance(expr, SCall):
        return f"{expr.name}(...)"
    return "[...]"


def _nullary(name: str, theory: "Theory") -> Solver:
    if name == "conj":
        return solver.conj
    if name == "splitconj":
        return solver.split_conj
    if name == "refl":
        return solver.refl
    if name == "all":
        return solver.succeed
    if name == "no":
        return solver.fail
    # relassoc: needs the lookup clauses from the active theory
    head = theory.theorem("RELASSOC_HEAD")
    tail = theory.theorem("RELASSOC_TAIL")
    return solver.relassoc_with(head, tail)


def _thm_arg(expr: SolverExpr, theory: "Theory") -> Theorem:
    if not isinstance(expr, SName):
        raise TheoryError("expected a theorem name")
    return theory.theorem(expr.name)


def _list_arg(expr: SolverExpr) -> tuple:
    if not isinstance(expr, SList):
        raise TheoryError("expected a [ ... ] list argument")
    return expr.items


# ---------------------------------------------------------------------------
# Theories


@dataclass
class Theory:
    """A signature plus named theorems and solver definitions."""

    name: str
    sig: Signature
    theorems: dict = field(default_factory=dict)
    solver_defs: dict = field(default_factory=dict)
    imports: tuple = ()
    decls: list = field(default_factory=list)
    _compiled: dict = field(default_factory=dict)

    # -- lookups

    def theorem(self, name: str) -> Theorem:
        th = self.theorems.get(name)
        if th is None:
            raise TheoryError(f"unknown theorem {name!r} in theory {self.name!r}")
        return th

    def check_solver_name(self, name: str) -> None:
        if name not in self.solver_defs:
            raise TheoryError(f"unknown solver {name!r} in theory {self.name!r}")

    def solver(self, name: str) -> Solver:
        got = self._compiled.get(name)
        if got is None:
            expr = self.solver_defs.get(name)
            if expr is None:
                raise TheoryError(f"unknown solver {name!r} in theory {self.name!r}")
            got = eval_solver(expr, self)
            self._compiled[name] = got
        return got

    def solver_names(self) -> list[str]:
        return sorted(self.solver_defs)

    def theorem_names(self) -> list[str]:
        return list(self.theorems)

    # -- parsing conveniences

    def parse_term(self, src: str) -> Term:
        return syntax.parse_term(src, self.sig)

    def parse_query(self, src: str):
        return syntax.parse_query(src, self.sig)

    def parse_solver_text(self, src: str) -> Solver:
        return eval_solver(parse_solver(src), self)

    # -- construction

    def _declare_tycon(self, name: str, arity: int) -> None:
        self.sig.declare_tycon(name, arity)
        self.decls.append(("tycon", name, arity))

    def _declare_const(self, name: str, ty) -> None:
        self.sig.declare_const(name, ty)
        self.decls.append(("const", name, ty))

    def _add_axiom(self, name: str, t: Term) -> Theorem:
        if name in self.theorems:
            raise TheoryError(f"duplicate theorem name {name!r}")
        th = self.sig.new_axiom(name, t)
        self.theorems[name] = th
        self.decls.append(("axiom", name, t))
        return th

    def add_theorem(self, name: str, th: Theorem) -> None:
        """Attach an already-derived theorem under a name (not an axiom)."""
        if name in self.theorems:
            raise TheoryError(f"duplicate theorem name {name!r}")
        self.theorems[name] = th

    def _add_solver(self, name: str, expr: SolverExpr) -> None:
        if name in self.solver_defs:
            raise TheoryError(f"duplicate solver name {name!r}")
        self.solver_defs[name] = expr
        self.decls.append(("solver", name, expr))

    def _add_instance(self, name: str, src_name: str, tysubst: dict) -> None:
        src = self.theorem(src_name)
        th = kernel.inst(kernel.Instantiation(tysubst, {}), src)
        self.add_theorem(name, th)
        self.decls.append(("instance", name, src_name, tysubst))


def base_theory() -> Theory:
    """The logical base every theory file builds on."""
    return Theory(name="base", sig=Signature.standard())


def _apply_import(dst: Theory, src_theory: Theory, seen: set) -> None:
    if src_theory.name in seen:
        return
    seen.add(src_theory.name)
    for decl in src_theory.decls:
        kind = decl[0]
        if kind == "import":
            _apply_import(dst, decl[2], seen)
            continue
        if kind == "tycon":
            dst.sig.declare_tycon(decl[1], decl[2])
        elif kind == "const":
            dst.sig.declare_const(decl[1], decl[2])
        elif kind == "axiom":
            dst.theorems[decl[1]] = dst.sig.new_axiom(decl[1], decl[2])
        elif kind == "instance":
            src = dst.theorems[decl[2]]
            dst.theorems[decl[1]] = kernel.inst(kernel.Instantiation(decl[3], {}), src)
        elif kind == "solver":
            dst.solver_defs[decl[1]] = decl[2]


def merge_theories(name: str, theories: Sequence[Theory]) -> Theory:
    """A fresh context replaying the declarations of the given theories (in
    order, transitively deduplicated by theory name)."""
    out = base_theory()
    out.name = name
    seen: set[str] = set()
    for th in theories:
        _apply_import(out, th, seen)
    return out


# ---------------------------------------------------------------------------
# Theory files


def _logical_lines(src: str) -> list[tuple[int, str]]:
    """Join indented continuation lines; yields (offset, text) pairs."""
    out: list[tuple[int, str]] = []
    offset = 0
    for raw in src.splitlines(keepends=True):
        line = raw.rstrip("\n")
        pos = offset
        offset += len(raw)
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if line[0].isspace() and out:
            prev_pos, prev = out[-1]
            out[-1] = (prev_pos, prev + " " + line.strip())
        else:
            out.append((pos, line.strip()))
    return out


def parse_theory(
    src: str,
    name: str = "theory",
    resolve_import: Optional[Callable[[str], Theory]] = None,
) -> Theory:
    """Parse a ``.thy`` file into a fresh theory over the logical base."""
    th = base_theory()
    th.name = name
    imported: set[str] = set()
    for pos, line in _logical_lines(src):
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            if head == "import":
                if resolve_import is None:
                    raise TheoryError(f"imports are not available here: {rest!r}")
                dep = resolve_import(rest)
                _apply_import(th, dep, imported)
                th.decls.append(("import", rest, dep))
                th.imports = th.imports + (rest,)
            elif head == "tycon":
                tyname, _, arity = rest.rpartition(" ")
                if not tyname or not arity.isdigit():
                    raise TheoryError("tycon needs a name and an arity")
                th._declare_tycon(tyname.strip(), int(arity))
            elif head == "const":
                cname, sep, tytext = rest.partition(":")
                if not sep:
                    raise TheoryError("const needs `name : type`")
                th._declare_const(cname.strip(), syntax.parse_type(tytext.strip(), th.sig))
            elif head == "axiom":
                aname, sep, ttext = rest.partition(":")
                if not sep:
                    raise TheoryError("axiom needs `NAME : term`")
                term = syntax.parse_term(ttext.strip(), th.sig)
                th._add_axiom(aname.strip(), term)
            elif head == "instance":
                th._add_instance(*_instance_def(rest, th))
            elif head == "solver":
                th._add_solver(*_solver_def(rest))
            elif head == "rec":
                sub, _, rest2 = rest.partition(" ")
                if sub != "solver":
                    raise TheoryError(f"unknown directive {head + ' ' + sub!r}")
                th._add_solver(*_solver_def(rest2))
            else:
                raise TheoryError(f"unknown directive {head!r}")
        except (kernel.KernelError, ParseError, TheoryError) as e:
            raise TheoryError(f"{name}.thy, offset {pos}: {e}") from e
    return th


def _instance_def(rest: str, th: Theory) -> tuple[str, str, dict]:
    name, sep, spec = rest.partition("=")
    if not sep:
        raise TheoryError("instance needs `NAME = SOURCE [TyVar = type, ...]`")
    spec = spec.strip()
    src_name, _, bracket = spec.partition("[")
    if not bracket.endswith("]"):
        raise TheoryError("instance needs a [TyVar = type, ...] assignment")
    tysubst = {}
    for pair in bracket[:-1].split(","):
        tv, sep2, tytext = pair.partition("=")
        if not sep2:
            raise TheoryError("bad type assignment in instance")
        tysubst[kernel.TyVar(tv.strip())] = syntax.parse_type(tytext.strip(), th.sig)
    return name.strip(), src_name.strip(), tysubst


def _solver_def(rest: str) -> tuple[str, SolverExpr]:
    sname, sep, body = rest.partition("=")
    if not sep:
        raise TheoryError("solver needs `NAME = expression`")
    return sname.strip(), parse_solver(body.strip())
