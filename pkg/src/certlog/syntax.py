"""Concrete syntax: tokenizer, term/type parser with inference, printer.

The grammar mirrors familiar HOL notation so clause sets transcribe
directly: application by juxtaposition, infix ``= /\\ \\/ ==> :: <= < >= >
+``, prefix ``~``, binders ``! ? ?? \\``, list sugar ``[a; b]``, pairs
``(a, b)``, decimal numerals over the binary ``NUMERAL/BIT0/BIT1/_0``
encoding, string literals, and S-expression quotation ``'(...)``.

Type inference is unification based over the signature's rank-1 polymorphic
constants; type variables left over after inference are generalized to
``A``, ``B``, ... in order of first occurrence.  Annotations are accepted on
parenthesized terms (``(x : num list)``) and binder variables
(``!x:num xs. ...``).
"""

from __future__ import annotations

import string as _string
from dataclasses import dataclass
from typing import Iterator, Optional

from . import kernel
from .kernel import (
    App,
    BOOL,
    Const,
    HolType,
    Lam,
    NUM,
    STRING,
    Signature,
    Term,
    Theorem,
    TyCon,
    TyVar,
    Var,
    dest_binary,
    dest_binder,
    dest_neg,
    dest_string_lit,
    fun_ty,
    mk_string_lit,
    prod_ty,
    strip_query,
)
from .unify import is_fresh_name


class ParseError(Exception):
    def __init__(self, msg: str, pos: int, src: Optional[str] = None):
        self.position = pos
        where = f"offset {pos}"
        if src is not None:
            line = src.count("\n", 0, pos) + 1
            col = pos - (src.rfind("\n", 0, pos) + 1) + 1
            where = f"line {line}, column {col}"
        super().__init__(f"{msg} (at {where})")


# ---------------------------------------------------------------------------
# Tokenizer


@dataclass(frozen=True)
class Token:
    kind: str  # ident | num | str | punct | eof
    text: str
    pos: int


_MULTI_PUNCT = ("??", "==>", "/\\", "\\/", "::", "<=", ">=", "->", "'(")
_SINGLE_PUNCT = set("()[];,.:=<>+~!?\\#")


def tokenize(src: str) -> list[Token]:
    out: list[Token] = []
    i, n = 0, len(src)
    while i < n:
        c = src[i]
        if c.isspace():
            i += 1
            continue
        if c == '"':
            j = src.find('"', i + 1)
            if j < 0 or "\n" in src[i + 1 : j]:
                raise ParseError("unterminated string literal", i, src)
            out.append(Token("str", src[i : j + 1], i))
            i = j + 1
            continue
        if c.isdigit():
            j = i
            while j < n and src[j].isdigit():
                j += 1
            out.append(Token("num", src[i:j], i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] in "_'"):
                j += 1
            out.append(Token("ident", src[i:j], i))
            i = j
            continue
        for p in _MULTI_PUNCT:
            if src.startswith(p, i):
                out.append(Token("punct", p, i))
                i += len(p)
                break
        else:
            if c in _SINGLE_PUNCT:
                out.append(Token("punct", c, i))
                i += 1
            else:
                raise ParseError(f"unexpected character {c!r}", i, src)
    out.append(Token("eof", "", n))
    return out


# ---------------------------------------------------------------------------
# Pre-terms (typed during inference, built into kernel terms afterwards)


@dataclass
class PNode:
    pos: int


@dataclass
class PRef(PNode):
    name: str
    binding: object = None
    ty: Optional[HolType] = None


@dataclass
class PNum(PNode):
    value: int
    ty: Optional[HolType] = None


@dataclass
class PStr(PNode):
    text: str
    ty: Optional[HolType] = None


@dataclass
class PApp(PNode):
    fn: PNode
    arg: PNode
    ty: Optional[HolType] = None


@dataclass
class PBind(PNode):
    binder: str
    var: str
    var_ty: Optional[HolType]
    body: PNode
    slot: object = None
    ty: Optional[HolType] = None


@dataclass
class PAnnot(PNode):
    term: PNode
    annot: HolType
    ty: Optional[HolType] = None


class _Slot:
    __slots__ = ("name", "ty")

    def __init__(self, name: str, ty: HolType):
        self.name = name
        self.ty = ty


_SECTION_OPS = {
    "=": "=",
    "<": "<",
    "<=": "<=",
    ">": ">",
    ">=": ">=",
    "+": "+",
    "::": "CONS",
    "/\\": "/\\",
    "\\/": "\\/",
    "==>": "==>",
    "~": "~",
}

_BINDER_TOKENS = {"!", "?", "??", "\\"}
_CMP_OPS = ("=", "<=", "<", ">=", ">")


class _Parser:
    def __init__(self, src: str, sig: Signature):
        self.src = src
        self.sig = sig
        self.toks = tokenize(src)
        self.i = 0
        self.rigid_tyvars: set[str] = set()

    # -- token helpers

    def peek(self, ahead: int = 0) -> Token:
        j = min(self.i + ahead, len(self.toks) - 1)
        return self.toks[j]

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

    def expect(self, text: str) -> Token:
        t = self.next()
        if t.kind != "punct" or t.text != text:
            raise ParseError(f"expected {text!r}, found {t.text or 'end of input'!r}", t.pos, self.src)
        return t

    def fail(self, msg: str, tok: Optional[Token] = None):
        tok = tok or self.peek()
        raise ParseError(msg, tok.pos, self.src)

    # -- types

    def type_expr(self) -> HolType:
        t = self.type_prod()
        if self.at("->"):
            return fun_ty(t, self.type_expr())
        return t

    def type_prod(self) -> HolType:
        t = self.type_post()
        if self.at("#"):
            return prod_ty(t, self.type_prod())
        return t

    def type_post(self) -> HolType:
        t = self.type_atom()
        while True:
            nxt = self.peek()
            if nxt.kind == "ident" and self.sig.tycon_arity(nxt.text) == 1:
                self.next()
                t = TyCon(nxt.text, (t,))
            else:
                return t

    def type_atom(self) -> HolType:
        t = self.next()
        if t.kind == "punct" and t.text == "(":
            ty = self.type_expr()
            self.expect(")")
            return ty
        if t.kind != "ident":
            self.fail("expected a type", t)
        arity = self.sig.tycon_arity(t.text)
        if arity == 0:
            return TyCon(t.text)
        if arity is not None:
            self.fail(f"type constructor {t.text!r} needs {arity} argument(s)", t)
        if t.text[0].isupper():
            self.rigid_tyvars.add(t.text)
            return TyVar(t.text)
        self.fail(f"unknown type {t.text!r}", t)

    # -- terms

    def term(self) -> PNode:
        t = self.peek()
        if t.kind == "punct" and t.text in _BINDER_TOKENS:
            return self.binder()
        return self.imp()

    def binder(self) -> PNode:
        t = self.next()
        binder = t.text
        decls: list[tuple[str, Optional[HolType], int]] = []
        while self.peek().kind == "ident":
            v = self.next()
            ty = None
            if self.at(":"):
                ty = self.type_expr()
            decls.append((v.text, ty, v.pos))
        if not decls:
            self.fail(f"binder {binder!r} needs at least one variable")
        self.expect(".")
        body = self.term()
        for name, ty, pos in reversed(decls):
            body = PBind(pos, binder, name, ty, body)
        return body

    def imp(self) -> PNode:
        l = self.disj()
        t = self.peek()
        if t.kind == "punct" and t.text == "==>":
            self.next()
            r = self.imp()
            return PApp(t.pos, PApp(t.pos, PRef(t.pos, "==>"), l), r)
        return l

    def disj(self) -> PNode:
        l = self.conj()
        t = self.peek()
        if t.kind == "punct" and t.text == "\\/":
            self.next()
            r = self.disj()
            return PApp(t.pos, PApp(t.pos, PRef(t.pos, "\\/"), l), r)
        return l

    def conj(self) -> PNode:
        l = self.cmp()
        t = self.peek()
        if t.kind == "punct" and t.text == "/\\":
            self.next()
            r = self.conj()
            return PApp(t.pos, PApp(t.pos, PRef(t.pos, "/\\"), l), r)
        return l

    def cmp(self) -> PNode:
        l = self.sum()
        t = self.peek()
        if t.kind == "punct" and t.text in _CMP_OPS:
            self.next()
            r = self.sum()
            return PApp(t.pos, PApp(t.pos, PRef(t.pos, t.text), l), r)
        return l

    def sum(self) -> PNode:
        l = self.consx()
        while True:
            t = self.peek()
            if t.kind == "punct" and t.text == "+":
                self.next()
                r = self.consx()
                l = PApp(t.pos, PApp(t.pos, PRef(t.pos, "+"), l), r)
            else:
                return l

    def consx(self) -> PNode:
        l = self.neg()
        t = self.peek()
        if t.kind == "punct" and t.text == "::":
            self.next()
            r = self.consx()
            return PApp(t.pos, PApp(t.pos, PRef(t.pos, "CONS"), l), r)
        return l

    def neg(self) -> PNode:
        t = self.peek()
        if t.kind == "punct" and t.text == "~":
            self.next()
            return PApp(t.pos, PRef(t.pos, "~"), self.neg())
        return self.app()

    def _starts_atom(self, t: Token) -> bool:
        if t.kind in ("ident", "num", "str"):
            return True
        return t.kind == "punct" and t.text in ("(", "[", "'(")

    def app(self) -> PNode:
        f = self.atom()
        while self._starts_atom(self.peek()):
            arg = self.atom()
            f = PApp(f.pos, f, arg)
        return f

    def atom(self) -> PNode:
        t = self.next()
        if t.kind == "ident":
            return PRef(t.pos, t.text)
        if t.kind == "num":
            return PNum(t.pos, int(t.text))
        if t.kind == "str":
            return PStr(t.pos, t.text[1:-1])
        if t.kind == "punct" and t.text == "(":
            # operator section: ( op )
            nxt = self.peek()
            if (
                nxt.kind == "punct"
                and nxt.text in _SECTION_OPS
                and self.peek(1).kind == "punct"
                and self.peek(1).text == ")"
            ):
                self.next()
                self.next()
                return PRef(nxt.pos, _SECTION_OPS[nxt.text])
            inner = self.term()
            if self.at(":"):
                inner = PAnnot(t.pos, inner, self.type_expr())
            if self.peek().kind == "punct" and self.peek().text == ",":
                elems = [inner]
                while self.at(","):
                    e = self.term()
                    if self.at(":"):
                        e = PAnnot(e.pos, e, self.type_expr())
                    elems.append(e)
                self.expect(")")
                out = elems[-1]
                for e in reversed(elems[:-1]):
                    out = PApp(e.pos, PApp(e.pos, PRef(e.pos, ","), e), out)
                return out
            self.expect(")")
            return inner
        if t.kind == "punct" and t.text == "[":
            elems = []
            if not self.at("]"):
                elems.append(self.term())
                while self.at(";"):
                    elems.append(self.term())
                self.expect("]")
            out: PNode = PRef(t.pos, "NIL")
            for e in reversed(elems):
                out = PApp(e.pos, PApp(e.pos, PRef(e.pos, "CONS"), e), out)
            return out
        if t.kind == "punct" and t.text == "'(":
            return self.sexp_list(t.pos)
        self.fail(f"unexpected {t.text or 'end of input'!r}", t)

    def sexp_list(self, pos: int) -> PNode:
        items = []
        while True:
            t = self.peek()
            if t.kind == "punct" and t.text == ")":
                self.next()
                break
            items.append(self.sexp_item())
        spine: PNode = PRef(pos, "NIL")
        for e in reversed(items):
            spine = PApp(e.pos, PApp(e.pos, PRef(e.pos, "CONS"), e), spine)
        return PApp(pos, PRef(pos, "List"), spine)

    def sexp_item(self) -> PNode:
        t = self.next()
        if t.kind == "ident":
            return PApp(t.pos, PRef(t.pos, "Symbol"), PStr(t.pos, t.text))
        if t.kind == "punct" and t.text == "(":
            return self.sexp_list(t.pos)
        self.fail("expected a symbol or a parenthesized list inside '(...)", t)


# ---------------------------------------------------------------------------
# Type inference


class _Infer:
    def __init__(self, sig: Signature, src: str):
        self.sig = sig
        self.src = src
        self.env: dict[str, HolType] = {}
        self.count = 0
        self.free: dict[str, _Slot] = {}
        self.free_order: list[_Slot] = []
        self.scopes: list[dict[str, _Slot]] = []

    def fresh(self) -> TyVar:
        self.count += 1
        return TyVar(f"?{self.count}")

    def walk(self, ty: HolType) -> HolType:
        while type(ty) is TyVar:
            nxt = self.env.get(ty.name)
            if nxt is None:
                return ty
            ty = nxt
        return ty

    def resolve(self, ty: HolType) -> HolType:
        ty = self.walk(ty)
        if type(ty) is TyVar or not ty.args:
            return ty
        return TyCon(ty.name, tuple(self.resolve(a) for a in ty.args))

    def _occurs(self, name: str, ty: HolType) -> bool:
        ty = self.walk(ty)
        if type(ty) is TyVar:
            return ty.name == name
        return any(self._occurs(name, a) for a in ty.args)

    def unify(self, a: HolType, b: HolType, pos: int) -> None:
        a, b = self.walk(a), self.walk(b)
        if a == b:
            return
        if type(a) is TyVar and a.name.startswith("?"):
            if self._occurs(a.name, b):
                self._clash(a, b, pos)
            self.env[a.name] = b
            return
        if type(b) is TyVar and b.name.startswith("?"):
            if self._occurs(b.name, a):
                self._clash(a, b, pos)
            self.env[b.name] = a
            return
        if type(a) is TyCon and type(b) is TyCon and a.name == b.name and len(a.args) == len(b.args):
            for x, y in zip(a.args, b.args):
                self.unify(x, y, pos)
            return
        self._clash(a, b, pos)

    def _clash(self, a: HolType, b: HolType, pos: int):
        sa = kernel.type_str(self.resolve(a))
        sb = kernel.type_str(self.resolve(b))
        raise ParseError(f"type error: cannot match {sa} against {sb}", pos, self.src)

    # -- traversal

    def infer(self, node: PNode) -> HolType:
        if type(node) is PRef:
            ty = self._infer_ref(node)
        elif type(node) is PNum:
            ty = NUM
        elif type(node) is PStr:
            ty = STRING
        elif type(node) is PApp:
            fty = self.infer(node.fn)
            xty = self.infer(node.arg)
            r = self.fresh()
            self.unify(fty, fun_ty(xty, r), node.pos)
            ty = r
        elif type(node) is PBind:
            vty = node.var_ty if node.var_ty is not None else self.fresh()
            slot = _Slot(node.var, vty)
            node.slot = slot
            self.scopes.append({node.var: slot})
            bty = self.infer(node.body)
            self.scopes.pop()
            if node.binder == "\\":
                ty = fun_ty(vty, bty)
            else:
                self.unify(bty, BOOL, node.pos)
                ty = BOOL
        elif type(node) is PAnnot:
            ity = self.infer(node.term)
            self.unify(ity, node.annot, node.pos)
            ty = node.annot
        else:
            raise AssertionError(f"unknown node {node!r}")
        node.ty = ty
        return ty

    def _infer_ref(self, node: PRef) -> HolType:
        for scope in reversed(self.scopes):
            slot = scope.get(node.name)
            if slot is not None:
                node.binding = ("bound", slot)
                return slot.ty
        gen = self.sig.const_gen_ty(node.name)
        if gen is not None:
            inst = {tv: self.fresh() for tv in kernel.type_vars(gen)}
            node.binding = ("const", None)
            return kernel.type_subst(inst, gen)
        if is_fresh_name(node.name):
            raise ParseError(
                f"variable name {node.name!r} is reserved for generated variables",
                node.pos,
                self.src,
            )
        slot = self.free.get(node.name)
        if slot is None:
            slot = _Slot(node.name, self.fresh())
            self.free[node.name] = slot
            self.free_order.append(slot)
        node.binding = ("free", slot)
        return slot.ty


class _Builder:
    """Resolve inferred types (generalizing leftover metavariables) and
    build the kernel term."""

    def __init__(self, inf: _Infer, rigid: set[str]):
        self.inf = inf
        self.genmap: dict[str, TyVar] = {}
        self.letters = self._letters(rigid)

    @staticmethod
    def _letters(avoid: set[str]) -> Iterator[str]:
        for c in _string.ascii_uppercase:
            if c not in avoid:
                yield c
        i = 1
        while True:
            for c in _string.ascii_uppercase:
                name = f"{c}{i}"
                if name not in avoid:
                    yield name
            i += 1

    def final_ty(self, ty: HolType) -> HolType:
        ty = self.inf.walk(ty)
        if type(ty) is TyVar:
            if ty.name.startswith("?"):
                got = self.genmap.get(ty.name)
                if got is None:
                    got = TyVar(next(self.letters))
                    self.genmap[ty.name] = got
                return got
            return ty
        if not ty.args:
            return ty
        return TyCon(ty.name, tuple(self.final_ty(a) for a in ty.args))

    def build(self, node: PNode, benv: dict) -> Term:
        tn = type(node)
        if tn is PRef:
            kind, slot = node.binding
            if kind == "const":
                return Const(node.name, self.final_ty(node.ty))
            if kind == "bound":
                return benv[id(slot)]
            return Var(node.name, self.final_ty(slot.ty))
        if tn is PNum:
            return numeral_encode(node.value)
        if tn is PStr:
            return mk_string_lit(node.text)
        if tn is PApp:
            return App(self.build(node.fn, benv), self.build(node.arg, benv))
        if tn is PAnnot:
            return self.build(node.term, benv)
        # PBind
        v = Var(node.var, self.final_ty(node.slot.ty))
        benv2 = dict(benv)
        benv2[id(node.slot)] = v
        body = self.build(node.body, benv2)
        if node.binder == "\\":
            return Lam(v, body)
        return kernel.mk_binder(node.binder, v, body)


def parse_term(src: str, sig: Signature) -> Term:
    """Parse and type check a term against the signature."""
    p = _Parser(src, sig)
    tree = p.term()
    if p.at(":"):
        tree = PAnnot(0, tree, p.type_expr())
    tail = p.peek()
    if tail.kind != "eof":
        raise ParseError(f"unexpected {tail.text!r} after term", tail.pos, src)
    inf = _Infer(sig, src)
    inf.infer(tree)
    return _Builder(inf, p.rigid_tyvars).build(tree, {})


def parse_type(src: str, sig: Signature) -> HolType:
    p = _Parser(src, sig)
    ty = p.type_expr()
    tail = p.peek()
    if tail.kind != "eof":
        raise ParseError(f"unexpected {tail.text!r} after type", tail.pos, src)
    return ty


def _contains_query_binder(t: Term) -> bool:
    stack = [t]
    while stack:
        x = stack.pop()
        tx = type(x)
        if tx is Const and x.name == "??":
            return True
        if tx is App:
            stack.append(x.fn)
            stack.append(x.arg)
        elif tx is Lam:
            stack.append(x.body)
    return False


def parse_query(src: str, sig: Signature) -> tuple[list[Var], Term]:
    """Parse ``??v1 .. vn. body``; the binder must be outermost and bind
    every free variable of the body."""
    t = parse_term(src, sig)
    qvars, body = strip_query(t)
    if not qvars:
        raise ParseError("a query must begin with the ?? binder", 0, src)
    if _contains_query_binder(body):
        raise ParseError("?? may only appear at the outermost position of a query", 0, src)
    if body.ty != BOOL:
        raise ParseError("query body must be Boolean", 0, src)
    stray = kernel.frees(body) - set(qvars)
    if stray:
        names = ", ".join(sorted(v.name for v in stray))
        raise ParseError(f"query has variables not bound by ??: {names}", 0, src)
    return qvars, body


# ---------------------------------------------------------------------------
# Numerals


def numeral_encode(n: int) -> Term:
    """n as NUMERAL over little-endian BIT0/BIT1 bits ending in _0."""
    if n < 0:
        raise ValueError("numerals are non-negative")
    nn = fun_ty(NUM, NUM)

    def bits(k: int) -> Term:
        if k == 0:
            return Const("_0", NUM)
        return App(Const("BIT1" if k & 1 else "BIT0", nn), bits(k >> 1))

    return App(Const("NUMERAL", nn), bits(n))


def numeral_decode(t: Term) -> Optional[int]:
    if not (type(t) is App and type(t.fn) is Const and t.fn.name == "NUMERAL"):
        return None
    n, shift = 0, 0
    x = t.arg
    while True:
        if type(x) is Const and x.name == "_0":
            return n
        if type(x) is App and type(x.fn) is Const and x.fn.name in ("BIT0", "BIT1"):
            if x.fn.name == "BIT1":
                n |= 1 << shift
            shift += 1
            x = x.arg
        else:
            return None


# ---------------------------------------------------------------------------
# Printer

_INFIX_PREC = {
    "==>": (4, "r"),
    "\\/": (6, "r"),
    "/\\": (8, "r"),
    "=": (12, "n"),
    "<": (12, "n"),
    "<=": (12, "n"),
    ">": (12, "n"),
    ">=": (12, "n"),
    "+": (16, "l"),
}
_BINDER_NAMES = {"!", "?", "??"}
_APP_PREC = 50
_CONS_PREC = 23
_NEG_PREC = 30


def _dest_list(t: Term) -> tuple[list[Term], Optional[Term]]:
    """Split a cons spine into (elements, tail); tail None means nil-ended."""
    elems = []
    while True:
        d = dest_binary("CONS", t)
        if d is not None:
            elems.append(d[0])
            t = d[1]
            continue
        if type(t) is Const and t.name == "NIL":
            return elems, None
        return elems, t


def _sexp_quote(t: Term) -> Optional[str]:
    """Render a fully concrete sexp as quote-notation body, else None."""
    if type(t) is App and type(t.fn) is Const:
        head = t.fn.name
        if head == "Symbol":
            s = dest_string_lit(t.arg)
            if s is None or not s or not all(c.isalnum() or c in "_'-" for c in s):
                return None
            return s
        if head == "List":
            elems, tail = _dest_list(t.arg)
            if tail is not None:
                return None
            parts = []
            for e in elems:
                q = _sexp_quote(e)
                if q is None:
                    return None
                parts.append(q)
            return "(" + " ".join(parts) + ")"
    return None


def _dest_pair(t: Term) -> Optional[tuple[Term, Term]]:
    return dest_binary(",", t)


def _collect_binders(name: str, t: Term) -> tuple[list[Var], Term]:
    vs = []
    while (d := dest_binder(name, t)) is not None:
        vs.append(d[0])
        t = d[1]
    return vs, t


def print_term(t: Term) -> str:
    """Pretty-print; ``parse_term`` reads the result back alpha-equal."""
    return _pp(t, 0)


def _wrap(s: str, prec: int, ctx: int) -> str:
    return f"({s})" if prec < ctx else s


def _pp(t: Term, ctx: int) -> str:
    n = numeral_decode(t)
    if n is not None:
        return str(n)
    lit = dest_string_lit(t)
    if lit is not None:
        return t.name
    tt = type(t)
    if tt is Var:
        return t.name
    if tt is Const:
        if t.name == "NIL":
            return "[]"
        if t.name in _INFIX_PREC or t.name in ("~", ","):
            return f"({t.name})"
        return t.name
    if tt is Lam:
        vs = [t.bound]
        body = t.body
        while type(body) is Lam:
            vs.append(body.bound)
            body = body.body
        s = "\\" + " ".join(v.name for v in vs) + ". " + _pp(body, 2)
        return _wrap(s, 1, ctx)
    # sexp quotation for fully concrete subterms
    if tt is App and type(t.fn) is Const and t.fn.name == "List":
        q = _sexp_quote(t)
        if q is not None:
            return "'" + q
    # list sugar / cons chains
    if tt is App and dest_binary("CONS", t) is not None:
        elems, tail = _dest_list(t)
        if tail is None:
            return "[" + "; ".join(_pp(e, 2) for e in elems) + "]"
        parts = [_pp(e, _CONS_PREC + 1) for e in elems] + [_pp(tail, _CONS_PREC)]
        return _wrap(" :: ".join(parts), _CONS_PREC, ctx)
    d = _dest_pair(t)
    if d is not None:
        parts = [d[0]]
        rest = d[1]
        while (dd := _dest_pair(rest)) is not None:
            parts.append(dd[0])
            rest = dd[1]
        parts.append(rest)
        return "(" + ", ".join(_pp(p, 2) for p in parts) + ")"
    if tt is App:
        # binders
        if type(t.fn) is Const and t.fn.name in _BINDER_NAMES and type(t.arg) is Lam:
            name = t.fn.name
            vs, body = _collect_binders(name, t)
            s = name + " ".join(v.name for v in vs) + ". " + _pp(body, 2)
            return _wrap(s, 1, ctx)
        # negation
        inner = dest_neg(t)
        if inner is not None:
            return _wrap("~" + _pp(inner, _NEG_PREC + 1), _NEG_PREC, ctx)
        # infixes and sections
        head, args = t, []
        while type(head) is App:
            args.append(head.arg)
            head = head.fn
        args.reverse()
        if type(head) is Const and (head.name in _INFIX_PREC or head.name == ","):
            if head.name in _INFIX_PREC and len(args) == 2:
                prec, assoc = _INFIX_PREC[head.name]
                lctx = prec if assoc == "l" else prec + 1
                rctx = prec if assoc == "r" else prec + 1
                s = f"{_pp(args[0], lctx)} {head.name} {_pp(args[1], rctx)}"
                return _wrap(s, prec, ctx)
            s = f"({head.name})"
            for a in args:
                s += " " + _pp(a, _APP_PREC + 1)
            return _wrap(s, _APP_PREC, ctx)
        s = _pp(t.fn, _APP_PREC) + " " + _pp(t.arg, _APP_PREC + 1)
        return _wrap(s, _APP_PREC, ctx)
    raise AssertionError("unreachable")


def print_theorem(th: Theorem) -> str:
    pre = ", ".join(sorted(print_term(h) for h in th.hyps))
    body = f"|- {print_term(th.concl)}"
    return f"{pre} {body}" if pre else body


def print_type(ty: HolType) -> str:
    return kernel.type_str(ty)
