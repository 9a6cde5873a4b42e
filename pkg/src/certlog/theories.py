"""Shipped theory content, loaded from packaged ``.thy`` files."""

from __future__ import annotations

import threading
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from . import kernel
from .kernel import App, Const, Term, Var
from .theory import Theory, TheoryError, merge_theories, parse_theory
from .unify import is_fresh_name

BUILTIN_NAMES = ("lists", "arith", "sort", "lisp", "lock")

_cache: dict[str, Theory] = {}
_cache_lock = threading.RLock()  # reentrant: imports resolve recursively


def load_builtin(name: str) -> Theory:
    """Load a packaged theory by name; idempotent."""
    if name not in BUILTIN_NAMES:
        raise TheoryError(f"unknown builtin theory {name!r} (have: {', '.join(BUILTIN_NAMES)})")
    with _cache_lock:
        got = _cache.get(name)
        if got is None:
            src = resources.files(__package__).joinpath(f"theories/{name}.thy").read_text("utf-8")
            got = parse_theory(src, name=name, resolve_import=load_builtin)
            _cache[name] = got
        return got


def load_path(path: str | Path) -> Theory:
    """Load a theory file from disk; imports resolve to builtins first, then
    to sibling ``.thy`` files."""
    path = Path(path)
    src = path.read_text("utf-8")

    def resolve(name: str) -> Theory:
        if name in BUILTIN_NAMES:
            return load_builtin(name)
        sibling = path.parent / f"{name}.thy"
        if sibling.exists():
            return load_path(sibling)
        raise TheoryError(f"cannot resolve import {name!r} from {path}")

    return parse_theory(src, name=path.stem, resolve_import=resolve)


def theory_context(builtins: Sequence[str] = (), paths: Sequence[str] = ()) -> Theory:
    """A working context merging the requested theories over the base."""
    parts = [load_builtin(b) for b in builtins]
    parts.extend(load_path(p) for p in paths)
    if len(parts) == 1:
        return parts[0]
    label = "+".join(p.name for p in parts) or "base"
    return merge_theories(label, parts)


def first_fresh_var(t: Term) -> Optional[Var]:
    """The first machine-generated variable in left-to-right order."""

    def walk(x: Term) -> Optional[Var]:
        tx = type(x)
        if tx is Var:
            return x if is_fresh_name(x.name) else None
        if tx is App:
            return walk(x.fn) or walk(x.arg)
        if tx is kernel.Lam:
            return walk(x.body)
        return None

    return walk(t)


def rename_fresh(binding: Term, replacement_name: str) -> Term:
    """Substitute the first machine-generated variable in a binding by a
    concrete name, turning it into a readable term.

    String-typed variables become string literals; sexp-typed variables
    become quoted symbols.
    """
    v = first_fresh_var(binding)
    if v is None:
        raise TheoryError("term contains no generated variable to rename")
    if v.ty == kernel.STRING:
        repl: Term = kernel.mk_string_lit(replacement_name)
    elif v.ty == kernel.TyCon("sexp"):
        sym = Const("Symbol", kernel.fun_ty(kernel.STRING, kernel.TyCon("sexp")))
        repl = App(sym, kernel.mk_string_lit(replacement_name))
    else:
        raise TheoryError(
            f"variable {v.name} : {kernel.type_str(v.ty)} cannot be renamed to a symbol"
        )
    return kernel.vsubst({v: repl}, binding)
