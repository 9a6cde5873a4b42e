"""Canonical text rendering of solutions, shared by every output path so the
batch, REPL, and server surfaces stay byte-identical."""

from __future__ import annotations

import json

from .solver import Solution
from .syntax import print_term, print_theorem


def render_bindings(sol: Solution) -> list[str]:
    return [f"{v.name} = {print_term(t)}" for v, t in sol.bindings]


def render_solution(sol: Solution) -> str:
    lines = render_bindings(sol)
    lines.append(print_theorem(sol.certificate))
    return "\n".join(lines)


def render_solutions(sols) -> str:
    return "\n\n".join(render_solution(s) for s in sols)


def solution_payload(sol: Solution) -> dict:
    """The structured form sent over the wire."""
    return {
        "bindings": [{"var": v.name, "term": print_term(t)} for v, t in sol.bindings],
        "certificate": print_theorem(sol.certificate),
        "text": render_solution(sol),
    }


def solution_json(sol: Solution) -> str:
    return json.dumps(solution_payload(sol), ensure_ascii=False)
