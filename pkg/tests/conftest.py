import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from certlog import theories
from certlog.kernel import mk_query


@pytest.fixture(scope="session")
def lists_thy():
    return theories.load_builtin("lists")


@pytest.fixture(scope="session")
def arith_thy():
    return theories.load_builtin("arith")


@pytest.fixture(scope="session")
def sort_thy():
    return theories.load_builtin("sort")


@pytest.fixture(scope="session")
def lisp_thy():
    return theories.load_builtin("lisp")


@pytest.fixture(scope="session")
def lock_thy():
    return theories.load_builtin("lock")


def query_term(theory, text):
    """Parse a ?? query back into a single term."""
    qvars, body = theory.parse_query(text)
    q = body
    for v in reversed(qvars):
        q = mk_query(v, q)
    return q
