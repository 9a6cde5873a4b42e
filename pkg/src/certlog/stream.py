"""Lazy, possibly infinite streams with memoized suspensions.

The search machinery lives on these: a stream node is empty, a cons cell, or
a suspension.  Forcing a suspension is memoized, so pulling more answers
later never recomputes solver work, and every combinator does a bounded
amount of work per step so that recursive solvers stay productive.
"""

from __future__ import annotations

from typing import Callable, Iterator, Sequence, TypeVar

T = TypeVar("T")


class EmptyStreamError(Exception):
    pass


class Stream:
    __slots__ = ()

    def __iter__(self) -> Iterator:
        return iterate(self)


class _Empty(Stream):
    __slots__ = ()

    def __repr__(self):
        return "Stream.EMPTY"


EMPTY: Stream = _Empty()


class Cons(Stream):
    __slots__ = ("head", "tail")

    def __init__(self, head, tail: Stream):
        self.head = head
        self.tail = tail


class Delayed(Stream):
    __slots__ = ("_thunk", "_value")

    def __init__(self, thunk: Callable[[], Stream]):
        self._thunk = thunk
        self._value = None

    def step(self) -> Stream:
        # Memoized; a race between threads recomputes the same pure value,
        # after which everyone sees the stored node.
        v = self._value
        if v is None:
            v = self._thunk()
            self._value = v
            self._thunk = None
        return v


def delay(thunk: Callable[[], Stream]) -> Stream:
    return Delayed(thunk)


def singleton(x) -> Stream:
    return Cons(x, EMPTY)


def from_list(items: Sequence) -> Stream:
    s: Stream = EMPTY
    for x in reversed(items):
        s = Cons(x, s)
    return s


def force(s: Stream) -> Stream:
    """Resolve suspensions until the node is a Cons or EMPTY."""
    while type(s) is Delayed:
        s = s.step()
    return s


def iterate(s: Stream) -> Iterator:
    while True:
        s = force(s)
        if s is EMPTY:
            return
        yield s.head
        s = s.tail


def take(s: Stream, n: int) -> list:
    """The first n elements (fewer if the stream ends); take(s, 0) forces
    nothing."""
    out = []
    while n > 0:
        s = force(s)
        if s is EMPTY:
            break
        out.append(s.head)
        s = s.tail
        n -= 1
    return out


def first(s: Stream):
    s = force(s)
    if s is EMPTY:
        raise EmptyStreamError("empty stream")
    return s.head


def to_list(s: Stream) -> list:
    """Materialize the whole stream; diverges on an infinite one."""
    return list(iterate(s))


def append(s: Stream, tail_thunk: Callable[[], Stream]) -> Stream:
    """s followed by the suspended second stream."""
    if s is EMPTY:
        return Delayed(tail_thunk)
    if type(s) is Cons:
        return Cons(s.head, Delayed(lambda: append(s.tail, tail_thunk)))
    return Delayed(lambda: append(s.step(), tail_thunk))


def smap(f: Callable, s: Stream) -> Stream:
    if s is EMPTY:
        return EMPTY
    if type(s) is Cons:
        if s.tail is EMPTY:
            return Cons(f(s.head), EMPTY)
        return Cons(f(s.head), Delayed(lambda: smap(f, s.tail)))
    return Delayed(lambda: smap(f, s.step()))


def flat_map(f: Callable[..., Stream], s: Stream) -> Stream:
    """Concatenate f over s, depth first, with everything suspended."""
    if s is EMPTY:
        return EMPTY
    if type(s) is Cons:
        return append(f(s.head), lambda: flat_map(f, s.tail))
    return Delayed(lambda: flat_map(f, s.step()))


def mplus(s1: Stream, s2: Stream) -> Stream:
    """Binary interleaving: like append, but the two streams swap roles at
    every suspension boundary, so an unproductive prefix of one side cannot
    starve the other."""
    if s1 is EMPTY:
        return s2
    if type(s1) is Cons:
        if s1.tail is EMPTY:
            return Cons(s1.head, s2)
        return Cons(s1.head, Delayed(lambda: mplus(s1.tail, s2)))
    return Delayed(lambda: mplus(s2, s1.step()))


def bind_fair(s: Stream, f: Callable[..., Stream]) -> Stream:
    """Interleaving bind: results of f over the elements of s, merged with
    mplus instead of concatenated, which keeps the search complete when some
    branches are infinite."""
    if s is EMPTY:
        return EMPTY
    if type(s) is Cons:
        if s.tail is EMPTY:
            return f(s.head)
        return mplus(f(s.head), Delayed(lambda: bind_fair(s.tail, f)))
    return Delayed(lambda: bind_fair(s.step(), f))


def filter_stream(pred: Callable, s: Stream) -> Stream:
    if s is EMPTY:
        return EMPTY
    if type(s) is Cons:
        if pred(s.head):
            return Cons(s.head, Delayed(lambda: filter_stream(pred, s.tail)))
        return Delayed(lambda: filter_stream(pred, s.tail))
    return Delayed(lambda: filter_stream(pred, s.step()))


def _merge_round(streams: tuple) -> Stream:
    """One scheduling turn of the round robin merge.

    The front stream either contributes an element (its tail rotates to the
    back), gets dropped when exhausted, or, when suspended, is advanced one
    step and rotated without blocking the round.
    """
    if not streams:
        return EMPTY
    s, rest = streams[0], streams[1:]
    if s is EMPTY:
        return Delayed(lambda: _merge_round(rest))
    if type(s) is Cons:
        return Cons(s.head, Delayed(lambda: _merge_round(rest + (s.tail,))))
    return Delayed(lambda: _merge_round(rest + (s.step(),)))


def merge_fair(streams: Sequence[Stream]) -> Stream:
    """Round robin interleaving: an element at index i of one of k streams
    shows up in the merge at index at most k * (i + 1)."""
    return _merge_round(tuple(streams))


def mergef(
    producers: Sequence[Callable], pending: Sequence[Callable[[], Stream]], value
) -> Stream:
    """Apply each producer to ``value`` and fairly merge the results together
    with the pending suspensions."""
    streams = [p(value) for p in producers]
    streams.extend(Delayed(th) for th in pending)
    return merge_fair(streams)
