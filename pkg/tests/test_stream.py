"""Stream laws: laziness, memoization, fairness."""

import threading

import pytest
from hypothesis import given, strategies as st

from certlog import stream
from certlog.stream import (
    Cons,
    Delayed,
    EMPTY,
    EmptyStreamError,
    append,
    bind_fair,
    delay,
    filter_stream,
    first,
    from_list,
    merge_fair,
    mergef,
    mplus,
    singleton,
    smap,
    take,
    to_list,
)
from oracles import round_robin


def counted_stream(items, counter):
    """A stream whose suspensions bump a counter when forced."""

    def build(i):
        if i >= len(items):
            return EMPTY

        def thunk():
            counter[0] += 1
            return Cons(items[i], build(i + 1))

        return Delayed(thunk)

    return build(0)


def test_take_prefix():
    s = from_list(["a", "b", "c"])
    assert take(s, 2) == ["a", "b"]
    assert take(s, 5) == ["a", "b", "c"]


def test_take_zero_forces_nothing():
    counter = [0]
    s = counted_stream([1, 2, 3], counter)
    assert take(s, 0) == []
    assert counter[0] == 0


def test_take_forces_at_most_n_plus_one_suspensions():
    counter = [0]
    s = counted_stream(list(range(10)), counter)
    assert take(s, 3) == [0, 1, 2]
    assert counter[0] <= 4


def test_get_and_to_list():
    assert first(singleton(7)) == 7
    with pytest.raises(EmptyStreamError):
        first(EMPTY)
    assert to_list(from_list([1, 2, 3])) == [1, 2, 3]


def test_memoized_forcing():
    counter = [0]

    def thunk():
        counter[0] += 1
        return singleton("x")

    d = Delayed(thunk)
    assert take(d, 1) == ["x"]
    assert take(d, 1) == ["x"]
    assert counter[0] == 1


def test_concurrent_forcing_is_safe():
    counter = [0]

    def thunk():
        counter[0] += 1
        return singleton(42)

    d = Delayed(thunk)
    results = []
    threads = [threading.Thread(target=lambda: results.append(take(d, 1))) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(r == [42] for r in results)


def test_append_basics():
    assert to_list(append(from_list([1]), lambda: from_list([2]))) == [1, 2]
    assert to_list(append(EMPTY, lambda: from_list([5]))) == [5]


def test_append_second_operand_suspended():
    forced = [False]

    def tail():
        forced[0] = True
        return from_list([2])

    s = append(from_list([1]), tail)
    assert take(s, 1) == [1]
    assert not forced[0]


@given(st.lists(st.integers(), max_size=6), st.lists(st.integers(), max_size=6),
       st.lists(st.integers(), max_size=6), st.integers(0, 20))
def test_append_associativity_observational(a, b, c, n):
    lhs = append(from_list(a), lambda: append(from_list(b), lambda: from_list(c)))
    rhs = append(append(from_list(a), lambda: from_list(b)), lambda: from_list(c))
    assert take(lhs, n) == take(rhs, n)


def test_flat_map_dfs_order():
    s = stream.flat_map(lambda g: from_list([f"{g}1", f"{g}2"]), from_list(["a", "b"]))
    assert to_list(s) == ["a1", "a2", "b1", "b2"]


def test_smap_functor_laws():
    s = from_list([1, 2, 3])
    assert to_list(smap(lambda x: x + 1, s)) == [2, 3, 4]
    assert to_list(smap(lambda x: x, s)) == [1, 2, 3]


def test_filter_stream():
    s = from_list(range(10))
    assert to_list(filter_stream(lambda x: x % 3 == 0, s)) == [0, 3, 6, 9]


def infinite_from(start, step=1):
    return Cons(start, Delayed(lambda: infinite_from(start + step, step)))


def test_mergef_interleaves_infinite_with_finite():
    odd = lambda _x: infinite_from(1, 2)
    evens = lambda _x: from_list([2, 4])
    merged = mergef([odd, evens], [], None)
    prefix = take(merged, 6)
    # every element of each input appears at a bounded index (k = 2)
    assert set(prefix[:4]) == {1, 2, 3, 4}
    assert 5 in prefix


def test_mergef_single_producer_unchanged():
    merged = mergef([lambda _x: from_list([1, 2, 3])], [], None)
    assert to_list(merged) == [1, 2, 3]


def test_mergef_empty_is_empty():
    assert to_list(mergef([], [], None)) == []


def test_mergef_pending_suspensions_participate():
    merged = mergef([lambda _x: from_list([1])], [lambda: from_list([2])], None)
    assert sorted(to_list(merged)) == [1, 2]


def test_fairness_bound():
    # element at index i of one of k streams appears at merged index <= k*(i+1)
    k = 3
    streams = [from_list([f"s{j}e{i}" for i in range(4)]) for j in range(k)]
    merged = to_list(merge_fair(streams))
    for j in range(k):
        for i in range(4):
            assert merged.index(f"s{j}e{i}") <= k * (i + 1)


def test_merge_fair_matches_round_robin_reference():
    lists = [[1, 4, 7], [2, 5], [3, 6, 8, 9]]
    merged = to_list(merge_fair([from_list(xs) for xs in lists]))
    assert merged == round_robin(lists)


def test_merge_fair_delayed_heads_rotate():
    # a stream with a delayed head must not block the round
    slow = Delayed(lambda: from_list([99]))
    fast = from_list([1, 2])
    merged = take(merge_fair([slow, fast]), 3)
    assert merged[0] in (1, 99)
    assert set(merged) == {1, 2, 99}


def test_mplus_interleaves_at_suspensions():
    left = infinite_from(0, 2)  # 0 2 4 ...
    right = infinite_from(1, 2)  # 1 3 5 ...
    out = take(mplus(left, right), 8)
    assert set(out[:8]) == {0, 1, 2, 3, 4, 5, 6, 7}


def test_bind_fair_survives_unproductive_branch():
    def f(x):
        if x == "dead":
            # productive but never yields an element
            def spin():
                return Delayed(spin)

            return Delayed(spin)
        return singleton(x)

    s = bind_fair(from_list(["dead", "alive"]), f)
    assert take(s, 1) == ["alive"]
