"""Dispatch policies: ordering oracles, turnaround accounting, properties."""

from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from iostack import Direction, DuplicateRequest, PendingQueue, Policy


def drain(queue: PendingQueue) -> list[int]:
    order = []
    while True:
        rid = queue.next()
        if rid is None:
            return order
        order.append(rid)


def load(queue: PendingQueue, cylinders: dict[int, int]) -> None:
    for rid, cyl in cylinders.items():
        queue.enqueue(rid, cyl)


class TestBasics:
    def test_enqueue_grows_queue(self):
        q = PendingQueue()
        q.enqueue(1, 10)
        q.enqueue(2, 20)
        assert len(q) == 2

    def test_duplicate_rejected(self):
        q = PendingQueue()
        q.enqueue(1, 10)
        with pytest.raises(DuplicateRequest):
            q.enqueue(1, 99)

    def test_empty_returns_none(self):
        assert PendingQueue().next() is None

    def test_same_contents_any_policy_until_dispatch(self):
        # Ordering is decided only at next(): queues hold identical sets.
        for policy in Policy:
            q = PendingQueue(policy=policy, max_cylinder=200)
            load(q, {1: 50, 2: 120, 3: 150})
            assert len(q) == 3


class TestFcfs:
    def test_dispatch_equals_arrival(self):
        q = PendingQueue(policy=Policy.FCFS)
        load(q, {10: 500, 11: 3, 12: 77})
        assert drain(q) == [10, 11, 12]


class TestElevator:
    def test_scan_order_matches_sort_oracle(self):
        # Oracle: ascending cylinders at/above the head, then the rest
        # descending.
        pending = {1: 50, 2: 120, 3: 150}
        q = PendingQueue(policy=Policy.SCAN, max_cylinder=200, position=100, direction=Direction.UP)
        load(q, pending)
        ahead = sorted((c, r) for r, c in pending.items() if c >= 100)
        behind = sorted(((c, r) for r, c in pending.items() if c < 100), reverse=True)
        oracle = [r for _, r in ahead + behind]
        assert drain(q) == oracle == [2, 3, 1]

    def test_look_same_order_but_early_turnaround(self):
        scan = PendingQueue(policy=Policy.SCAN, max_cylinder=200, position=100)
        look = PendingQueue(policy=Policy.LOOK, max_cylinder=200, position=100)
        for q in (scan, look):
            load(q, {1: 50, 2: 120, 3: 150})
        assert drain(scan) == drain(look) == [2, 3, 1]
        # SCAN rides to the edge (cylinder 200) before reversing; LOOK
        # reverses at the furthest pending request (150).
        assert scan.travel_cylinders == (200 - 100) + (200 - 50)
        assert look.travel_cylinders == (150 - 100) + (150 - 50)
        assert look.travel_cylinders < scan.travel_cylinders

    def test_scan_direction_persists_while_work_ahead(self):
        q = PendingQueue(policy=Policy.SCAN, max_cylinder=100, position=10)
        load(q, {1: 20, 2: 15, 3: 90})
        assert drain(q) == [2, 1, 3]
        assert q.direction is Direction.UP

    def test_ties_break_by_arrival(self):
        q = PendingQueue(policy=Policy.SCAN, max_cylinder=100, position=0)
        q.enqueue(7, 40)
        q.enqueue(3, 40)
        q.enqueue(9, 40)
        assert drain(q) == [7, 3, 9]

    def test_down_direction(self):
        q = PendingQueue(policy=Policy.SCAN, max_cylinder=100, position=50, direction=Direction.DOWN)
        load(q, {1: 60, 2: 40, 3: 10})
        assert drain(q) == [2, 3, 1]


class TestCircular:
    def test_c_scan_wraps_to_lowest(self):
        q = PendingQueue(policy=Policy.C_SCAN, max_cylinder=200, position=100)
        load(q, {1: 50, 2: 120, 3: 150, 4: 10})
        assert drain(q) == [2, 3, 4, 1]

    def test_c_look_wraps_without_edge_travel(self):
        cscan = PendingQueue(policy=Policy.C_SCAN, max_cylinder=200, position=100)
        clook = PendingQueue(policy=Policy.C_LOOK, max_cylinder=200, position=100)
        for q in (cscan, clook):
            load(q, {1: 50, 2: 120})
        assert drain(cscan) == drain(clook) == [2, 1]
        assert clook.travel_cylinders < cscan.travel_cylinders


@given(
    st.dictionaries(st.integers(0, 999), st.integers(0, 300), min_size=0, max_size=25),
    st.sampled_from(list(Policy)),
    st.integers(0, 300),
)
def test_every_policy_dispatches_exactly_the_enqueued_set(pending, policy, start):
    q = PendingQueue(policy=policy, max_cylinder=300, position=start)
    load(q, pending)
    order = drain(q)
    assert sorted(order) == sorted(pending)
    assert q.next() is None  # work conservation: empty iff nothing pending
