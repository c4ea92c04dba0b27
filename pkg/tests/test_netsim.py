"""Event ordering, lossy transport, and per-message random keying."""

from __future__ import annotations

import pytest

from crossguard.model import NetworkConfig, ProtocolError
from crossguard.netsim import (
    ActuationTick,
    Delivery,
    EventQueue,
    Message,
    MessageKind,
    Network,
    SessionDeadline,
    run,
)


def lossless(latency_min=1000, latency_max=5000, drop=0.0, seed=7):
    return NetworkConfig(
        latency_min=latency_min, latency_max=latency_max, drop_probability=drop, seed=seed
    )


def build_net(node_ids, config, records=None, seed=None):
    queue = EventQueue()
    sink = records.append if records is not None else (lambda record: None)
    network = Network(
        node_ids=node_ids,
        config=config,
        seed=config.seed if seed is None else seed,
        queue=queue,
        emit=sink,
    )
    return queue, network


def drain(queue):
    """Pop everything, returning (due, event) pairs in pop order."""
    out = []
    while True:
        popped = queue.pop()
        if popped is None:
            return out
        out.append(popped)


def delivery_at(due, src=1, seq=0, recipient=2, kind=MessageKind.CLAIM):
    message = Message(kind=kind, src=src, dst=recipient, seq=seq, sent_at=0, payload=None)
    return due, Delivery(message=message, recipient=recipient)


class TestEventQueue:
    def test_orders_by_due_time(self):
        queue = EventQueue()
        queue.schedule(*delivery_at(300))
        queue.schedule(*delivery_at(100, seq=1))
        queue.schedule(*delivery_at(200, seq=2))
        assert [due for due, _ in drain(queue)] == [100, 200, 300]

    def test_delivery_beats_deadline_beats_tick_at_the_same_instant(self):
        """A claim landing exactly on the deadline is still collected."""
        queue = EventQueue()
        queue.schedule(500, ActuationTick(master=1, session=1))
        queue.schedule(500, SessionDeadline(master=1, session=1))
        queue.schedule(*delivery_at(500))
        kinds = [type(event) for _, event in drain(queue)]
        assert kinds == [Delivery, SessionDeadline, ActuationTick]

    def test_simultaneous_deliveries_order_by_src_seq_recipient(self):
        queue = EventQueue()
        queue.schedule(*delivery_at(100, src=2, seq=0, recipient=1))
        queue.schedule(*delivery_at(100, src=1, seq=1, recipient=3))
        queue.schedule(*delivery_at(100, src=1, seq=1, recipient=2))
        queue.schedule(*delivery_at(100, src=1, seq=0, recipient=9))
        order = [
            (event.message.src, event.message.seq, event.recipient)
            for _, event in drain(queue)
        ]
        assert order == [(1, 0, 9), (1, 1, 2), (1, 1, 3), (2, 0, 1)]

    def test_scheduling_in_the_past_is_a_protocol_error(self):
        queue = EventQueue()
        queue.schedule(*delivery_at(100))
        queue.pop()
        with pytest.raises(ProtocolError):
            queue.schedule(*delivery_at(99, seq=1))

    def test_pop_advances_the_clock(self):
        queue = EventQueue()
        queue.schedule(*delivery_at(250))
        assert queue.now == 0
        queue.pop()
        assert queue.now == 250

    def test_empty_queue_pops_none(self):
        assert EventQueue().pop() is None


class TestNetworkTransport:
    def test_broadcast_reaches_every_node_including_the_sender(self):
        queue, network = build_net([1, 2, 3], lossless())
        network.send(MessageKind.SESSION_START, src=1, dst=None, payload="q", now=0)
        recipients = sorted(event.recipient for _, event in drain(queue))
        assert recipients == [1, 2, 3]

    def test_unicast_reaches_only_the_target(self):
        queue, network = build_net([1, 2, 3], lossless())
        network.send(MessageKind.CLAIM, src=2, dst=1, payload="c", now=0)
        assert [event.recipient for _, event in drain(queue)] == [1]

    def test_drop_probability_zero_delivers_everything(self):
        records = []
        queue, network = build_net([1, 2, 3], lossless(drop=0.0), records)
        for now in range(0, 500, 10):
            network.send(MessageKind.CLAIM, src=1, dst=2, payload=None, now=now)
        assert network.dropped == 0
        assert len(drain(queue)) == 50
        assert sum(1 for r in records if r["ev"] == "drop") == 0

    def test_drop_probability_one_drops_everything(self):
        records = []
        queue, network = build_net([1, 2, 3], lossless(drop=1.0), records)
        network.send(MessageKind.SESSION_START, src=1, dst=None, payload=None, now=0)
        assert drain(queue) == []
        assert network.dropped == 3
        assert sum(1 for r in records if r["ev"] == "drop") == 3

    def test_degenerate_latency_is_exact(self):
        """latency_min == latency_max == 10 000 puts every arrival at send+10 000."""
        queue, network = build_net([1, 2], lossless(latency_min=10000, latency_max=10000))
        network.send(MessageKind.CLAIM, src=1, dst=2, payload=None, now=2500)
        network.send(MessageKind.CLAIM, src=2, dst=1, payload=None, now=4000)
        assert [due for due, _ in drain(queue)] == [12500, 14000]

    def test_latency_draws_stay_inside_the_configured_band(self):
        queue, network = build_net([1, 2], lossless(latency_min=2000, latency_max=8000))
        for now in range(0, 20000, 10):
            network.send(MessageKind.CLAIM, src=1, dst=2, payload=None, now=now)
        latencies = sorted(due - event.message.sent_at for due, event in drain(queue))
        assert latencies[0] >= 2000
        assert latencies[-1] <= 8000

    def test_latency_band_endpoints_are_inclusive(self):
        queue, network = build_net([1, 2], lossless(latency_min=0, latency_max=3))
        for now in range(2000):
            network.send(MessageKind.CLAIM, src=1, dst=2, payload=None, now=now)
        latencies = {due - event.message.sent_at for due, event in drain(queue)}
        assert latencies == {0, 1, 2, 3}

    def test_drop_rate_matches_the_configured_probability(self):
        """100 000 unicast sends at drop 0.3: frozen observation 0.30079,
        inside the 99.9% binomial interval around 0.3."""
        queue, network = build_net([1, 2], lossless(drop=0.3), seed=7)
        for now in range(100000):
            network.send(MessageKind.CLAIM, src=1, dst=2, payload=None, now=now)
        fraction = network.dropped / 100000
        assert fraction == pytest.approx(0.30079)
        assert 0.2952 <= fraction <= 0.3048
        assert 0.293 <= fraction <= 0.307

    def test_send_emits_a_structured_record(self):
        records = []
        _, network = build_net([1, 2, 3], lossless(), records)
        network.send(
            MessageKind.SESSION_START,
            src=1,
            dst=None,
            payload=None,
            now=77,
            describe=lambda record: record.update(session=4),
        )
        assert records[0] == {
            "t": 77,
            "ev": "send",
            "kind": "session_start",
            "src": 1,
            "dst": "*",
            "seq": 0,
            "session": 4,
        }

    def test_sequence_numbers_count_per_sender(self):
        queue, network = build_net([1, 2], lossless())
        a = network.send(MessageKind.CLAIM, src=1, dst=2, payload=None, now=0)
        b = network.send(MessageKind.CLAIM, src=1, dst=2, payload=None, now=1)
        c = network.send(MessageKind.CLAIM, src=2, dst=1, payload=None, now=2)
        assert (a.seq, b.seq, c.seq) == (0, 1, 0)


class TestKeyedTransportDraws:
    def test_same_seed_replays_the_same_schedule(self):
        queue_a, net_a = build_net([1, 2, 3], lossless(drop=0.2))
        net_a.send(MessageKind.SESSION_START, src=1, dst=None, payload=None, now=0)
        first = [(due, event.recipient) for due, event in drain(queue_a)]
        queue_b, net_b = build_net([1, 2, 3], lossless(drop=0.2))
        net_b.send(MessageKind.SESSION_START, src=1, dst=None, payload=None, now=0)
        assert [(due, event.recipient) for due, event in drain(queue_b)] == first

    def test_adding_a_node_never_perturbs_existing_pairs(self):
        """Draws are keyed by (seed, src, seq, recipient): a fourth node adds
        its own draws without shifting the three the trio already saw."""
        queue_a, net_a = build_net([1, 2, 3], lossless(drop=0.2))
        net_a.send(MessageKind.SESSION_START, src=1, dst=None, payload=None, now=0)
        trio = {event.recipient: due for due, event in drain(queue_a)}
        queue_b, net_b = build_net([1, 2, 3, 4], lossless(drop=0.2))
        net_b.send(MessageKind.SESSION_START, src=1, dst=None, payload=None, now=0)
        quartet = {event.recipient: due for due, event in drain(queue_b)}
        for recipient, due in trio.items():
            assert quartet[recipient] == due

    def test_different_seeds_change_the_schedule(self):
        queue_a, net_a = build_net([1, 2], lossless(latency_min=0, latency_max=10**6), seed=1)
        queue_b, net_b = build_net([1, 2], lossless(latency_min=0, latency_max=10**6), seed=2)
        for now in range(5):
            net_a.send(MessageKind.CLAIM, src=1, dst=2, payload=None, now=now)
            net_b.send(MessageKind.CLAIM, src=1, dst=2, payload=None, now=now)
        times_a = [due for due, _ in drain(queue_a)]
        times_b = [due for due, _ in drain(queue_b)]
        assert times_a != times_b


class TestRunLoop:
    def test_dispatches_by_event_type_until_quiescent(self):
        queue = EventQueue()
        queue.schedule(*delivery_at(100))
        queue.schedule(300, SessionDeadline(master=1, session=1))
        seen = []
        run(
            queue,
            {
                Delivery: lambda due, event: seen.append(("delivery", due)),
                SessionDeadline: lambda due, event: seen.append(("deadline", due)),
            },
        )
        assert seen == [("delivery", 100), ("deadline", 300)]

    def test_missing_handler_is_a_protocol_error(self):
        queue = EventQueue()
        queue.schedule(10, ActuationTick(master=1, session=1))
        with pytest.raises(ProtocolError):
            run(queue, {})
