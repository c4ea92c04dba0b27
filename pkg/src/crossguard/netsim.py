"""Deterministic lossy-network and event-queue layer.

The queue pops in (due, tie_order) lexicographic order where tie_order is
(event class rank, src, seq, recipient). Deliveries rank before session
deadlines, which rank before actuation ticks, so a claim landing exactly on
the deadline is still collected and the inclusive boundary is well defined.
"""

from __future__ import annotations

import heapq
import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Mapping

from .determinism import transport_stream
from .model import NetworkConfig, NodeId, ProtocolError, SessionId, SimTime

logger = logging.getLogger(__name__)


class MessageKind(Enum):
    SESSION_START = "session_start"
    CLAIM = "claim"
    ACTUATION = "actuation"


@dataclass(frozen=True)
class Message:
    """One transmission; dst None means broadcast to every node, sender included."""

    kind: MessageKind
    src: NodeId
    dst: NodeId | None
    seq: int
    sent_at: SimTime
    payload: object


@dataclass(frozen=True)
class Delivery:
    """A message arriving at one recipient."""

    message: Message
    recipient: NodeId

    RANK = 0

    def sort_key(self) -> tuple[int, int, int, int]:
        return (self.RANK, self.message.src, self.message.seq, self.recipient)


@dataclass(frozen=True)
class SessionDeadline:
    """The master's collection window for one session has ended."""

    master: NodeId
    session: SessionId

    RANK = 1

    def sort_key(self) -> tuple[int, int, int, int]:
        return (self.RANK, self.master, self.session, self.master)


@dataclass(frozen=True)
class ActuationTick:
    """Settle interval elapsed; the session may close and the next may open."""

    master: NodeId
    session: SessionId

    RANK = 2

    def sort_key(self) -> tuple[int, int, int, int]:
        return (self.RANK, self.master, self.session, self.master)


Event = Delivery | SessionDeadline | ActuationTick


class EventQueue:
    """Priority queue with a total, deterministic pop order."""

    def __init__(self) -> None:
        self._heap: list[tuple] = []
        self._now: SimTime = 0
        self._pushes = itertools.count()

    @property
    def now(self) -> SimTime:
        return self._now

    def schedule(self, due: SimTime, event: Event) -> None:
        if due < self._now:
            raise ProtocolError(
                f"event {event!r} scheduled at {due}, before current time {self._now}"
            )
        heapq.heappush(self._heap, (due, *event.sort_key(), next(self._pushes), event))

    def pop(self) -> tuple[SimTime, Event] | None:
        if not self._heap:
            return None
        entry = heapq.heappop(self._heap)
        due, event = entry[0], entry[-1]
        self._now = due
        return due, event

    def __len__(self) -> int:
        return len(self._heap)


class Network:
    """Applies per-recipient drop and latency draws and schedules deliveries.

    Draws come from substreams keyed by (seed, src, seq, recipient): resending
    with the same seed replays identically, and adding a node never perturbs
    the draws any existing pair sees.
    """

    def __init__(
        self,
        node_ids: list[NodeId],
        config: NetworkConfig,
        seed: int,
        queue: EventQueue,
        emit: Callable[[dict], None],
    ) -> None:
        self.node_ids = sorted(node_ids)
        self.config = config
        self.seed = seed
        self.queue = queue
        self._emit = emit
        self._next_seq: dict[NodeId, int] = {node: 0 for node in self.node_ids}
        self.sent = 0
        self.dropped = 0
        self.delivered = 0

    def send(
        self,
        kind: MessageKind,
        src: NodeId,
        dst: NodeId | None,
        payload: object,
        now: SimTime,
        describe: Callable[[dict], None] | None = None,
    ) -> Message:
        """Transmit; returns the message after scheduling its deliveries.

        `describe` may add payload fields to the send record before emission.
        """
        seq = self._next_seq[src]
        self._next_seq[src] = seq + 1
        message = Message(kind=kind, src=src, dst=dst, seq=seq, sent_at=now, payload=payload)

        record = {
            "t": now,
            "ev": "send",
            "kind": kind.value,
            "src": src,
            "dst": "*" if dst is None else dst,
            "seq": seq,
        }
        if describe is not None:
            describe(record)
        self._emit(record)
        self.sent += 1

        recipients = self.node_ids if dst is None else [dst]
        config = self.config
        for recipient in recipients:
            stream = transport_stream(self.seed, src, seq, recipient)
            if stream.random() < config.drop_probability:
                self.dropped += 1
                self._emit(
                    {
                        "t": now,
                        "ev": "drop",
                        "kind": kind.value,
                        "src": src,
                        "dst": recipient,
                        "seq": seq,
                    }
                )
                continue
            latency = stream.randint(config.latency_min, config.latency_max)
            self.queue.schedule(now + latency, Delivery(message=message, recipient=recipient))
        return message

    def note_delivered(self) -> None:
        self.delivered += 1


def run(queue: EventQueue, handlers: Mapping[type, Callable[[SimTime, Event], None]]) -> None:
    """Drain the queue, dispatching each event by type; stops at quiescence."""
    while True:
        popped = queue.pop()
        if popped is None:
            return
        due, event = popped
        handler = handlers.get(type(event))
        if handler is None:
            raise ProtocolError(f"no handler registered for {type(event).__name__}")
        handler(due, event)
