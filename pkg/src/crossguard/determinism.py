"""Keyed RNG substreams.

Every random draw in a run comes from a substream derived from the run seed
plus a structural key (who is drawing, for what). Two runs with the same seed
replay identically, and adding a participant never shifts anyone else's draws
because no draw site shares a stream with another.
"""

from __future__ import annotations

import hashlib
import struct
from typing import Protocol

# Domain tags keep sense draws and transport draws in disjoint key spaces.
DOMAIN_SENSE = b"sense"
DOMAIN_NET = b"net"

_TWO_53 = float(1 << 53)
_WORD_SPAN = 1 << 64


class UniformSource(Protocol):
    """Anything that yields uniform floats in [0, 1); random.Random qualifies."""

    def random(self) -> float: ...


class KeyedStream:
    """Deterministic uniform draws expanded from a hashed key.

    Blocks are SHA-256(key || block index), consumed eight bytes per draw,
    so the i-th draw of a stream is a pure function of (key, i) that is
    stable across platforms and Python versions. Streams are cheap: nothing
    is hashed until the first draw.
    """

    __slots__ = ("_key", "_block", "_offset", "_counter")

    def __init__(self, key: bytes) -> None:
        self._key = key
        self._block = b""
        self._offset = 32
        self._counter = 0

    def _word(self) -> int:
        offset = self._offset
        if offset >= 32:
            self._block = hashlib.sha256(
                self._key + self._counter.to_bytes(8, "little")
            ).digest()
            self._counter += 1
            offset = 0
        self._offset = offset + 8
        return int.from_bytes(self._block[offset : offset + 8], "little")

    def random(self) -> float:
        """Uniform float in [0, 1), from the top 53 bits of one word."""
        return (self._word() >> 11) / _TWO_53

    def randint(self, low: int, high: int) -> int:
        """Uniform integer in [low, high], both ends inclusive."""
        if high < low:
            raise ValueError(f"empty range [{low}, {high}]")
        span = high - low + 1
        # Rejection sampling removes the (tiny) modulo bias exactly.
        limit = _WORD_SPAN - (_WORD_SPAN % span)
        while True:
            word = self._word()
            if word < limit:
                return low + (word % span)


def substream(seed: int, domain: bytes, *parts: int) -> KeyedStream:
    """The substream for one draw site, keyed by (seed, domain, *parts)."""
    return KeyedStream(domain + struct.pack(f"<Q{len(parts)}q", seed, *parts))


def sense_stream(seed: int, node: int, session: int) -> KeyedStream:
    """Substream for one node's perception draw in one session."""
    return substream(seed, DOMAIN_SENSE, node, session)


def transport_stream(seed: int, src: int, seq: int, dst: int) -> KeyedStream:
    """Substream for one message's delivery draws toward one recipient."""
    return substream(seed, DOMAIN_NET, src, seq, dst)
