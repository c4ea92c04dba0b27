"""Query-session lifecycle on the master node.

Sessions are strictly sequential: Collecting until an inclusive deadline,
Decided while actuation settles, then Closed before the next one may open.
Every delivered claim is either accepted exactly once or booked with an
exclusion reason, so nothing delivered goes unaccounted.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum

from .aggregation import AggregationSemantics, Decision, Verdict, decide
from .model import (
    Claim,
    ExclusionReason,
    NodeId,
    ProtocolError,
    SessionId,
    SimTime,
    claim_evidence_errors,
)
from .trust import rank

logger = logging.getLogger(__name__)


class SessionPhase(Enum):
    COLLECTING = "collecting"
    DECIDED = "decided"
    CLOSED = "closed"


@dataclass
class SessionState:
    """Mutable bookkeeping for one session; owned by the master's event loop."""

    id: SessionId
    opened_at: SimTime
    deadline: SimTime
    phase: SessionPhase = SessionPhase.COLLECTING
    received: dict[NodeId, Claim] = field(default_factory=dict)
    exclusions: list[tuple[Claim, ExclusionReason]] = field(default_factory=list)
    decision: Decision | None = None
    closed_at: SimTime | None = None


def open_session(
    previous: SessionState | None, now: SimTime, window: SimTime
) -> SessionState:
    """Start the next session; ids are consecutive from 1 with no gaps."""
    if previous is not None and previous.phase is not SessionPhase.CLOSED:
        raise ProtocolError(
            f"session {previous.id} is still {previous.phase.value}; sessions may not overlap"
        )
    next_id = 1 if previous is None else previous.id + 1
    return SessionState(id=next_id, opened_at=now, deadline=now + window)


def classify_claim(
    state: SessionState,
    claim: Claim,
    arrival: SimTime,
    known_nodes: frozenset[NodeId],
) -> ExclusionReason | None:
    """First applicable exclusion reason, or None when the claim is usable.

    Reasons are checked in a fixed priority so a claim that is wrong in
    several ways is always booked the same way. A claim tagged with an old
    session id counts as Late: the window it answered has already passed.
    """
    if claim.node not in known_nodes:
        return ExclusionReason.UNKNOWN_NODE
    if claim_evidence_errors(claim):
        return ExclusionReason.MALFORMED_EVIDENCE
    if claim.node in state.received:
        return ExclusionReason.DUPLICATE
    if arrival > state.deadline or claim.session != state.id:
        return ExclusionReason.LATE
    if state.phase is not SessionPhase.COLLECTING:
        return ExclusionReason.LATE
    return None


def accept_claim(
    state: SessionState,
    claim: Claim,
    arrival: SimTime,
    known_nodes: frozenset[NodeId],
) -> ExclusionReason | None:
    """Record one delivered claim, first claim per node wins.

    Returns the exclusion reason it was booked under, or None if accepted.
    Exclusions keep accruing after the decision so the closed session still
    accounts for every claim delivered during its lifetime.
    """
    if state.phase is SessionPhase.CLOSED:
        raise ProtocolError(f"claim delivered to closed session {state.id}")
    reason = classify_claim(state, claim, arrival, known_nodes)
    if reason is None:
        state.received[claim.node] = claim
    else:
        state.exclusions.append((claim, reason))
    return reason


def close_and_decide(
    state: SessionState, now: SimTime, semantics: AggregationSemantics
) -> Decision:
    """Freeze the claim set at the deadline and produce the verdict.

    An empty claim set short-circuits to Stop before any semantics runs:
    silence is never evidence of a clear crossing.
    """
    if state.phase is not SessionPhase.COLLECTING:
        raise ProtocolError(f"session {state.id} already {state.phase.value}")
    if now < state.deadline:
        raise ProtocolError(
            f"session {state.id} closing at {now} before its deadline {state.deadline}"
        )
    used = tuple(sorted(state.received.values(), key=lambda claim: claim.node))
    if used:
        ranking = tuple(rank(list(used)))
        verdict = decide(list(used), list(ranking), semantics)
    else:
        ranking = ()
        verdict = Verdict.STOP
    decision = Decision(
        session=state.id,
        verdict=verdict,
        semantics=semantics,
        ranking=ranking,
        used_claims=used,
        excluded_claims=tuple(state.exclusions),
    )
    state.phase = SessionPhase.DECIDED
    state.decision = decision
    return decision


def mark_closed(state: SessionState, now: SimTime) -> None:
    """Retire a decided session; only then may a successor open."""
    if state.phase is not SessionPhase.DECIDED:
        raise ProtocolError(f"cannot close session {state.id} while {state.phase.value}")
    state.phase = SessionPhase.CLOSED
    state.closed_at = now
