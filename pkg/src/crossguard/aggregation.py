"""Decision semantics over a session's accepted claims.

All four rules share one safety posture: any tie or doubt resolves to Stop.
Only the aggregation differs; the caller supplies the trust ranking.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .model import Claim, Detection, ExclusionReason, NodeId, ProtocolError, SessionId


class Verdict(Enum):
    """The master's actuation-facing answer for one session."""

    GO = "go"
    STOP = "stop"


class AggregationSemantics(Enum):
    """Pluggable rules for combining claims into a verdict."""

    UNANIMITY_SAFE = "unanimity_safe"
    MAJORITY = "majority"
    TRUST_WEIGHTED_MAJORITY = "trust_weighted_majority"
    EXPERT_OVERRIDE = "expert_override"


@dataclass(frozen=True)
class Decision:
    """Verdict plus full provenance for one session."""

    session: SessionId
    verdict: Verdict
    semantics: AggregationSemantics
    ranking: tuple[NodeId, ...]
    used_claims: tuple[Claim, ...]
    excluded_claims: tuple[tuple[Claim, ExclusionReason], ...]


def decide(
    claims: list[Claim],
    ranking: list[NodeId],
    semantics: AggregationSemantics,
) -> Verdict:
    """Apply one semantics to a non-empty claim set.

    `ranking` must be a permutation of the claim nodes, most trusted first.
    The empty-claims fail-safe is the session layer's job, not ours.
    """
    if not claims:
        raise ProtocolError("decide() requires at least one claim")
    by_node = {claim.node: claim for claim in claims}
    if len(by_node) != len(claims):
        raise ProtocolError("decide() received duplicate claims for one node")
    if sorted(by_node) != sorted(ranking) or len(ranking) != len(claims):
        raise ProtocolError("ranking is not a permutation of the claim nodes")

    clear = sum(1 for claim in claims if claim.detection is Detection.CLEAR)
    detected = len(claims) - clear

    if semantics is AggregationSemantics.UNANIMITY_SAFE:
        return Verdict.GO if detected == 0 else Verdict.STOP

    if semantics is AggregationSemantics.MAJORITY:
        # Ties go to Stop.
        return Verdict.GO if clear > detected else Verdict.STOP

    if semantics is AggregationSemantics.TRUST_WEIGHTED_MAJORITY:
        # Rank-linear weights: position i of n carries weight n - i. Steeper
        # laws such as doubling collapse onto the top claim alone, because the
        # leader then outweighs everyone below combined.
        total = len(ranking)
        clear_weight = 0
        detected_weight = 0
        for position, node in enumerate(ranking):
            weight = total - position
            if by_node[node].detection is Detection.CLEAR:
                clear_weight += weight
            else:
                detected_weight += weight
        return Verdict.GO if clear_weight > detected_weight else Verdict.STOP

    if semantics is AggregationSemantics.EXPERT_OVERRIDE:
        expert = by_node[ranking[0]]
        return Verdict.GO if expert.detection is Detection.CLEAR else Verdict.STOP

    raise ProtocolError(f"unhandled semantics {semantics!r}")
