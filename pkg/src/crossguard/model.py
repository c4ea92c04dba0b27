"""Core domain types shared by every other module.

Times are integer microseconds, distances are meters in a flat 2D plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

# Type aliases; plain ints keep the event loop cheap.
NodeId = int
SessionId = int
SimTime = int


class ProtocolError(RuntimeError):
    """A simulator-internal contract was violated (not a user input error)."""


class SensorKind(Enum):
    """Sensor hardware classes, symbolically comparable by quality tier."""

    LIDAR = "lidar"
    OPTICAL_CAMERA = "optical_camera"
    RGB_CAMERA = "rgb_camera"

    @property
    def tier(self) -> int:
        """Quality tier used for trust ranking: higher is more capable."""
        return _SENSOR_TIERS[self]


_SENSOR_TIERS = {
    SensorKind.LIDAR: 3,
    SensorKind.OPTICAL_CAMERA: 2,
    SensorKind.RGB_CAMERA: 1,
}


class Detection(Enum):
    """Binary perception claim about the queried region."""

    PEDESTRIAN_DETECTED = "pedestrian_detected"
    CLEAR = "clear"


class ExclusionReason(Enum):
    """Why a delivered claim was kept out of a session's decision."""

    UNKNOWN_NODE = "unknown_node"
    MALFORMED_EVIDENCE = "malformed_evidence"
    DUPLICATE = "duplicate"
    LATE = "late"


@dataclass(frozen=True)
class Pose:
    """Planar position."""

    x: float
    y: float

    def distance_to(self, other: "Pose") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class SensorProfile:
    """Static quality attributes a node attaches to its claims as evidence."""

    kind: SensorKind
    base_false_negative: float
    base_false_positive: float
    effective_range: float


@dataclass(frozen=True)
class Claim:
    """One node's answer to one session's query, plus its trust evidence.

    distance_to_target is the emitting node's distance to the query-region
    center at emission time; the node cannot know the true pedestrian pose.
    """

    node: NodeId
    session: SessionId
    detection: Detection
    profile: SensorProfile
    distance_to_target: float
    emitted_at: SimTime


@dataclass(frozen=True)
class GroundTruth:
    """Simulator-side truth for one session; pose is meaningful only when present."""

    pedestrian_present: bool
    pedestrian_pose: Pose | None = None


@dataclass(frozen=True)
class PerceptionModel:
    """Scenario-global sensing context.

    distance_reference scales how fast error rates degrade with distance;
    query_center anchors claim evidence and sensing when no pedestrian exists.
    """

    distance_reference: float
    query_center: Pose


@dataclass(frozen=True)
class NetworkConfig:
    """Lossy-link model: per-recipient uniform latency and independent drops."""

    latency_min: SimTime
    latency_max: SimTime
    drop_probability: float
    seed: int


@dataclass(frozen=True)
class NodeSpec:
    """One participant: pose, sensor, and its roles."""

    id: NodeId
    pose: Pose
    sensor: SensorProfile
    master: bool = False
    actuated: bool = False


@dataclass(frozen=True)
class Scenario:
    """A complete, runnable world description."""

    nodes: tuple[NodeSpec, ...]
    ground_truth: GroundTruth
    perception: PerceptionModel
    network: NetworkConfig
    session_window: SimTime
    settle_interval: SimTime
    sessions: int

    def node_ids(self) -> tuple[NodeId, ...]:
        return tuple(n.id for n in self.nodes)

    def master_node(self) -> NodeSpec:
        masters = [n for n in self.nodes if n.master]
        if len(masters) != 1:
            raise ProtocolError(f"scenario has {len(masters)} master nodes")
        return masters[0]

    def actuated_ids(self) -> tuple[NodeId, ...]:
        return tuple(sorted(n.id for n in self.nodes if n.actuated))


def _finite(value: float) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)


def sensor_errors(profile: SensorProfile, path: str = "sensor") -> list[str]:
    """Value-range problems in a sensor profile, as human-readable strings."""
    errors = []
    if not isinstance(profile.kind, SensorKind):
        errors.append(f"{path}.kind: unknown sensor kind {profile.kind!r}")
    for name in ("base_false_negative", "base_false_positive"):
        rate = getattr(profile, name)
        if not _finite(rate) or not 0.0 <= rate < 0.5:
            errors.append(f"{path}.{name}: must be in [0.0, 0.5), got {rate!r}")
    if not _finite(profile.effective_range) or profile.effective_range <= 0.0:
        errors.append(f"{path}.effective_range: must be > 0, got {profile.effective_range!r}")
    return errors


def _pose_errors(pose: Pose, path: str) -> list[str]:
    errors = []
    for axis in ("x", "y"):
        value = getattr(pose, axis)
        if not _finite(value):
            errors.append(f"{path}.{axis}: must be a finite number, got {value!r}")
    return errors


def claim_evidence_errors(claim: Claim) -> list[str]:
    """Checks the evidence fields a master cannot take on faith."""
    errors = sensor_errors(claim.profile, path=f"claim from node {claim.node}")
    if not _finite(claim.distance_to_target) or claim.distance_to_target < 0.0:
        errors.append(
            f"claim from node {claim.node}: distance_to_target must be >= 0,"
            f" got {claim.distance_to_target!r}"
        )
    return errors


def validate_scenario(scenario: Scenario) -> list[str]:
    """Every invariant violation in the scenario, or an empty list if runnable.

    Error strings carry field paths so CLI users can find the offending line.
    """
    errors: list[str] = []

    if not scenario.nodes:
        errors.append("nodes: at least one node is required")
    seen: set[NodeId] = set()
    for index, node in enumerate(scenario.nodes):
        path = f"nodes[{index}]"
        if not isinstance(node.id, int) or isinstance(node.id, bool) or node.id < 0:
            errors.append(f"{path}.id: must be an integer >= 0, got {node.id!r}")
            continue
        if node.id in seen:
            errors.append(f"duplicate node id: {node.id}")
        seen.add(node.id)
        errors.extend(_pose_errors(node.pose, f"{path}.pose"))
        errors.extend(sensor_errors(node.sensor, f"{path}.sensor"))

    masters = [n for n in scenario.nodes if n.master]
    if len(masters) != 1:
        errors.append(f"nodes: exactly one master is required, got {len(masters)}")
    elif not masters[0].actuated:
        errors.append("nodes: the master node must be actuated")

    truth = scenario.ground_truth
    if truth.pedestrian_present:
        if truth.pedestrian_pose is None:
            errors.append("ground_truth.pedestrian_pose: required when pedestrian_present")
        else:
            errors.extend(_pose_errors(truth.pedestrian_pose, "ground_truth.pedestrian_pose"))
    elif truth.pedestrian_pose is not None:
        errors.extend(_pose_errors(truth.pedestrian_pose, "ground_truth.pedestrian_pose"))

    if not _finite(scenario.perception.distance_reference) or scenario.perception.distance_reference <= 0.0:
        errors.append(
            "perception.distance_reference: must be > 0,"
            f" got {scenario.perception.distance_reference!r}"
        )
    errors.extend(_pose_errors(scenario.perception.query_center, "query_region_center"))

    net = scenario.network
    if not isinstance(net.latency_min, int) or isinstance(net.latency_min, bool) or net.latency_min < 0:
        errors.append(f"network.latency_min: must be an integer >= 0, got {net.latency_min!r}")
    if not isinstance(net.latency_max, int) or isinstance(net.latency_max, bool) or net.latency_max < 0:
        errors.append(f"network.latency_max: must be an integer >= 0, got {net.latency_max!r}")
    elif isinstance(net.latency_min, int) and net.latency_max < net.latency_min:
        errors.append(
            f"network.latency_max: must be >= latency_min, got {net.latency_max!r}"
            f" < {net.latency_min!r}"
        )
    if not _finite(net.drop_probability) or not 0.0 <= net.drop_probability <= 1.0:
        errors.append(f"network.drop_probability: must be in [0.0, 1.0], got {net.drop_probability!r}")
    if not isinstance(net.seed, int) or isinstance(net.seed, bool) or not 0 <= net.seed < 2**64:
        errors.append(f"network.seed: must be an integer in [0, 2^64), got {net.seed!r}")

    if not isinstance(scenario.session_window, int) or scenario.session_window <= 0:
        errors.append(f"session_window: must be an integer > 0, got {scenario.session_window!r}")
    if not isinstance(scenario.settle_interval, int) or scenario.settle_interval < 0:
        errors.append(f"settle_interval: must be an integer >= 0, got {scenario.settle_interval!r}")
    elif isinstance(net.latency_max, int) and scenario.settle_interval < net.latency_max:
        # Actuation must land before the next session opens in a lossless run.
        errors.append(
            f"settle_interval: must be >= network.latency_max, got {scenario.settle_interval!r}"
            f" < {net.latency_max!r}"
        )
    if not isinstance(scenario.sessions, int) or scenario.sessions < 1:
        errors.append(f"sessions: must be an integer >= 1, got {scenario.sessions!r}")

    return errors
