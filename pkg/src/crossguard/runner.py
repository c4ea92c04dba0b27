"""End-to-end simulation runs and the Monte Carlo sweep harness.

One run wires a scenario into node agents over the deterministic network,
executes its sessions to quiescence, and meters the trace stream as it is
emitted. Sweeps repeat runs across seeds and semantics; arms with the same
seed share every perception draw, so semantics are compared like for like.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

from .actuation import NodeMotion, apply_command, sequence_actuation
from .aggregation import AggregationSemantics
from .determinism import sense_stream
from .model import (
    Claim,
    ExclusionReason,
    GroundTruth,
    NodeId,
    NodeSpec,
    ProtocolError,
    Scenario,
    SessionId,
    SimTime,
    validate_scenario,
)
from .netsim import (
    ActuationTick,
    Delivery,
    EventQueue,
    Message,
    MessageKind,
    Network,
    SessionDeadline,
    run as run_events,
)
from .perception import sense
from .scenario import ScenarioValidationError
from .session import SessionPhase, SessionState, accept_claim, close_and_decide, mark_closed, open_session
from .trace import claim_payload, dumps_record

logger = logging.getLogger(__name__)

TRUTH_MODES = ("fixed", "alternating")


@dataclass(frozen=True)
class StartQuery:
    """SessionStart payload: which session, answer by when."""

    session: SessionId
    deadline: SimTime


@dataclass
class SoloStats:
    """Counterfactual scoring of one node's own claims against truth."""

    claims: int = 0
    errors: int = 0

    @property
    def error_rate(self) -> float:
        return self.errors / self.claims if self.claims else 0.0


def _zero_exclusions() -> dict[str, int]:
    return {reason.value: 0 for reason in ExclusionReason}


@dataclass
class RunMetrics:
    """Aggregated outcomes of one run."""

    decisions: int = 0
    stops: int = 0
    gos: int = 0
    false_go_count: int = 0
    false_stop_count: int = 0
    exclusions: dict[str, int] = field(default_factory=_zero_exclusions)
    solo: dict[NodeId, SoloStats] = field(default_factory=dict)

    @property
    def error_rate(self) -> float:
        wrong = self.false_go_count + self.false_stop_count
        return wrong / self.decisions if self.decisions else 0.0

    def solo_error_rate(self, node: NodeId) -> float:
        return self.solo[node].error_rate


class MetricsCollector:
    """Builds RunMetrics from the trace stream, one record at a time.

    Needs no second pass and no stored trace: truth comes from session_open
    records, node counterfactuals from claim send records, outcomes from
    decision records.
    """

    def __init__(self) -> None:
        self.metrics = RunMetrics()
        self._truth: dict[SessionId, bool] = {}

    def feed(self, record: dict) -> None:
        ev = record["ev"]
        if ev == "send":
            if record["kind"] == "claim":
                claim = record["claim"]
                present = self._truth[claim["session"]]
                stats = self.metrics.solo.setdefault(claim["node"], SoloStats())
                stats.claims += 1
                detected = claim["detection"] == "pedestrian_detected"
                if detected != present:
                    stats.errors += 1
        elif ev == "session_open":
            self._truth[record["session"]] = record["pedestrian_present"]
        elif ev == "decision":
            metrics = self.metrics
            metrics.decisions += 1
            present = self._truth[record["session"]]
            if record["verdict"] == "stop":
                metrics.stops += 1
                if not present:
                    metrics.false_stop_count += 1
            else:
                metrics.gos += 1
                if present:
                    metrics.false_go_count += 1
        elif ev == "claim_excluded":
            self.metrics.exclusions[record["reason"]] += 1
        elif ev == "claim_orphan":
            # Landed after the final session closed; booked run-wide as late.
            self.metrics.exclusions[ExclusionReason.LATE.value] += 1


class _NodeAgent:
    """Per-node behavior shared by master and slaves: sense and obey."""

    def __init__(self, sim: "Simulation", spec: NodeSpec) -> None:
        self.sim = sim
        self.spec = spec
        self.motion = NodeMotion()
        # Evidence distance is always measured to the query-region center.
        self.distance_to_center = spec.pose.distance_to(sim.scenario.perception.query_center)

    def on_session_start(self, now: SimTime, query: StartQuery) -> None:
        sim = self.sim
        truth = sim.truth_for(query.session)
        stream = sense_stream(sim.seed, self.spec.id, query.session)
        detection = sense(truth, self.spec.pose, self.spec.sensor, sim.scenario.perception, stream)
        claim = Claim(
            node=self.spec.id,
            session=query.session,
            detection=detection,
            profile=self.spec.sensor,
            distance_to_target=self.distance_to_center,
            emitted_at=now,
        )

        def describe(record: dict) -> None:
            record["claim"] = claim_payload(claim)

        sim.network.send(MessageKind.CLAIM, self.spec.id, sim.master_id, claim, now, describe)

    def on_actuation(self, now: SimTime, command) -> None:
        applied = apply_command(self.motion, command)
        if applied:
            self.sim.emit(
                {
                    "t": now,
                    "ev": "actuated",
                    "node": self.spec.id,
                    "session": command.session,
                    "action": command.action.value,
                    "state": self.motion.state.value,
                }
            )
        else:
            self.sim.emit(
                {
                    "t": now,
                    "ev": "stale_command",
                    "node": self.spec.id,
                    "session": command.session,
                    "latest_session": self.motion.latest_session,
                }
            )


class Simulation:
    """One scenario, one semantics, one seed, driven to quiescence."""

    def __init__(
        self,
        scenario: Scenario,
        semantics: AggregationSemantics,
        seed: int,
        truth_mode: str = "fixed",
        sinks: list | None = None,
    ) -> None:
        if truth_mode not in TRUTH_MODES:
            raise ValueError(f"truth_mode must be one of {TRUTH_MODES}, got {truth_mode!r}")
        self.scenario = scenario
        self.semantics = semantics
        self.seed = seed
        self.truth_mode = truth_mode
        self._sinks = sinks or []

        self.master_id = scenario.master_node().id
        self.known_nodes = frozenset(scenario.node_ids())
        self.actuated = list(scenario.actuated_ids())
        self.queue = EventQueue()
        self.network = Network(
            list(scenario.node_ids()), scenario.network, seed, self.queue, self.emit
        )
        self.agents = {spec.id: _NodeAgent(self, spec) for spec in scenario.nodes}
        self.state: SessionState | None = None
        self.decisions = 0

        base = scenario.ground_truth
        pose = base.pedestrian_pose if base.pedestrian_pose is not None else scenario.perception.query_center
        self._truths = {
            True: GroundTruth(pedestrian_present=True, pedestrian_pose=pose),
            False: GroundTruth(pedestrian_present=False, pedestrian_pose=pose),
        }

    def emit(self, record: dict) -> None:
        for sink in self._sinks:
            sink(record)

    def truth_for(self, session: SessionId) -> GroundTruth:
        present = self.scenario.ground_truth.pedestrian_present
        if self.truth_mode == "alternating" and session % 2 == 0:
            present = not present
        return self._truths[present]

    def run(self) -> None:
        self._open_next(now=0)
        run_events(
            self.queue,
            {
                Delivery: self._on_delivery,
                SessionDeadline: self._on_deadline,
                ActuationTick: self._on_tick,
            },
        )
        if self.decisions != self.scenario.sessions:
            raise ProtocolError(
                f"run ended with {self.decisions} decisions for {self.scenario.sessions} sessions"
            )

    # -- master-side protocol steps -------------------------------------

    def _open_next(self, now: SimTime) -> None:
        self.state = open_session(self.state, now, self.scenario.session_window)
        truth = self.truth_for(self.state.id)
        self.emit(
            {
                "t": now,
                "ev": "session_open",
                "session": self.state.id,
                "deadline": self.state.deadline,
                "pedestrian_present": truth.pedestrian_present,
            }
        )
        query = StartQuery(session=self.state.id, deadline=self.state.deadline)
        self.network.send(MessageKind.SESSION_START, self.master_id, None, query, now)
        self.queue.schedule(self.state.deadline, SessionDeadline(self.master_id, self.state.id))

    def _on_claim(self, now: SimTime, claim: Claim) -> None:
        state = self.state
        if state is None or state.phase is SessionPhase.CLOSED:
            self.emit(
                {"t": now, "ev": "claim_orphan", "node": claim.node, "claim_session": claim.session}
            )
            return
        reason = accept_claim(state, claim, now, self.known_nodes)
        if reason is None:
            self.emit(
                {
                    "t": now,
                    "ev": "claim_accepted",
                    "session": state.id,
                    "node": claim.node,
                    "claim_session": claim.session,
                }
            )
        else:
            self.emit(
                {
                    "t": now,
                    "ev": "claim_excluded",
                    "session": state.id,
                    "node": claim.node,
                    "claim_session": claim.session,
                    "reason": reason.value,
                }
            )

    def _on_deadline(self, now: SimTime, event: SessionDeadline) -> None:
        state = self.state
        if state is None or event.session != state.id:
            raise ProtocolError(f"deadline for session {event.session} fired out of order")
        decision = close_and_decide(state, now, self.semantics)
        self.decisions += 1
        self.emit(
            {
                "t": now,
                "ev": "decision",
                "session": decision.session,
                "verdict": decision.verdict.value,
                "semantics": decision.semantics.value,
                "ranking": list(decision.ranking),
                "used": [claim.node for claim in decision.used_claims],
                "excluded": [
                    {"node": claim.node, "claim_session": claim.session, "reason": reason.value}
                    for claim, reason in decision.excluded_claims
                ],
            }
        )
        for command in sequence_actuation(decision, self.actuated):
            def describe(record: dict, _cmd=command) -> None:
                record["session"] = _cmd.session
                record["action"] = _cmd.action.value
                record["issue_order"] = _cmd.issue_order

            self.network.send(
                MessageKind.ACTUATION, self.master_id, command.target, command, now, describe
            )
        self.queue.schedule(now + self.scenario.settle_interval, ActuationTick(self.master_id, state.id))

    def _on_tick(self, now: SimTime, event: ActuationTick) -> None:
        state = self.state
        if state is None or event.session != state.id:
            raise ProtocolError(f"settle tick for session {event.session} fired out of order")
        mark_closed(state, now)
        self.emit({"t": now, "ev": "session_close", "session": state.id})
        if state.id < self.scenario.sessions:
            self._open_next(now)

    # -- event dispatch ---------------------------------------------------

    def _on_delivery(self, now: SimTime, delivery: Delivery) -> None:
        message: Message = delivery.message
        self.emit(
            {
                "t": now,
                "ev": "deliver",
                "kind": message.kind.value,
                "src": message.src,
                "dst": delivery.recipient,
                "seq": message.seq,
                "sent_at": message.sent_at,
            }
        )
        self.network.note_delivered()
        if message.kind is MessageKind.SESSION_START:
            self.agents[delivery.recipient].on_session_start(now, message.payload)
        elif message.kind is MessageKind.CLAIM:
            if delivery.recipient != self.master_id:
                raise ProtocolError("claim delivered to a non-master node")
            self._on_claim(now, message.payload)
        elif message.kind is MessageKind.ACTUATION:
            self.agents[delivery.recipient].on_actuation(now, message.payload)
        else:
            raise ProtocolError(f"unhandled message kind {message.kind!r}")


def run_once(
    scenario: Scenario,
    semantics: AggregationSemantics,
    seed: int | None = None,
    truth_mode: str = "fixed",
    collect_trace: bool = True,
    trace_stream=None,
) -> tuple[list[dict] | None, RunMetrics]:
    """Run one scenario to quiescence; returns (trace records, metrics).

    With collect_trace=False the records are metered and discarded as they
    stream, keeping memory flat for large Monte Carlo runs. If trace_stream
    is given, records are additionally serialized to it line by line.
    """
    errors = validate_scenario(scenario)
    if errors:
        raise ScenarioValidationError(errors)
    if seed is None:
        seed = scenario.network.seed

    collector = MetricsCollector()
    sinks: list = [collector.feed]
    records: list[dict] | None = None
    if collect_trace:
        records = []
        sinks.append(records.append)
    if trace_stream is not None:
        sinks.append(lambda record: trace_stream.write(dumps_record(record) + "\n"))

    sim = Simulation(scenario, semantics, seed, truth_mode, sinks)
    sim.run()

    metrics = collector.metrics
    if metrics.stops + metrics.gos != metrics.decisions:
        raise ProtocolError("metrics do not conserve: stops + gos != decisions")
    return records, metrics


@dataclass
class SweepRow:
    """Aggregate outcomes for one semantics across all sweep seeds."""

    semantics: str
    seeds: int
    decisions: int
    stops: int
    gos: int
    false_go_count: int
    false_stop_count: int
    error_rate: float


@dataclass
class SweepResult:
    """Comparison table plus the shared per-node counterfactual baselines."""

    rows: list[SweepRow]
    solo_error_rates: dict[NodeId, float]
    files: list[Path]


def _metrics_records(scenario_name: str, semantics: str, seed: int, metrics: RunMetrics) -> list[dict]:
    head = {"scenario": scenario_name, "semantics": semantics, "seed": seed}
    records = []
    for name in ("decisions", "stops", "gos", "false_go_count", "false_stop_count"):
        records.append({**head, "metric": name, "value": getattr(metrics, name)})
    records.append({**head, "metric": "error_rate", "value": metrics.error_rate})
    for reason, count in sorted(metrics.exclusions.items()):
        records.append({**head, "metric": "exclusions", "reason": reason, "value": count})
    for node in sorted(metrics.solo):
        stats = metrics.solo[node]
        records.append(
            {
                **head,
                "metric": "solo_error_rate",
                "node": node,
                "claims": stats.claims,
                "errors": stats.errors,
                "value": stats.error_rate,
            }
        )
    return records


def run_sweep(
    scenario: Scenario,
    semantics_list: list[AggregationSemantics],
    seeds: int,
    truth_mode: str = "fixed",
    out_dir: str | Path | None = None,
    scenario_name: str = "scenario",
) -> SweepResult:
    """Monte Carlo comparison of semantics over seed values 0..seeds-1.

    Per-run metrics go to newline-delimited record files and the comparison
    table to summary.csv when out_dir is given. Sense substreams are keyed
    by (seed, node, session), never by semantics, so all arms of one seed
    score the same perception draws.
    """
    if seeds < 1:
        raise ValueError(f"seeds must be >= 1, got {seeds}")
    if not semantics_list:
        raise ValueError("at least one semantics is required")

    out_path: Path | None = None
    files: list[Path] = []
    if out_dir is not None:
        out_path = Path(out_dir)
        out_path.mkdir(parents=True, exist_ok=True)

    rows: list[SweepRow] = []
    solo_claims: dict[NodeId, int] = {}
    solo_errors: dict[NodeId, int] = {}
    first_semantics = True
    for semantics in sorted(semantics_list, key=lambda s: s.value):
        totals = {"decisions": 0, "stops": 0, "gos": 0, "false_go_count": 0, "false_stop_count": 0}
        for seed in range(seeds):
            _, metrics = run_once(
                scenario, semantics, seed=seed, truth_mode=truth_mode, collect_trace=False
            )
            for name in totals:
                totals[name] += getattr(metrics, name)
            if first_semantics:
                # Identical across arms by construction; meter one arm only.
                for node, stats in metrics.solo.items():
                    solo_claims[node] = solo_claims.get(node, 0) + stats.claims
                    solo_errors[node] = solo_errors.get(node, 0) + stats.errors
            if out_path is not None:
                name = f"{scenario_name}__{semantics.value}__seed{seed}.metrics.ndjson"
                target = out_path / name
                with target.open("w", encoding="utf-8") as handle:
                    for record in _metrics_records(scenario_name, semantics.value, seed, metrics):
                        handle.write(dumps_record(record) + "\n")
                files.append(target)
        first_semantics = False
        wrong = totals["false_go_count"] + totals["false_stop_count"]
        rows.append(
            SweepRow(
                semantics=semantics.value,
                seeds=seeds,
                decisions=totals["decisions"],
                stops=totals["stops"],
                gos=totals["gos"],
                false_go_count=totals["false_go_count"],
                false_stop_count=totals["false_stop_count"],
                error_rate=wrong / totals["decisions"] if totals["decisions"] else 0.0,
            )
        )

    solo_rates = {
        node: (solo_errors[node] / solo_claims[node] if solo_claims[node] else 0.0)
        for node in sorted(solo_claims)
    }

    if out_path is not None:
        summary = out_path / "summary.csv"
        with summary.open("w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(
                [
                    "semantics",
                    "seeds",
                    "decisions",
                    "stops",
                    "gos",
                    "false_go_count",
                    "false_stop_count",
                    "error_rate",
                ]
            )
            for row in rows:
                writer.writerow(
                    [
                        row.semantics,
                        row.seeds,
                        row.decisions,
                        row.stops,
                        row.gos,
                        row.false_go_count,
                        row.false_stop_count,
                        f"{row.error_rate:.6f}",
                    ]
                )
        files.append(summary)

    return SweepResult(rows=rows, solo_error_rates=solo_rates, files=files)
