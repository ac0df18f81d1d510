"""Deterministic discrete-event loop, command handling, and run entry points.

A single integer-microsecond clock orders everything; ties are broken by a
monotonically increasing scheduling sequence number, so a (config, seed)
pair fully determines the event log. Per-node RNG streams are derived from
the scenario seed and the node's MAC, so adding or removing one node never
perturbs another node's randomness.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field
from random import Random
from typing import Iterable, Optional, Union

from .frames import Channel, Frame, summarize
from .medium import Medium, Position, RadioMode, RadioState
from .metrics import Metrics, StatsBuilder
from .nodes import BotNode, ClientNode, HandlerNode, Node, TestBenchNode, build_node
from .scenario import ClientSpec, HandlerSpec, ScenarioConfig
from .simtime import us_from_ms, us_from_s

# Live mode advances the clock in fixed steps; queued operator commands are
# applied at step boundaries.
LIVE_STEP_US = us_from_ms(10)


@dataclass(frozen=True)
class EventRecord:
    t_us: int
    seq: int
    node: str
    kind: str
    detail: dict

    def to_json(self) -> str:
        return json.dumps({"t_us": self.t_us, "seq": self.seq, "node": self.node,
                           "kind": self.kind, "detail": self.detail},
                          sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class ScanCommand:
    name = "scan"


@dataclass(frozen=True)
class AttackCommand:
    bssid: str
    duration_s: int
    name = "attack"


@dataclass(frozen=True)
class StopCommand:
    name = "stop"


Command = Union[ScanCommand, AttackCommand, StopCommand]


@dataclass(order=True)
class _Entry:
    # Operator commands sort after every simulation event at the same
    # instant (late=1): they are "applied at the boundary", exactly as the
    # live server drains its queue, no matter when they were scheduled.
    t_us: int
    late: int
    seq: int
    item: object = field(compare=False)


class _Delivery:
    __slots__ = ("node_id", "frame")

    def __init__(self, node_id: str, frame: Frame):
        self.node_id = node_id
        self.frame = frame


class _TimerFire:
    __slots__ = ("node_id", "tag", "data", "token")

    def __init__(self, node_id: str, tag: str, data, token: int):
        self.node_id = node_id
        self.tag = tag
        self.data = data
        self.token = token


class _CommandApply:
    __slots__ = ("command",)

    def __init__(self, command: Command):
        self.command = command


class _PowerOff:
    __slots__ = ("node_id",)

    def __init__(self, node_id: str):
        self.node_id = node_id


class _Move:
    __slots__ = ("node_id", "position")

    def __init__(self, node_id: str, position: Position):
        self.node_id = node_id
        self.position = position


class NodeCtx:
    """The only door a node has to the rest of the simulation."""

    def __init__(self, sim: "Simulation", node_id: str):
        self._sim = sim
        self._node_id = node_id

    def now(self) -> int:
        return self._sim.now_us

    @property
    def stats(self) -> StatsBuilder:
        return self._sim.stats

    def transmit(self, frame: Frame) -> None:
        self._sim._transmit(self._node_id, frame)

    def set_timer(self, delay_us: int, tag: str, data=None) -> int:
        return self._sim._set_timer(self._node_id, delay_us, tag, data)

    def cancel_timer(self, token: int) -> None:
        self._sim._cancelled.add(token)

    def set_radio(self, channel: Channel, mode: RadioMode) -> None:
        self._sim.medium.set_radio(self._node_id, RadioState(channel, mode))

    def log(self, kind: str, **detail) -> None:
        self._sim._log(self._node_id, kind, detail)


class Simulation:
    """One scenario instance: build, start, step, finalize."""

    def __init__(self, config: ScenarioConfig):
        self.config = config
        self.now_us = 0
        self.horizon_us = us_from_s(config.horizon_s)
        self.medium = Medium(range_m=config.range_m,
                             loss_probability=config.loss_probability,
                             rng=Random(f"{config.seed}/medium"))
        self.stats = StatsBuilder()
        self.events: list[EventRecord] = []
        self.nodes: dict[str, Node] = {}
        self.powered: dict[str, bool] = {}
        self._heap: list[_Entry] = []
        self._sched_seq = 0
        self._log_seq = 0
        self._timer_token = 0
        self._cancelled: set[int] = set()
        self._started = False
        self._autoselect_fired = False
        self._event_listeners: list = []

        for spec in config.nodes:
            node = build_node(spec, Random(f"{config.seed}/node/{spec.mac}"))
            node.attach(NodeCtx(self, node.node_id))
            self.nodes[node.node_id] = node
            self.powered[node.node_id] = True
            self.medium.register(node.node_id, spec.mac, spec.position)
            if isinstance(node, ClientNode):
                self.stats.register_client(node.node_id)
            elif isinstance(node, BotNode):
                self.stats.register_bot(node.node_id)

        self.handler: HandlerNode = next(
            n for n in self.nodes.values() if isinstance(n, HandlerNode))

    # -- scheduling ----------------------------------------------------------

    def _schedule(self, t_us: int, item) -> None:
        self._sched_seq += 1
        late = 1 if isinstance(item, _CommandApply) else 0
        heapq.heappush(self._heap, _Entry(t_us, late, self._sched_seq, item))

    def _set_timer(self, node_id: str, delay_us: int, tag: str, data) -> int:
        self._timer_token += 1
        token = self._timer_token
        self._schedule(self.now_us + max(0, delay_us),
                       _TimerFire(node_id, tag, data, token))
        return token

    def _transmit(self, node_id: str, frame: Frame) -> None:
        channel = self.medium.radio_of(node_id).channel
        self._log(node_id, "transmit", {"frame": summarize(frame),
                                        "channel": int(channel)})
        result = self.medium.transmit(node_id, frame, at=self.now_us)
        for receiver, when in result.deliveries:
            self._schedule(when, _Delivery(receiver, frame))
        for receiver in result.dropped:
            self._log(node_id, "drop", {"to": receiver, "frame": summarize(frame)})

    def _log(self, node_id: str, kind: str, detail: dict) -> None:
        record = EventRecord(t_us=self.now_us, seq=self._log_seq, node=node_id,
                             kind=kind, detail=detail)
        self._log_seq += 1
        self.events.append(record)
        for listener in self._event_listeners:
            listener(record)
        if kind == "discovery_started":
            # Ground truth for recall is the engine's to know, not the
            # handler's: snapshot every station really associated to the
            # target right now (clients and a bench in station mode alike).
            target = detail["bssid"]
            true_count = sum(
                1 for n in self.nodes.values()
                if isinstance(n, (ClientNode, TestBenchNode))
                and n.link.is_connected and str(n.link.bssid) == target)
            self.stats.discovery_started(true_count)
        elif kind == "discovery_complete":
            self.stats.discovery_complete(detail["clients"])
        elif kind == "scan_complete":
            self._on_scan_complete()

    def add_event_listener(self, fn) -> None:
        self._event_listeners.append(fn)

    def _on_scan_complete(self) -> None:
        spec = self.handler.cfg
        if spec.autoselect is None or self._autoselect_fired:
            return
        match = next((e for e in self.handler.inventory
                      if e["ssid"] == spec.autoselect), None)
        if match is None:
            self._log(self.handler.node_id, "autoselect_failed",
                      {"ssid": spec.autoselect})
            return
        self._autoselect_fired = True
        self._schedule(self.now_us, _CommandApply(
            AttackCommand(bssid=str(match["bssid"]),
                          duration_s=spec.attack_duration_s)))

    # -- lifecycle -----------------------------------------------------------

    def start(self) -> None:
        if self._started:
            raise RuntimeError("simulation already started")
        self._started = True
        for spec in self.config.nodes:
            node = self.nodes[spec.node_id]
            self._log(node.node_id, "boot",
                      {"kind": node.kind, "x": spec.position.x, "y": spec.position.y})
            node.on_start()
        for spec in self.config.nodes:
            if spec.off_at_s is not None:
                self._schedule(us_from_s(spec.off_at_s), _PowerOff(spec.node_id))
            for move in spec.moves:
                self._schedule(us_from_s(move.at_s), _Move(spec.node_id, move.position))
        if self.handler.cfg.autoselect is not None:
            self.inject_command_at(us_from_s(self.handler.cfg.autoselect_at_s),
                                   ScanCommand())

    def inject_command_at(self, t_us: int, command: Command) -> None:
        self._schedule(t_us, _CommandApply(command))

    def step_until(self, t_limit_us: int) -> None:
        limit = min(t_limit_us, self.horizon_us)
        while self._heap and self._heap[0].t_us <= limit:
            entry = heapq.heappop(self._heap)
            self.now_us = entry.t_us
            self._dispatch(entry.item)
        self.now_us = max(self.now_us, limit)

    def _dispatch(self, item) -> None:
        if isinstance(item, _TimerFire):
            if item.token in self._cancelled:
                self._cancelled.discard(item.token)
                return
            if self.powered[item.node_id]:
                self.nodes[item.node_id].on_timer(item.tag, item.data)
        elif isinstance(item, _Delivery):
            if self.powered[item.node_id]:
                self._log(item.node_id, "deliver", {"frame": summarize(item.frame)})
                self.nodes[item.node_id].on_frame(item.frame)
        elif isinstance(item, _CommandApply):
            cmd = item.command
            if isinstance(cmd, ScanCommand):
                self._log(self.handler.node_id, "command", {"name": "scan"})
                self.handler.command_scan()
            elif isinstance(cmd, AttackCommand):
                self._log(self.handler.node_id, "command",
                          {"name": "attack", "bssid": cmd.bssid,
                           "duration_s": cmd.duration_s})
                self.handler.command_attack(cmd.bssid, cmd.duration_s)
            elif isinstance(cmd, StopCommand):
                self._log(self.handler.node_id, "command", {"name": "stop"})
                self.handler.command_stop()
        elif isinstance(item, _PowerOff):
            self._log(item.node_id, "power_off", {})
            self.powered[item.node_id] = False
            self.medium.set_radio(item.node_id,
                                  RadioState(Channel(1), RadioMode.OFF))
        elif isinstance(item, _Move):
            self._log(item.node_id, "move",
                      {"x": item.position.x, "y": item.position.y})
            self.medium.set_position(item.node_id, item.position)

    def finalize(self) -> Metrics:
        return self.stats.finalize(self.horizon_us)

    # -- live status ----------------------------------------------------------

    def snapshot(self) -> dict:
        """Immutable status view used by the HTTP API and the console."""
        handler = self.handler.status()
        clients = []
        for node in self.nodes.values():
            if isinstance(node, ClientNode):
                st = node.status()
                st["downtime_s"] = self.stats.live_downtime_us(
                    node.node_id, self.now_us) / 1e6
                clients.append(st)
        bots = [n.status() for n in self.nodes.values() if isinstance(n, BotNode)]
        return {
            "sim_time_us": self.now_us,
            "sim_time_s": self.now_us / 1e6,
            "horizon_us": self.horizon_us,
            "running": self.now_us < self.horizon_us,
            "phase": handler["phase"],
            "scanned": handler["scanned"],
            "target": handler["target"],
            "aps": handler["aps"],
            "clients": clients,
            "bots": bots,
        }


def run(config: ScenarioConfig) -> tuple[list[EventRecord], Metrics]:
    """Batch run to the horizon; autoselect drives the attack if configured."""
    sim = Simulation(config)
    sim.start()
    sim.step_until(sim.horizon_us)
    return sim.events, sim.finalize()


def run_scripted(config: ScenarioConfig,
                 commands: Iterable[tuple[float, Command]] = ()
                 ) -> tuple[list[EventRecord], Metrics]:
    """Run with operator commands injected at fixed sim-times.

    Commands are applied at the next live-step boundary, exactly as the HTTP
    server applies them, so a scripted run reproduces a live session.
    """
    sim = Simulation(config)
    sim.start()
    for t_s, command in commands:
        t_us = us_from_s(t_s)
        boundary = ((t_us + LIVE_STEP_US - 1) // LIVE_STEP_US) * LIVE_STEP_US
        sim.inject_command_at(boundary, command)
    sim.step_until(sim.horizon_us)
    return sim.events, sim.finalize()


def event_log_digest(events: list[EventRecord]) -> str:
    import hashlib

    digest = hashlib.sha256()
    for record in events:
        digest.update(record.to_json().encode())
        digest.update(b"\n")
    return digest.hexdigest()


def write_outputs(events: list[EventRecord], metrics: Metrics,
                  events_path: Optional[str] = None,
                  metrics_path: Optional[str] = None) -> None:
    """Write the event log (JSON lines) and metrics (single JSON document)."""
    if events_path is not None:
        try:
            with open(events_path, "w", encoding="utf-8") as fh:
                for record in events:
                    fh.write(record.to_json())
                    fh.write("\n")
        except OSError as exc:
            raise OSError(f"writing events to {events_path}: {exc}") from exc
    if metrics_path is not None:
        try:
            with open(metrics_path, "w", encoding="utf-8") as fh:
                json.dump(metrics.to_dict(), fh, indent=2, sort_keys=True)
                fh.write("\n")
        except OSError as exc:
            raise OSError(f"writing metrics to {metrics_path}: {exc}") from exc
