"""Scenario file loading and validation.

A scenario is a JSON document declaring the world (seed, radio range, loss,
horizon) and one entry per node. Field names are snake_case; times are
seconds, positions are meters. Unknown keys are rejected so typos fail loudly
instead of silently running a different experiment.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .frames import Channel, FrameError, MacAddress
from .medium import Position

DEFAULT_HANDLER_SSID = "esp_ap"

# Timing defaults, all chosen so that client decision points stay aligned
# with the bots' send cycle (see nodes.BotNode for why that matters).
DEFAULT_BEACON_INTERVAL_TU = 100
DEFAULT_CYCLE_MS = 100
DEFAULT_BACKOFF_S = 1.0
DEFAULT_AUTH_TIMEOUT_S = 0.5
DEFAULT_AUTH_RETRIES = 3
DEFAULT_DWELL_MS = 200
DEFAULT_CAPTURE_WINDOW_S = 5.0
DEFAULT_ATTACK_DURATION_S = 30
DEFAULT_AUTOSELECT_AT_S = 5.0
DEFAULT_BENCH_TICK_S = 1.0
DEFAULT_BENCH_FALLBACK_S = 10.0


class ScenarioError(ValueError):
    pass


class ParseError(ScenarioError):
    pass


class ValidationError(ScenarioError):
    pass


@dataclass(frozen=True)
class Move:
    at_s: float
    position: Position


@dataclass(frozen=True)
class NodeSpec:
    mac: MacAddress
    position: Position
    off_at_s: float | None = None
    moves: tuple[Move, ...] = ()

    @property
    def node_id(self) -> str:
        return str(self.mac)


@dataclass(frozen=True)
class ApSpec(NodeSpec):
    ssid: str = "net"
    channel: Channel = Channel(1)
    beacon_interval_tu: int = DEFAULT_BEACON_INTERVAL_TU
    echo_uplink: bool = True
    downlink_rate: float = 0.0


@dataclass(frozen=True)
class ClientSpec(NodeSpec):
    target_ssid: str = "net"
    activity_rate: float = 0.0
    backoff_s: float = DEFAULT_BACKOFF_S
    auth_timeout_s: float = DEFAULT_AUTH_TIMEOUT_S
    auth_retries: int = DEFAULT_AUTH_RETRIES
    dwell_ms: int = DEFAULT_DWELL_MS


@dataclass(frozen=True)
class BotSpec(NodeSpec):
    handler_ssid: str = DEFAULT_HANDLER_SSID
    cycle_ms: int = DEFAULT_CYCLE_MS
    auth_timeout_s: float = DEFAULT_AUTH_TIMEOUT_S
    auth_retries: int = DEFAULT_AUTH_RETRIES
    dwell_ms: int = DEFAULT_DWELL_MS


@dataclass(frozen=True)
class HandlerSpec(NodeSpec):
    ssid: str = DEFAULT_HANDLER_SSID
    channel: Channel = Channel(1)
    beacon_interval_tu: int = DEFAULT_BEACON_INTERVAL_TU
    attack_duration_s: int = DEFAULT_ATTACK_DURATION_S
    capture_window_s: float = DEFAULT_CAPTURE_WINDOW_S
    dwell_ms: int = DEFAULT_DWELL_MS
    autoselect: str | None = None
    autoselect_at_s: float = DEFAULT_AUTOSELECT_AT_S


@dataclass(frozen=True)
class TestBenchSpec(NodeSpec):
    __test__ = False  # keep pytest from collecting this as a test class

    target_ssid: str = "net"
    mode: str = "auto"  # auto | station | local_ap
    channel: Channel = Channel(1)
    tick_s: float = DEFAULT_BENCH_TICK_S
    fallback_after_s: float = DEFAULT_BENCH_FALLBACK_S
    auth_timeout_s: float = DEFAULT_AUTH_TIMEOUT_S
    auth_retries: int = DEFAULT_AUTH_RETRIES
    dwell_ms: int = DEFAULT_DWELL_MS


@dataclass(frozen=True)
class ScenarioConfig:
    seed: int
    nodes: tuple[NodeSpec, ...]
    range_m: float = 400.0
    loss_probability: float = 0.0
    horizon_s: float = 60.0
    time_scale: float = 1.0

    @property
    def handler(self) -> HandlerSpec:
        return next(n for n in self.nodes if isinstance(n, HandlerSpec))


_COMMON_KEYS = {"kind", "mac", "position", "off_at_s", "moves"}
_KIND_KEYS = {
    "ap": _COMMON_KEYS | {"ssid", "channel", "beacon_interval_tu", "echo_uplink",
                          "downlink_rate"},
    "client": _COMMON_KEYS | {"target_ssid", "activity_rate", "backoff_s",
                              "auth_timeout_s", "auth_retries", "dwell_ms"},
    "bot": _COMMON_KEYS | {"handler_ssid", "cycle_ms", "auth_timeout_s",
                           "auth_retries", "dwell_ms"},
    "handler": _COMMON_KEYS | {"ssid", "channel", "beacon_interval_tu",
                               "attack_duration_s", "capture_window_s", "dwell_ms",
                               "autoselect", "autoselect_at_s"},
    "test_bench": _COMMON_KEYS | {"target_ssid", "mode", "channel", "tick_s",
                                  "fallback_after_s", "auth_timeout_s",
                                  "auth_retries", "dwell_ms"},
}
_TOP_KEYS = {"seed", "nodes", "range_m", "loss_probability", "horizon_s", "time_scale"}


def _require_ascii_ssid(ssid: object, where: str) -> str:
    if not isinstance(ssid, str) or not ssid.isascii() or not 1 <= len(ssid) <= 32:
        raise ValidationError(f"{where}: SSID must be 1..32 ASCII characters, got {ssid!r}")
    return ssid


def _parse_position(raw: object, where: str) -> Position:
    if (not isinstance(raw, (list, tuple)) or len(raw) != 2
            or not all(isinstance(v, (int, float)) for v in raw)):
        raise ValidationError(f"{where}: position must be [x, y] meters")
    try:
        return Position(float(raw[0]), float(raw[1]))
    except ValueError as exc:
        raise ValidationError(f"{where}: {exc}") from exc


def _parse_channel(raw: object, where: str) -> Channel:
    if not isinstance(raw, int) or isinstance(raw, bool):
        raise ValidationError(f"{where}: channel must be an integer 1..13")
    try:
        return Channel(raw)
    except FrameError as exc:
        raise ValidationError(f"{where}: {exc}") from exc


def _parse_moves(raw: object, where: str) -> tuple[Move, ...]:
    if not isinstance(raw, list):
        raise ValidationError(f"{where}: moves must be a list")
    moves = []
    for i, entry in enumerate(raw):
        if not isinstance(entry, dict) or set(entry) != {"at_s", "position"}:
            raise ValidationError(f"{where}: moves[{i}] needs exactly at_s and position")
        at_s = entry["at_s"]
        if not isinstance(at_s, (int, float)) or at_s < 0:
            raise ValidationError(f"{where}: moves[{i}].at_s must be a nonneg number")
        moves.append(Move(float(at_s), _parse_position(entry["position"], where)))
    return tuple(moves)


def _number(entry: dict, key: str, where: str, default: float, *,
            minimum: float = 0.0) -> float:
    value = entry.get(key, default)
    if not isinstance(value, (int, float)) or isinstance(value, bool) or value < minimum:
        raise ValidationError(f"{where}: {key} must be a number >= {minimum}")
    return float(value)


def _integer(entry: dict, key: str, where: str, default: int, *, minimum: int = 0) -> int:
    value = entry.get(key, default)
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise ValidationError(f"{where}: {key} must be an integer >= {minimum}")
    return value


def _parse_node(entry: object, index: int) -> NodeSpec:
    where = f"nodes[{index}]"
    if not isinstance(entry, dict):
        raise ValidationError(f"{where}: node entry must be an object")
    kind = entry.get("kind")
    if kind not in _KIND_KEYS:
        raise ValidationError(f"{where}: unknown node kind {kind!r}")
    unknown = set(entry) - _KIND_KEYS[kind]
    if unknown:
        raise ValidationError(f"{where}: unknown keys {sorted(unknown)} for kind {kind}")
    if "mac" not in entry or "position" not in entry:
        raise ValidationError(f"{where}: mac and position are required")
    try:
        mac = MacAddress.parse(entry["mac"])
    except (FrameError, TypeError) as exc:
        raise ValidationError(f"{where}: {exc}") from exc
    if not mac.is_unicast:
        raise ValidationError(f"{where}: node MAC {mac} must be unicast")
    common = dict(
        mac=mac,
        position=_parse_position(entry["position"], where),
        off_at_s=None,
        moves=_parse_moves(entry.get("moves", []), where),
    )
    if "off_at_s" in entry:
        off = entry["off_at_s"]
        if not isinstance(off, (int, float)) or off < 0:
            raise ValidationError(f"{where}: off_at_s must be a nonneg number")
        common["off_at_s"] = float(off)

    if kind == "ap":
        return ApSpec(
            **common,
            ssid=_require_ascii_ssid(entry.get("ssid", "net"), where),
            channel=_parse_channel(entry.get("channel", 1), where),
            beacon_interval_tu=_integer(entry, "beacon_interval_tu", where,
                                        DEFAULT_BEACON_INTERVAL_TU, minimum=1),
            echo_uplink=bool(entry.get("echo_uplink", True)),
            downlink_rate=_number(entry, "downlink_rate", where, 0.0),
        )
    if kind == "client":
        return ClientSpec(
            **common,
            target_ssid=_require_ascii_ssid(entry.get("target_ssid", "net"), where),
            activity_rate=_number(entry, "activity_rate", where, 0.0),
            backoff_s=_number(entry, "backoff_s", where, DEFAULT_BACKOFF_S),
            auth_timeout_s=_number(entry, "auth_timeout_s", where, DEFAULT_AUTH_TIMEOUT_S),
            auth_retries=_integer(entry, "auth_retries", where, DEFAULT_AUTH_RETRIES),
            dwell_ms=_integer(entry, "dwell_ms", where, DEFAULT_DWELL_MS, minimum=1),
        )
    if kind == "bot":
        return BotSpec(
            **common,
            handler_ssid=_require_ascii_ssid(entry.get("handler_ssid",
                                                       DEFAULT_HANDLER_SSID), where),
            cycle_ms=_integer(entry, "cycle_ms", where, DEFAULT_CYCLE_MS, minimum=1),
            auth_timeout_s=_number(entry, "auth_timeout_s", where, DEFAULT_AUTH_TIMEOUT_S),
            auth_retries=_integer(entry, "auth_retries", where, DEFAULT_AUTH_RETRIES),
            dwell_ms=_integer(entry, "dwell_ms", where, DEFAULT_DWELL_MS, minimum=1),
        )
    if kind == "handler":
        autoselect = entry.get("autoselect")
        if autoselect is not None:
            autoselect = _require_ascii_ssid(autoselect, where)
        return HandlerSpec(
            **common,
            ssid=_require_ascii_ssid(entry.get("ssid", DEFAULT_HANDLER_SSID), where),
            channel=_parse_channel(entry.get("channel", 1), where),
            beacon_interval_tu=_integer(entry, "beacon_interval_tu", where,
                                        DEFAULT_BEACON_INTERVAL_TU, minimum=1),
            attack_duration_s=_integer(entry, "attack_duration_s", where,
                                       DEFAULT_ATTACK_DURATION_S, minimum=1),
            capture_window_s=_number(entry, "capture_window_s", where,
                                     DEFAULT_CAPTURE_WINDOW_S),
            dwell_ms=_integer(entry, "dwell_ms", where, DEFAULT_DWELL_MS, minimum=1),
            autoselect=autoselect,
            autoselect_at_s=_number(entry, "autoselect_at_s", where,
                                    DEFAULT_AUTOSELECT_AT_S),
        )
    mode = entry.get("mode", "auto")
    if mode not in ("auto", "station", "local_ap"):
        raise ValidationError(f"{where}: mode must be auto, station, or local_ap")
    return TestBenchSpec(
        **common,
        target_ssid=_require_ascii_ssid(entry.get("target_ssid", "net"), where),
        mode=mode,
        channel=_parse_channel(entry.get("channel", 1), where),
        tick_s=_number(entry, "tick_s", where, DEFAULT_BENCH_TICK_S, minimum=0.001),
        fallback_after_s=_number(entry, "fallback_after_s", where,
                                 DEFAULT_BENCH_FALLBACK_S),
        auth_timeout_s=_number(entry, "auth_timeout_s", where, DEFAULT_AUTH_TIMEOUT_S),
        auth_retries=_integer(entry, "auth_retries", where, DEFAULT_AUTH_RETRIES),
        dwell_ms=_integer(entry, "dwell_ms", where, DEFAULT_DWELL_MS, minimum=1),
    )


def load_scenario(text: str) -> ScenarioConfig:
    """Parse and validate a scenario JSON document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"scenario is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("scenario must be a JSON object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ValidationError(f"unknown top-level keys {sorted(unknown)}")
    if "nodes" not in doc or not isinstance(doc["nodes"], list):
        raise ValidationError("scenario needs a nodes list")

    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ValidationError("seed must be an integer")

    loss = doc.get("loss_probability", 0.0)
    if not isinstance(loss, (int, float)) or not 0.0 <= float(loss) <= 1.0:
        raise ValidationError(f"loss_probability {loss!r} outside [0, 1]")

    range_m = doc.get("range_m", 400.0)
    if not isinstance(range_m, (int, float)) or not math.isfinite(range_m) or range_m < 0:
        raise ValidationError(f"range_m {range_m!r} must be a nonneg finite number")

    horizon = doc.get("horizon_s", 60.0)
    if not isinstance(horizon, (int, float)) or not horizon > 0:
        raise ValidationError(f"horizon_s {horizon!r} must be > 0")

    time_scale = doc.get("time_scale", 1.0)
    if not isinstance(time_scale, (int, float)) or not time_scale > 0:
        raise ValidationError(f"time_scale {time_scale!r} must be > 0")

    nodes = tuple(_parse_node(entry, i) for i, entry in enumerate(doc["nodes"]))

    seen: set[str] = set()
    for node in nodes:
        if node.node_id in seen:
            raise ValidationError(f"duplicate node MAC {node.node_id}")
        seen.add(node.node_id)
    handlers = [n for n in nodes if isinstance(n, HandlerSpec)]
    if len(handlers) != 1:
        raise ValidationError(f"scenario needs exactly one handler, got {len(handlers)}")
    if handlers[0].autoselect is not None:
        named = handlers[0].autoselect
        if not any(isinstance(n, ApSpec) and n.ssid == named for n in nodes):
            raise ValidationError(f"autoselect names SSID {named!r} but no AP declares it")

    return ScenarioConfig(seed=seed, nodes=nodes, range_m=float(range_m),
                          loss_probability=float(loss), horizon_s=float(horizon),
                          time_scale=float(time_scale))


def load_scenario_file(path: str) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return load_scenario(fh.read())
