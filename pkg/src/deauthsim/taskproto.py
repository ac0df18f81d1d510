"""Plain-text wire codec for the handler-to-bot attack task datagram.

The packet is pure ASCII, laid out as consecutive fields each introduced by
a fixed 2-digit zero-padded decimal length, except the MAC addresses which
need no length because their text form is always 17 characters:

    [2: len][channel][2: len][duration s][2: len][client count]
    [2: len][ssid][17: AP MAC][17: client MAC] ... [17: client MAC]

Bots rebuild the exact client list the handler captured, in order, from
this text.
"""

from __future__ import annotations

from dataclasses import dataclass

from .frames import Channel, FrameError, MacAddress

# UDP port the handler broadcasts tasks on and the bots listen to.
TASK_PORT = 7777

MAC_TEXT_LEN = 17


class MalformedTask(ValueError):
    """Task bytes that cannot be decoded back into a packet."""


@dataclass(frozen=True)
class TaskPacket:
    """One attack assignment: where, how long, and whom to kick."""

    channel: Channel
    duration_s: int
    ssid: str
    ap_mac: MacAddress
    client_macs: tuple[MacAddress, ...] = ()

    def __post_init__(self) -> None:
        if not isinstance(self.channel, Channel):
            object.__setattr__(self, "channel", Channel(self.channel))
        if self.duration_s < 1:
            raise ValueError(f"attack duration must be >= 1 s, got {self.duration_s}")
        raw = self.ssid.encode("ascii", errors="strict") if self.ssid.isascii() else None
        if raw is None or not 1 <= len(raw) <= 32:
            raise ValueError("task SSID must be 1..32 ASCII bytes")
        if not self.ap_mac.is_unicast:
            raise ValueError("AP MAC must be unicast")
        object.__setattr__(self, "client_macs", tuple(self.client_macs))
        for mac in self.client_macs:
            if not mac.is_unicast:
                raise ValueError(f"client MAC {mac} must be unicast")


def _len_prefixed(text: str) -> str:
    if len(text) > 99:
        raise ValueError(f"field of {len(text)} characters exceeds the 2-digit length prefix")
    return f"{len(text):02d}{text}"


def encode_task(task: TaskPacket) -> bytes:
    """Serialize a task packet to its ASCII wire form."""
    parts = [
        _len_prefixed(str(int(task.channel))),
        _len_prefixed(str(task.duration_s)),
        _len_prefixed(str(len(task.client_macs))),
        _len_prefixed(task.ssid),
        str(task.ap_mac),
    ]
    parts.extend(str(mac) for mac in task.client_macs)
    return "".join(parts).encode("ascii")


class _Reader:
    def __init__(self, data: bytes):
        try:
            self.text = data.decode("ascii")
        except UnicodeDecodeError as exc:
            raise MalformedTask("task packet is not ASCII") from exc
        self.pos = 0

    def take(self, n: int, what: str) -> str:
        if self.pos + n > len(self.text):
            raise MalformedTask(f"{what} runs past the end of the packet")
        chunk = self.text[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def take_prefixed(self, what: str) -> str:
        prefix = self.take(2, f"{what} length")
        if not prefix.isdigit():
            raise MalformedTask(f"{what} length {prefix!r} is not 2 decimal digits")
        return self.take(int(prefix), what)

    def take_int(self, what: str) -> int:
        text = self.take_prefixed(what)
        if not text.isdigit():
            raise MalformedTask(f"{what} {text!r} is not a decimal number")
        return int(text)

    def take_mac(self, what: str) -> MacAddress:
        text = self.take(MAC_TEXT_LEN, what)
        try:
            return MacAddress.parse(text)
        except FrameError as exc:
            raise MalformedTask(f"{what} {text!r} is not a MAC address") from exc

    @property
    def exhausted(self) -> bool:
        return self.pos == len(self.text)


def decode_task(data: bytes) -> TaskPacket:
    """Parse task bytes; inverse of encode_task on its image."""
    r = _Reader(data)
    channel_num = r.take_int("channel")
    duration = r.take_int("duration")
    client_count = r.take_int("client count")
    ssid = r.take_prefixed("SSID")
    ap_mac = r.take_mac("AP MAC")
    clients = tuple(r.take_mac(f"client MAC {i + 1}") for i in range(client_count))
    if not r.exhausted:
        raise MalformedTask(f"{len(r.text) - r.pos} trailing bytes after the client list")
    try:
        return TaskPacket(channel=Channel(channel_num), duration_s=duration,
                          ssid=ssid, ap_mac=ap_mac, client_macs=clients)
    except (FrameError, ValueError) as exc:
        raise MalformedTask(str(exc)) from exc
