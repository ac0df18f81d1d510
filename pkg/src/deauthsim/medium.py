"""Channelized broadcast radio medium with range, loss, and promiscuous mode.

Propagation is a flat disc: every powered receiver on the transmitter's
channel within the configured radius is eligible, each delivery is then
independently dropped with the configured loss probability. There is no
contention, capture, or corruption; the single fixed propagation delay
keeps event ordering deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from random import Random
from typing import NamedTuple

from .frames import Channel, Frame, MacAddress

DEFAULT_RANGE_M = 400.0  # nominal open-air reach of the little 2.4 GHz modules
PROPAGATION_DELAY_US = 1


class MediumError(Exception):
    pass


class RadioOff(MediumError):
    """Transmit attempted while the sender's radio is off."""


class UnknownNode(MediumError):
    pass


class RadioMode(Enum):
    OFF = "off"
    RECEIVE = "receive"
    PROMISCUOUS = "promiscuous"


@dataclass(frozen=True)
class Position:
    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"position must be finite, got ({self.x}, {self.y})")

    def distance_to(self, other: "Position") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class RadioState:
    channel: Channel
    mode: RadioMode


class TransmitResult(NamedTuple):
    deliveries: list[tuple[str, int]]  # (receiver node id, delivery sim-time us)
    dropped: list[str]


@dataclass
class _Slot:
    mac: MacAddress
    position: Position
    radio: RadioState


class Medium:
    def __init__(self, *, range_m: float = DEFAULT_RANGE_M,
                 loss_probability: float = 0.0, rng: Random | None = None,
                 propagation_delay_us: int = PROPAGATION_DELAY_US):
        if not 0.0 <= loss_probability <= 1.0:
            raise ValueError(f"loss probability {loss_probability} outside [0, 1]")
        self.range_m = range_m
        self.loss_probability = loss_probability
        self.propagation_delay_us = propagation_delay_us
        self._rng = rng if rng is not None else Random(0)
        self._slots: dict[str, _Slot] = {}

    def register(self, node_id: str, mac: MacAddress, position: Position) -> None:
        if node_id in self._slots:
            raise ValueError(f"node {node_id} already registered")
        self._slots[node_id] = _Slot(mac=mac, position=position,
                                     radio=RadioState(Channel(1), RadioMode.OFF))

    def _slot(self, node_id: str) -> _Slot:
        try:
            return self._slots[node_id]
        except KeyError:
            raise UnknownNode(node_id) from None

    def set_radio(self, node_id: str, state: RadioState) -> None:
        self._slot(node_id).radio = state

    def radio_of(self, node_id: str) -> RadioState:
        return self._slot(node_id).radio

    def set_position(self, node_id: str, position: Position) -> None:
        self._slot(node_id).position = position

    def in_range(self, a: str, b: str) -> bool:
        # Boundary is inclusive: exactly at the radius still hears.
        return self._slot(a).position.distance_to(self._slot(b).position) <= self.range_m

    def _admits(self, slot: _Slot, frame: Frame) -> bool:
        if slot.radio.mode is RadioMode.PROMISCUOUS:
            return True
        if slot.radio.mode is RadioMode.RECEIVE:
            return frame.addr1 == slot.mac or frame.addr1.is_multicast
        return False

    def transmit(self, sender: str, frame: Frame, at: int) -> TransmitResult:
        """Fan a frame out to every eligible receiver, applying loss.

        Receivers are visited in registration order so the loss draws, and
        therefore the whole delivery schedule, are reproducible for a seed.
        """
        tx = self._slot(sender)
        if tx.radio.mode is RadioMode.OFF:
            raise RadioOff(f"{sender} transmitted with its radio off")
        deliveries: list[tuple[str, int]] = []
        dropped: list[str] = []
        when = at + self.propagation_delay_us
        for node_id, slot in self._slots.items():
            if node_id == sender:
                continue
            if slot.radio.mode is RadioMode.OFF:
                continue
            if slot.radio.channel != tx.radio.channel:
                continue
            if tx.position.distance_to(slot.position) > self.range_m:
                continue
            if not self._admits(slot, frame):
                continue
            if self.loss_probability > 0.0 and self._rng.random() < self.loss_probability:
                dropped.append(node_id)
            else:
                deliveries.append((node_id, when))
        return TransmitResult(deliveries, dropped)
