"""Outcome measurements accumulated while a simulation runs.

The engine feeds this builder from live node callbacks; the test suite
recomputes the same numbers from the event log alone, so the two paths
cross-check each other. All times are integer microseconds of sim time.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class ClientMetrics:
    time_to_first_disconnect_us: int | None = None
    total_downtime_us: int = 0
    reconnect_attempts: int = 0
    reconnect_successes: int = 0

    def to_dict(self) -> dict:
        return {
            "time_to_first_disconnect_us": self.time_to_first_disconnect_us,
            "total_downtime_us": self.total_downtime_us,
            "reconnect_attempts": self.reconnect_attempts,
            "reconnect_successes": self.reconnect_successes,
        }


@dataclass
class BotMetrics:
    deauth_frames_sent: int = 0
    beacons_sent: int = 0

    def to_dict(self) -> dict:
        return {
            "deauth_frames_sent": self.deauth_frames_sent,
            "beacons_sent": self.beacons_sent,
        }


@dataclass
class DiscoveryMetrics:
    true_client_count: int = 0
    discovered_count: int = 0
    recall: float | None = None

    def to_dict(self) -> dict:
        return {
            "true_client_count": self.true_client_count,
            "discovered_count": self.discovered_count,
            "recall": self.recall,
        }


@dataclass
class AttackMetrics:
    start_us: int
    deadline_us: int
    target_bssid: str
    target_ssid: str

    def to_dict(self) -> dict:
        return {
            "start_us": self.start_us,
            "deadline_us": self.deadline_us,
            "target_bssid": self.target_bssid,
            "target_ssid": self.target_ssid,
        }


@dataclass
class Metrics:
    horizon_us: int
    per_client: dict[str, ClientMetrics]
    per_bot: dict[str, BotMetrics]
    discovery: DiscoveryMetrics | None
    attack: AttackMetrics | None

    def to_dict(self) -> dict:
        return {
            "horizon_us": self.horizon_us,
            "per_client": {mac: m.to_dict() for mac, m in sorted(self.per_client.items())},
            "per_bot": {mac: m.to_dict() for mac, m in sorted(self.per_bot.items())},
            "discovery": self.discovery.to_dict() if self.discovery else None,
            "attack": self.attack.to_dict() if self.attack else None,
        }


@dataclass
class _ClientTrack:
    metrics: ClientMetrics = field(default_factory=ClientMetrics)
    ever_connected: bool = False
    connects: int = 0
    down_since_us: int | None = None


class StatsBuilder:
    """Collects raw observations and folds them into a Metrics document.

    Definitions: downtime is the total time a client spends disconnected
    after its first ever association; a reconnect success is any association
    after the first; time to first disconnect is measured from the first
    attack dispatch.
    """

    def __init__(self) -> None:
        self._clients: dict[str, _ClientTrack] = {}
        self._bots: dict[str, BotMetrics] = {}
        self._first_attack_us: int | None = None
        self._attack: AttackMetrics | None = None
        self._discovery: DiscoveryMetrics | None = None

    def register_client(self, mac: str) -> None:
        self._clients.setdefault(mac, _ClientTrack())

    def register_bot(self, mac: str) -> None:
        self._bots.setdefault(mac, BotMetrics())

    def client_connected(self, mac: str, t_us: int) -> None:
        track = self._clients[mac]
        if track.down_since_us is not None:
            track.metrics.total_downtime_us += t_us - track.down_since_us
            track.down_since_us = None
        track.connects += 1
        if track.connects > 1:
            track.metrics.reconnect_successes += 1
        track.ever_connected = True

    def client_disconnected(self, mac: str, t_us: int) -> None:
        track = self._clients[mac]
        track.down_since_us = t_us
        m = track.metrics
        if (m.time_to_first_disconnect_us is None
                and self._first_attack_us is not None
                and t_us >= self._first_attack_us):
            m.time_to_first_disconnect_us = t_us - self._first_attack_us

    def client_auth_attempt(self, mac: str, reconnect: bool) -> None:
        if reconnect:
            self._clients[mac].metrics.reconnect_attempts += 1

    def bot_sent(self, mac: str, kind: str, count: int = 1) -> None:
        m = self._bots[mac]
        if kind == "deauth":
            m.deauth_frames_sent += count
        elif kind == "beacon":
            m.beacons_sent += count

    def attack_started(self, t_us: int, deadline_us: int,
                       target_bssid: str, target_ssid: str) -> None:
        if self._first_attack_us is None:
            self._first_attack_us = t_us
        self._attack = AttackMetrics(start_us=t_us, deadline_us=deadline_us,
                                     target_bssid=target_bssid, target_ssid=target_ssid)

    def discovery_started(self, true_client_count: int) -> None:
        self._discovery = DiscoveryMetrics(true_client_count=true_client_count)

    def discovery_complete(self, discovered: list[str]) -> None:
        if self._discovery is None:
            self._discovery = DiscoveryMetrics()
        d = self._discovery
        d.discovered_count = len(discovered)
        if d.true_client_count > 0:
            d.recall = d.discovered_count / d.true_client_count

    def live_downtime_us(self, mac: str, now_us: int) -> int:
        """Downtime so far including any currently open episode."""
        track = self._clients.get(mac)
        if track is None:
            return 0
        total = track.metrics.total_downtime_us
        if track.down_since_us is not None:
            total += now_us - track.down_since_us
        return total

    def finalize(self, horizon_us: int) -> Metrics:
        per_client: dict[str, ClientMetrics] = {}
        for mac, track in self._clients.items():
            if track.down_since_us is not None:
                track.metrics.total_downtime_us += horizon_us - track.down_since_us
                track.down_since_us = None
            per_client[mac] = track.metrics
        return Metrics(horizon_us=horizon_us, per_client=per_client,
                       per_bot=dict(self._bots), discovery=self._discovery,
                       attack=self._attack)
