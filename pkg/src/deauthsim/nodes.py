"""Behavioral state machines for the five actor kinds.

Every node is a single-owner object driven by the engine's event loop
through three entry points (on_start, on_frame, on_timer) and talks back
only through its NodeCtx: transmit, timers, radio tuning, logging, stats.
Nothing here touches another node directly; every cross-node effect rides
the medium.
"""

from __future__ import annotations

from random import Random
from typing import Optional

from .frames import (
    AddressClass,
    AssocRequest,
    AssocResponse,
    AuthRequest,
    AuthResponse,
    BROADCAST,
    Beacon,
    Channel,
    Data,
    Deauth,
    Frame,
    MacAddress,
    classify_address,
    make_deauth,
    make_fake_beacon,
    summarize,
)
from .medium import RadioMode
from .scenario import (
    ApSpec,
    BotSpec,
    ClientSpec,
    HandlerSpec,
    NodeSpec,
    TestBenchSpec,
)
from .simtime import TU_US, us_from_ms, us_from_s
from .taskproto import MalformedTask, TaskPacket, TASK_PORT, decode_task, encode_task

MIN_CHANNEL = 1
MAX_CHANNEL = 13


class Node:
    kind = "node"

    def __init__(self, spec: NodeSpec, rng: Random):
        self.spec = spec
        self.mac: MacAddress = spec.mac
        self.rng = rng
        self.ctx = None  # type: ignore[assignment]  # bound by the engine
        self._seq = 0
        self.phase = "idle"

    @property
    def node_id(self) -> str:
        return str(self.mac)

    def attach(self, ctx) -> None:
        self.ctx = ctx

    def next_seq(self) -> int:
        seq = self._seq
        self._seq = (self._seq + 1) & 0xFFF
        return seq

    def set_phase(self, phase: str) -> None:
        if phase != self.phase:
            self.ctx.log("phase", frm=self.phase, to=phase)
            self.phase = phase

    def on_start(self) -> None:
        pass

    def on_frame(self, frame: Frame) -> None:
        pass

    def on_timer(self, tag: str, data=None) -> None:
        pass

    def status(self) -> dict:
        return {"mac": self.node_id, "kind": self.kind, "phase": self.phase}


class ApBehavior:
    """Plain infrastructure AP: beacons, open auth, association, downlink.

    Shared by the victim APs, the handler's own AP, and the test bench in
    local-AP mode. `pause` stops emissions while the owner borrows the radio
    for scanning; the beacon timer keeps running so the beacon lattice is
    unchanged when emissions resume.
    """

    def __init__(self, node: Node, *, ssid: str, channel: Channel,
                 beacon_interval_tu: int = 100, echo_uplink: bool = True,
                 downlink_rate: float = 0.0):
        self.node = node
        self.ssid = ssid
        self.channel = channel
        self.beacon_interval_us = beacon_interval_tu * TU_US
        self.beacon_interval_tu = beacon_interval_tu
        self.echo_uplink = echo_uplink
        self.downlink_rate = downlink_rate
        self.associated: dict[MacAddress, int] = {}
        self._next_aid = 1
        self.paused = False

    @property
    def bssid(self) -> MacAddress:
        return self.node.mac

    def start(self) -> None:
        self.node.ctx.set_radio(self.channel, RadioMode.RECEIVE)
        self._emit_beacon()
        self.node.ctx.set_timer(self.beacon_interval_us, "ap_beacon")
        if self.downlink_rate > 0:
            self.node.ctx.set_timer(us_from_s(1.0 / self.downlink_rate), "ap_downlink")

    def pause(self) -> None:
        self.paused = True

    def resume(self) -> None:
        self.paused = False
        self.node.ctx.set_radio(self.channel, RadioMode.RECEIVE)

    def _emit_beacon(self) -> None:
        ctx = self.node.ctx
        ctx.transmit(Beacon(addr2=self.bssid, addr3=self.bssid, ssid=self.ssid,
                            ds_channel=self.channel, timestamp=ctx.now(),
                            beacon_interval_tu=self.beacon_interval_tu,
                            seq=self.node.next_seq()))

    def on_timer(self, tag: str) -> bool:
        if tag == "ap_beacon":
            if not self.paused:
                self._emit_beacon()
            self.node.ctx.set_timer(self.beacon_interval_us, "ap_beacon")
            return True
        if tag == "ap_downlink":
            if not self.paused:
                for client in self.associated:
                    self.node.ctx.transmit(Data(addr1=client, addr2=self.bssid,
                                                addr3=self.bssid, seq=self.node.next_seq()))
            self.node.ctx.set_timer(us_from_s(1.0 / self.downlink_rate), "ap_downlink")
            return True
        return False

    def handle_frame(self, frame: Frame) -> bool:
        if frame.addr1 != self.bssid:
            return False
        ctx = self.node.ctx
        if isinstance(frame, AuthRequest):
            ctx.transmit(AuthResponse(addr1=frame.addr2, addr2=self.bssid,
                                      addr3=self.bssid, status=0,
                                      seq=self.node.next_seq()))
            return True
        if isinstance(frame, AssocRequest):
            if frame.addr2 not in self.associated:
                self.associated[frame.addr2] = self._next_aid
                self._next_aid += 1
            aid = self.associated[frame.addr2]
            ctx.log("station_joined", station=str(frame.addr2), aid=aid)
            ctx.transmit(AssocResponse(addr1=frame.addr2, addr2=self.bssid,
                                       addr3=self.bssid, status=0, association_id=aid,
                                       seq=self.node.next_seq()))
            return True
        if isinstance(frame, Deauth):
            if frame.addr2 in self.associated:
                del self.associated[frame.addr2]
                ctx.log("station_left", station=str(frame.addr2))
            return True
        if isinstance(frame, Data):
            if self.echo_uplink and frame.addr2 in self.associated:
                ctx.transmit(Data(addr1=frame.addr2, addr2=self.bssid, addr3=self.bssid,
                                  port=frame.port, payload=frame.payload,
                                  seq=self.node.next_seq()))
            return True
        return False


class StationLink:
    """Scan / authenticate / associate machinery shared by all stations.

    Scanning sweeps channels 1..13 passively, caching the freshest beacon
    that matches the target SSID, and acts on the cache only when a sweep
    completes. The cache is overwritten by every matching beacon heard in
    any state, genuine or forged alike; that is the whole attack surface
    the fake-beacon flood exploits.
    """

    def __init__(self, node: Node, target_ssid: str, *, dwell_us: int,
                 auth_timeout_us: int, max_retries: int):
        self.node = node
        self.target_ssid = target_ssid
        self.dwell_us = dwell_us
        self.auth_timeout_us = auth_timeout_us
        self.max_retries = max_retries
        self.phase = "idle"  # idle | scanning | authenticating | associating | connected
        self.cache: Optional[tuple[MacAddress, Channel]] = None
        self.bssid: Optional[MacAddress] = None
        self.association_id: Optional[int] = None
        self._pending: Optional[tuple[MacAddress, Channel]] = None
        self._scan_channel = 0
        self._retries = 0
        self._timer: Optional[int] = None

    @property
    def is_connected(self) -> bool:
        return self.phase == "connected"

    def _cancel_timer(self) -> None:
        if self._timer is not None:
            self.node.ctx.cancel_timer(self._timer)
            self._timer = None

    def start_scan(self) -> None:
        self._cancel_timer()
        self._retries = 0
        self._pending = None
        self.phase = "scanning"
        self._scan_channel = MIN_CHANNEL
        self.node.ctx.set_radio(Channel(self._scan_channel), RadioMode.RECEIVE)
        self._timer = self.node.ctx.set_timer(self.dwell_us, "link_dwell")

    def begin_join(self) -> None:
        """Fresh join attempt from the cache; falls back to a scan."""
        self._retries = 0
        if self.cache is None:
            self.start_scan()
        else:
            self._join(self.cache)

    def _join(self, entry: tuple[MacAddress, Channel]) -> None:
        self._cancel_timer()
        bssid, channel = entry
        self._pending = entry
        self.phase = "authenticating"
        self.node.ctx.set_radio(channel, RadioMode.RECEIVE)
        self.node.on_auth_attempt()
        self.node.ctx.transmit(AuthRequest(addr1=bssid, addr2=self.node.mac,
                                           addr3=bssid, seq=self.node.next_seq()))
        self._timer = self.node.ctx.set_timer(self.auth_timeout_us, "link_handshake")

    def _handshake_failed(self) -> None:
        self._retries += 1
        if self._retries <= self.max_retries and self.cache is not None:
            self._join(self.cache)
        else:
            self.start_scan()

    def drop(self) -> None:
        """Forget the association (after a deauth); keeps the beacon cache."""
        self._cancel_timer()
        self.bssid = None
        self.association_id = None
        self._pending = None
        self.phase = "idle"

    def on_frame(self, frame: Frame) -> bool:
        if isinstance(frame, Beacon):
            if frame.ssid == self.target_ssid:
                self.cache = (frame.bssid, frame.ds_channel)
            return True
        if self.phase == "authenticating" and isinstance(frame, AuthResponse):
            if self._pending and frame.addr2 == self._pending[0]:
                if frame.status == 0:
                    self.phase = "associating"
                    self._cancel_timer()
                    self.node.ctx.transmit(AssocRequest(addr1=self._pending[0],
                                                        addr2=self.node.mac,
                                                        addr3=self._pending[0],
                                                        ssid=self.target_ssid,
                                                        seq=self.node.next_seq()))
                    self._timer = self.node.ctx.set_timer(self.auth_timeout_us,
                                                          "link_handshake")
                else:
                    self._handshake_failed()
            return True
        if self.phase == "associating" and isinstance(frame, AssocResponse):
            if self._pending and frame.addr2 == self._pending[0]:
                if frame.status == 0:
                    self._cancel_timer()
                    self.bssid = self._pending[0]
                    self.association_id = frame.association_id
                    self._pending = None
                    self._retries = 0
                    self.phase = "connected"
                    self.node.on_link_connected()
                else:
                    self._handshake_failed()
            return True
        return False

    def on_timer(self, tag: str) -> bool:
        if tag == "link_dwell":
            self._timer = None
            if self.phase != "scanning":
                return True
            if self._scan_channel < MAX_CHANNEL:
                self._scan_channel += 1
                self.node.ctx.set_radio(Channel(self._scan_channel), RadioMode.RECEIVE)
                self._timer = self.node.ctx.set_timer(self.dwell_us, "link_dwell")
            elif self.cache is not None:
                self._retries = 0
                self._join(self.cache)
            else:
                # Nothing heard anywhere; keep sweeping until the target shows up.
                self.start_scan()
            return True
        if tag == "link_handshake":
            self._timer = None
            if self.phase in ("authenticating", "associating"):
                self._handshake_failed()
            return True
        return False


class ApNode(Node):
    kind = "ap"

    def __init__(self, spec: ApSpec, rng: Random):
        super().__init__(spec, rng)
        self.ap = ApBehavior(self, ssid=spec.ssid, channel=spec.channel,
                             beacon_interval_tu=spec.beacon_interval_tu,
                             echo_uplink=spec.echo_uplink,
                             downlink_rate=spec.downlink_rate)

    def on_start(self) -> None:
        self.set_phase("serving")
        self.ap.start()

    def on_frame(self, frame: Frame) -> None:
        self.ap.handle_frame(frame)

    def on_timer(self, tag: str, data=None) -> None:
        self.ap.on_timer(tag)

    def status(self) -> dict:
        return {**super().status(), "ssid": self.ap.ssid,
                "channel": int(self.ap.channel),
                "stations": [str(m) for m in self.ap.associated]}


class ClientNode(Node):
    kind = "client"

    def __init__(self, spec: ClientSpec, rng: Random):
        super().__init__(spec, rng)
        self.cfg = spec
        self.link = StationLink(self, spec.target_ssid,
                                dwell_us=us_from_ms(spec.dwell_ms),
                                auth_timeout_us=us_from_s(spec.auth_timeout_s),
                                max_retries=spec.auth_retries)
        self.ever_connected = False
        self._uplink_timer: Optional[int] = None

    def on_start(self) -> None:
        self.set_phase("scanning")
        self.link.start_scan()

    # -- link callbacks ----------------------------------------------------

    def on_auth_attempt(self) -> None:
        reconnect = self.ever_connected and not self.link.is_connected
        self.ctx.log("auth_attempt", bssid=str(self.link.cache[0]) if self.link.cache
                     else None, reconnect=reconnect)
        self.ctx.stats.client_auth_attempt(self.node_id, reconnect)
        self.set_phase("authenticating")

    def on_link_connected(self) -> None:
        self.ever_connected = True
        self.set_phase("connected")
        self.ctx.log("connected", bssid=str(self.link.bssid),
                     aid=self.link.association_id)
        self.ctx.stats.client_connected(self.node_id, self.ctx.now())
        if self.cfg.activity_rate > 0:
            self._arm_uplink()

    # -- event handling ----------------------------------------------------

    def _arm_uplink(self) -> None:
        delay = max(1, us_from_s(self.rng.expovariate(self.cfg.activity_rate)))
        self._uplink_timer = self.ctx.set_timer(delay, "client_uplink")

    def _disconnect(self, bssid: MacAddress) -> None:
        self.ctx.log("disconnected", bssid=str(bssid), cause="deauth")
        self.ctx.stats.client_disconnected(self.node_id, self.ctx.now())
        self.link.drop()
        if self._uplink_timer is not None:
            self.ctx.cancel_timer(self._uplink_timer)
            self._uplink_timer = None
        self.set_phase("backoff")
        self.ctx.set_timer(us_from_s(self.cfg.backoff_s), "client_backoff")

    def on_frame(self, frame: Frame) -> None:
        if isinstance(frame, Deauth):
            if self.link.is_connected and frame.addr2 == self.link.bssid:
                self._disconnect(frame.addr2)
            return
        if self.link.on_frame(frame):
            if self.link.phase == "scanning" and self.phase not in ("scanning", "backoff"):
                self.set_phase("scanning")
            elif self.link.phase == "associating":
                self.set_phase("associating")

    def on_timer(self, tag: str, data=None) -> None:
        if tag == "client_backoff":
            self.set_phase("scanning")
            self.link.begin_join()
            return
        if tag == "client_uplink":
            if self.link.is_connected:
                self.ctx.transmit(Data(addr1=self.link.bssid, addr2=self.mac,
                                       addr3=self.link.bssid, seq=self.next_seq()))
                self._arm_uplink()
            return
        if self.link.on_timer(tag):
            if self.link.phase == "scanning" and self.phase != "backoff":
                self.set_phase("scanning")

    def status(self) -> dict:
        return {**super().status(),
                "connected": self.link.is_connected,
                "bssid": str(self.link.bssid) if self.link.bssid else None,
                "target_ssid": self.cfg.target_ssid}


class BotNode(Node):
    kind = "bot"

    def __init__(self, spec: BotSpec, rng: Random):
        super().__init__(spec, rng)
        self.cfg = spec
        self.link = StationLink(self, spec.handler_ssid,
                                dwell_us=us_from_ms(spec.dwell_ms),
                                auth_timeout_us=us_from_s(spec.auth_timeout_s),
                                max_retries=spec.auth_retries)
        self.cycle_us = us_from_ms(spec.cycle_ms)
        self.task: Optional[TaskPacket] = None
        self.deauth_frames: list[Deauth] = []
        self.attack_deadline_us = 0
        self.deauths_sent = 0
        self.beacons_sent = 0
        self._cycle_timer: Optional[int] = None
        self._volley_timer: Optional[int] = None

    def on_start(self) -> None:
        self.set_phase("boot_scan")
        self.link.start_scan()

    def on_auth_attempt(self) -> None:
        self.set_phase("joining_handler")

    def on_link_connected(self) -> None:
        self.set_phase("awaiting_task")
        self.ctx.log("joined_handler", bssid=str(self.link.bssid))

    def _cancel_attack_timers(self) -> None:
        for attr in ("_cycle_timer", "_volley_timer"):
            token = getattr(self, attr)
            if token is not None:
                self.ctx.cancel_timer(token)
                setattr(self, attr, None)

    def _adopt_task(self, task: TaskPacket) -> None:
        self._cancel_attack_timers()
        self.task = task
        self.deauth_frames = [make_deauth(task.ap_mac, client)
                              for client in task.client_macs]
        self.attack_deadline_us = self.ctx.now() + us_from_s(task.duration_s)
        self.ctx.set_radio(task.channel, RadioMode.RECEIVE)
        self.ctx.log("task_received", channel=int(task.channel),
                     duration_s=task.duration_s, ssid=task.ssid,
                     ap=str(task.ap_mac), clients=[str(m) for m in task.client_macs])
        self.set_phase("attacking")
        self.ctx.log("attack_started", deadline_us=self.attack_deadline_us,
                     target=str(task.ap_mac))
        self._volley()

    def _volley(self) -> None:
        if self.ctx.now() >= self.attack_deadline_us:
            self._end_attack()
            return
        # The poisoned beacon leaves one microsecond ahead of the deauth
        # volley: any client whose reconnect timer lands on this cycle reads
        # its cache after the forgery arrives, never between deauth and
        # forgery. Suppression during the attack depends on this ordering.
        self.ctx.transmit(make_fake_beacon(self.task.ssid, self.rng))
        self.beacons_sent += 1
        self.ctx.stats.bot_sent(self.node_id, "beacon")
        if self.deauth_frames:
            self._volley_timer = self.ctx.set_timer(1, "bot_deauth_volley")
        self._cycle_timer = self.ctx.set_timer(self.cycle_us, "bot_cycle")

    def _end_attack(self) -> None:
        self._cancel_attack_timers()
        self.ctx.log("attack_ended", target=str(self.task.ap_mac))
        self.task = None
        self.deauth_frames = []
        self.set_phase("joining_handler")
        self.link.begin_join()

    def on_frame(self, frame: Frame) -> None:
        if (isinstance(frame, Data) and frame.port == TASK_PORT
                and self.phase in ("awaiting_task", "attacking")):
            try:
                task = decode_task(frame.payload)
            except MalformedTask as exc:
                self.ctx.log("task_malformed", error=str(exc))
                return
            self._adopt_task(task)
            return
        self.link.on_frame(frame)

    def on_timer(self, tag: str, data=None) -> None:
        if tag == "bot_cycle":
            self._cycle_timer = None
            if self.phase == "attacking":
                self._volley()
            return
        if tag == "bot_deauth_volley":
            self._volley_timer = None
            if self.phase == "attacking":
                for deauth in self.deauth_frames:
                    self.ctx.transmit(deauth)
                self.deauths_sent += len(self.deauth_frames)
                self.ctx.stats.bot_sent(self.node_id, "deauth", len(self.deauth_frames))
            return
        if self.link.on_timer(tag):
            if self.link.phase == "scanning" and self.phase != "attacking":
                self.set_phase("boot_scan")

    def status(self) -> dict:
        return {**super().status(),
                "frames_sent": self.deauths_sent + self.beacons_sent,
                "deauths_sent": self.deauths_sent,
                "beacons_sent": self.beacons_sent}


class HandlerNode(Node):
    """The single command node: serves its own AP, scans, discovers, tasks."""

    kind = "handler"

    def __init__(self, spec: HandlerSpec, rng: Random):
        super().__init__(spec, rng)
        self.cfg = spec
        self.ap = ApBehavior(self, ssid=spec.ssid, channel=spec.channel,
                             beacon_interval_tu=spec.beacon_interval_tu)
        self.inventory: list[dict] = []
        self.scanned = False
        self.clients_list: list[MacAddress] = []
        self.current_task: Optional[TaskPacket] = None
        self.attack_deadline_us = 0
        self._scan_channel = 0
        self._scan_acc: list[dict] = []
        self._capture: list[MacAddress] = []
        self._pending_attack: Optional[tuple[dict, int]] = None
        self._deadline_timer: Optional[int] = None
        self._resume_phase = "serving"

    def on_start(self) -> None:
        self.set_phase("serving")
        self.ap.start()

    # -- commands (invoked by the engine's command events) ------------------

    def command_scan(self) -> None:
        if self.phase not in ("serving", "attack_running"):
            self.ctx.log("command_rejected", command="scan", reason=f"busy: {self.phase}")
            return
        self._resume_phase = self.phase
        self.set_phase("scanning_aps")
        self.ap.pause()
        self._scan_acc = []
        self._scan_channel = MIN_CHANNEL
        self.ctx.set_radio(Channel(self._scan_channel), RadioMode.RECEIVE)
        self.ctx.set_timer(us_from_ms(self.cfg.dwell_ms), "h_scan_dwell")

    def command_attack(self, bssid: str, duration_s: int) -> None:
        if not self.scanned:
            self.ctx.log("command_rejected", command="attack", reason="no scan yet")
            return
        entry = next((e for e in self.inventory if str(e["bssid"]) == bssid), None)
        if entry is None:
            self.ctx.log("command_rejected", command="attack",
                         reason=f"unknown bssid {bssid}")
            return
        if self.phase not in ("serving", "attack_running"):
            self.ctx.log("command_rejected", command="attack",
                         reason=f"busy: {self.phase}")
            return
        self._pending_attack = (entry, duration_s)
        self.set_phase("discovering_clients")
        self.ap.pause()
        self._capture = []
        self.ctx.set_radio(entry["channel"], RadioMode.PROMISCUOUS)
        self.ctx.log("discovery_started", bssid=str(entry["bssid"]),
                     channel=int(entry["channel"]))
        self.ctx.set_timer(us_from_s(self.cfg.capture_window_s), "h_capture")

    def command_stop(self) -> None:
        if self.current_task is None:
            self.ctx.log("command_rejected", command="stop", reason="no attack running")
            return
        stop_task = TaskPacket(channel=self.current_task.channel, duration_s=1,
                               ssid=self.current_task.ssid,
                               ap_mac=self.current_task.ap_mac)
        self._dispatch(stop_task, stop=True)

    # -- internals -----------------------------------------------------------

    def _dispatch(self, task: TaskPacket, *, stop: bool) -> None:
        payload = encode_task(task)

        def emit() -> None:
            self.ctx.transmit(Data(addr1=BROADCAST, addr2=self.mac, addr3=self.mac,
                                   port=TASK_PORT, payload=payload,
                                   seq=self.next_seq()))

        # Bots attacking right now are tuned to the running task's channel,
        # not to ours, so a superseding task is relayed there first.
        if self.current_task is not None and self.current_task.channel != self.ap.channel:
            self.ctx.set_radio(self.current_task.channel, RadioMode.RECEIVE)
            emit()
        self.ap.resume()
        emit()
        self.ctx.log("task_dispatched", channel=int(task.channel),
                     duration_s=task.duration_s, ssid=task.ssid,
                     ap=str(task.ap_mac),
                     clients=[str(m) for m in task.client_macs], stop=stop)
        if self._deadline_timer is not None:
            self.ctx.cancel_timer(self._deadline_timer)
            self._deadline_timer = None
        if stop:
            self.current_task = None
            self.set_phase("serving")
            return
        self.current_task = task
        self.attack_deadline_us = self.ctx.now() + us_from_s(task.duration_s)
        self.ctx.stats.attack_started(self.ctx.now(), self.attack_deadline_us,
                                      str(task.ap_mac), task.ssid)
        self.set_phase("attack_running")
        self._deadline_timer = self.ctx.set_timer(us_from_s(task.duration_s),
                                                  "h_attack_end")

    def on_frame(self, frame: Frame) -> None:
        if self.phase == "scanning_aps" and isinstance(frame, Beacon):
            if frame.bssid == self.mac:
                return
            entry = {"ssid": frame.ssid, "bssid": frame.bssid,
                     "channel": frame.ds_channel}
            if entry not in self._scan_acc:
                self._scan_acc.append(entry)
            return
        if self.phase == "discovering_clients" and isinstance(frame, Data):
            target = self._pending_attack[0]["bssid"]
            if (frame.addr2 == target
                    and classify_address(frame.addr1) is AddressClass.UNICAST
                    and frame.addr1 not in self._capture):
                self._capture.append(frame.addr1)
            return
        self.ap.handle_frame(frame)

    def on_timer(self, tag: str, data=None) -> None:
        if tag == "h_scan_dwell":
            if self.phase != "scanning_aps":
                return
            if self._scan_channel < MAX_CHANNEL:
                self._scan_channel += 1
                self.ctx.set_radio(Channel(self._scan_channel), RadioMode.RECEIVE)
                self.ctx.set_timer(us_from_ms(self.cfg.dwell_ms), "h_scan_dwell")
                return
            self.inventory = self._scan_acc
            self.scanned = True
            self.ap.resume()
            self.set_phase(self._resume_phase)
            self.ctx.log("scan_complete", aps=[
                {"ssid": e["ssid"], "bssid": str(e["bssid"]),
                 "channel": int(e["channel"])} for e in self.inventory])
            return
        if tag == "h_capture":
            if self.phase != "discovering_clients":
                return
            entry, duration_s = self._pending_attack
            self._pending_attack = None
            self.clients_list = list(self._capture)
            self.ctx.log("discovery_complete",
                         clients=[str(m) for m in self.clients_list])
            task = TaskPacket(channel=entry["channel"], duration_s=duration_s,
                              ssid=entry["ssid"], ap_mac=entry["bssid"],
                              client_macs=tuple(self.clients_list))
            self._dispatch(task, stop=False)
            return
        if tag == "h_attack_end":
            self._deadline_timer = None
            self.current_task = None
            self.ctx.log("attack_window_closed")
            if self.phase == "attack_running":
                self.set_phase("serving")
            else:
                # Deadline hit while scanning/discovering: let that state
                # machine finish and land in serving instead.
                self._resume_phase = "serving"
            return
        self.ap.on_timer(tag)

    def status(self) -> dict:
        target = None
        if self.current_task is not None:
            target = {"bssid": str(self.current_task.ap_mac),
                      "ssid": self.current_task.ssid,
                      "channel": int(self.current_task.channel)}
        return {**super().status(),
                "scanned": self.scanned,
                "aps": [{"ssid": e["ssid"], "bssid": str(e["bssid"]),
                         "channel": int(e["channel"])} for e in self.inventory],
                "target": target,
                "discovered": [str(m) for m in self.clients_list],
                "stations": [str(m) for m in self.ap.associated]}


class TestBenchNode(Node):
    """Connectivity monitor standing in for the hardware bench's display.

    Station mode keeps an association to the predefined AP and logs whether
    it currently holds; if the AP never shows up (auto mode), the bench
    turns itself into a local AP and logs who is connected to it instead.
    """

    kind = "test_bench"
    __test__ = False

    def __init__(self, spec: TestBenchSpec, rng: Random):
        super().__init__(spec, rng)
        self.cfg = spec
        self.mode = "local_ap" if spec.mode == "local_ap" else "station"
        self.link = StationLink(self, spec.target_ssid,
                                dwell_us=us_from_ms(spec.dwell_ms),
                                auth_timeout_us=us_from_s(spec.auth_timeout_s),
                                max_retries=spec.auth_retries)
        self.ap: Optional[ApBehavior] = None
        self.ever_connected = False
        self.reconnect_attempts = 0

    def on_start(self) -> None:
        self.ctx.set_timer(us_from_s(self.cfg.tick_s), "bench_tick")
        if self.mode == "local_ap":
            self._start_local_ap()
        else:
            self.set_phase("station_monitor")
            self.link.start_scan()
            if self.cfg.mode == "auto":
                self.ctx.set_timer(us_from_s(self.cfg.fallback_after_s),
                                   "bench_fallback")

    def _start_local_ap(self) -> None:
        self.mode = "local_ap"
        self.link.drop()
        self.set_phase("local_ap")
        self.ap = ApBehavior(self, ssid=self.cfg.target_ssid, channel=self.cfg.channel)
        self.ap.start()

    def on_auth_attempt(self) -> None:
        if self.ever_connected:
            self.reconnect_attempts += 1

    def on_link_connected(self) -> None:
        self.ever_connected = True
        self.ctx.log("connected", bssid=str(self.link.bssid),
                     aid=self.link.association_id)

    def on_frame(self, frame: Frame) -> None:
        if self.mode == "local_ap":
            self.ap.handle_frame(frame)
            return
        if isinstance(frame, Deauth):
            if self.link.is_connected and frame.addr2 == self.link.bssid:
                self.ctx.log("disconnected", bssid=str(frame.addr2), cause="deauth")
                self.link.drop()
                self.ctx.set_timer(us_from_s(1.0), "bench_backoff")
            return
        self.link.on_frame(frame)

    def on_timer(self, tag: str, data=None) -> None:
        if tag == "bench_tick":
            if self.mode == "station":
                if self.link.is_connected:
                    # Keepalive probe; also what makes the bench discoverable
                    # by the handler, by drawing an echo from the AP.
                    self.ctx.transmit(Data(addr1=self.link.bssid, addr2=self.mac,
                                           addr3=self.link.bssid,
                                           seq=self.next_seq()))
                self.ctx.log("bench_status", mode="station",
                             connected=self.link.is_connected,
                             reconnect_attempts=self.reconnect_attempts)
            else:
                self.ctx.log("bench_status", mode="local_ap",
                             stations=[str(m) for m in self.ap.associated])
            self.ctx.set_timer(us_from_s(self.cfg.tick_s), "bench_tick")
            return
        if tag == "bench_fallback":
            if self.mode == "station" and not self.ever_connected:
                self._start_local_ap()
            return
        if tag == "bench_backoff":
            if self.mode == "station":
                self.link.begin_join()
            return
        if self.mode == "local_ap":
            self.ap.on_timer(tag)
        else:
            self.link.on_timer(tag)

    def status(self) -> dict:
        out = {**super().status(), "mode": self.mode}
        if self.mode == "station":
            out["connected"] = self.link.is_connected
            out["reconnect_attempts"] = self.reconnect_attempts
        else:
            out["stations"] = [str(m) for m in self.ap.associated]
        return out


def build_node(spec: NodeSpec, rng: Random) -> Node:
    if isinstance(spec, ApSpec):
        return ApNode(spec, rng)
    if isinstance(spec, ClientSpec):
        return ClientNode(spec, rng)
    if isinstance(spec, BotSpec):
        return BotNode(spec, rng)
    if isinstance(spec, HandlerSpec):
        return HandlerNode(spec, rng)
    if isinstance(spec, TestBenchSpec):
        return TestBenchNode(spec, rng)
    raise TypeError(f"no node implementation for {type(spec).__name__}")
