"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines.
"""

from __future__ import annotations

import json
import random
import time
from contextlib import contextmanager

import pytest

from deauthsim import (
    AttackCommand,
    Channel,
    MacAddress,
    ScanCommand,
    TaskPacket,
    decode_frame,
    decode_task,
    encode_frame,
    encode_task,
    event_log_digest,
    make_deauth,
    make_fake_beacon,
    run,
    run_scripted,
)
from deauthsim.frames import AssocRequest, AssocResponse, AuthRequest, AuthResponse, Beacon, Data

from conftest import (
    AP2_MAC,
    AP_MAC,
    BOT_MACS,
    CLIENT_MACS,
    ap_node,
    bot_node,
    build_scenario,
    client_node,
    handler_node,
    suppression_scenario,
)
from oracle import recompute_metrics

S = 1_000_000


@contextmanager
def criterion(number: int, summary: str):
    try:
        yield
    except BaseException:
        print(f"\n[acceptance] criterion {number}: FAIL  ({summary})")
        raise
    print(f"\n[acceptance] criterion {number}: PASS  ({summary})")


def random_mac(rng: random.Random, unicast=True) -> MacAddress:
    octets = bytearray(rng.randrange(256) for _ in range(6))
    if unicast:
        octets[0] &= 0xFE
    return MacAddress(bytes(octets))


def random_frame(rng: random.Random):
    kind = rng.randrange(7)
    a1, a2, bssid = (random_mac(rng) for _ in range(3))
    common = dict(duration=rng.randrange(0x10000), seq=rng.randrange(0x1000))
    ssid = "".join(rng.choice("abcXYZ019_-") for _ in range(rng.randint(1, 32)))
    if kind == 0:
        return Beacon(addr2=bssid, addr3=bssid, ssid=ssid,
                      ds_channel=Channel(rng.randint(1, 13)),
                      beacon_interval_tu=rng.randrange(0x10000),
                      capabilities=rng.randrange(0x10000),
                      timestamp=rng.randrange(2**64), **common)
    if kind == 1:
        return make_fake_beacon(ssid, rng)
    if kind == 2:
        frame = make_deauth(bssid, a1, rng.randrange(0x10000))
        return frame
    if kind == 3:
        return AuthRequest(addr1=a1, addr2=a2, addr3=bssid, **common)
    if kind == 4:
        return AuthResponse(addr1=a1, addr2=a2, addr3=bssid,
                            status=rng.randrange(0x10000), **common)
    if kind == 5:
        return AssocRequest(addr1=a1, addr2=a2, addr3=bssid, ssid=ssid, **common)
    return Data(addr1=a1, addr2=a2, addr3=bssid, port=rng.randrange(0x10000),
                payload=bytes(rng.randrange(256) for _ in range(rng.randrange(32))),
                **common)


def random_task(rng: random.Random) -> TaskPacket:
    ssid = "".join(rng.choice("abcXYZ019 _-") for _ in range(rng.randint(1, 32)))
    return TaskPacket(
        channel=Channel(rng.randint(1, 13)),
        duration_s=rng.randint(1, 99_999_999),
        ssid=ssid,
        ap_mac=random_mac(rng),
        client_macs=tuple(random_mac(rng) for _ in range(rng.randrange(6))),
    )


def test_criterion_1_codec_roundtrips():
    with criterion(1, "10k frame + 10k task codec round-trips under 10 s"):
        started = time.monotonic()
        rng = random.Random(0xC0DEC)
        for _ in range(10_000):
            frame = random_frame(rng)
            assert decode_frame(encode_frame(frame)) == frame
        for _ in range(10_000):
            task = random_task(rng)
            assert decode_task(encode_task(task)) == task
        reference = TaskPacket(channel=Channel(6), duration_s=60, ssid="TestNet",
                               ap_mac=MacAddress.parse(AP_MAC),
                               client_macs=(MacAddress.parse(CLIENT_MACS[0]),
                                            MacAddress.parse(CLIENT_MACS[1])))
        wire = encode_task(reference)
        assert len(wire) == 70
        assert decode_task(wire) == reference
        elapsed = time.monotonic() - started
        assert elapsed < 10.0, f"codec suite took {elapsed:.1f}s"


def test_criterion_2_suppression():
    with criterion(2, "3 active clients suppressed for the whole 30 s attack"):
        config = suppression_scenario(n_clients=3, n_bots=1, attack_s=30,
                                      horizon_s=60.0)
        started = time.monotonic()
        events, metrics = run(config)
        wall = time.monotonic() - started
        assert wall < 5.0, f"run took {wall:.1f}s"

        assert metrics.discovery.discovered_count == 3
        assert metrics.discovery.recall == 1.0

        attack_start = metrics.attack.start_us
        deadline = metrics.attack.deadline_us
        for mac in CLIENT_MACS:
            m = metrics.per_client[mac]
            assert m.time_to_first_disconnect_us is not None
            assert m.time_to_first_disconnect_us <= 1 * S, \
                f"{mac} took {m.time_to_first_disconnect_us}us to disconnect"

        for mac in CLIENT_MACS:
            reconnects_during = [
                e for e in events
                if e.kind == "connected" and e.node == mac
                and attack_start < e.t_us < deadline]
            assert reconnects_during == [], f"{mac} reconnected mid-attack"
            recovered = [e for e in events
                         if e.kind == "connected" and e.node == mac
                         and deadline <= e.t_us <= deadline + 5 * S]
            assert recovered, f"{mac} did not recover within 5s of the deadline"


def test_criterion_3_standby_evasion():
    idle = "02:00:00:00:00:04"
    with criterion(3, "idle client evades discovery: recall exactly 3/4"):
        nodes = [handler_node(attack_duration_s=30, autoselect="TestNet"),
                 ap_node()]
        nodes += [client_node(mac, rate=2.0) for mac in CLIENT_MACS]
        nodes += [client_node(idle, rate=0.0), bot_node(BOT_MACS[0])]
        config = build_scenario(nodes, horizon_s=60.0)
        events, metrics = run(config)

        assert metrics.discovery.true_client_count == 4
        assert metrics.discovery.discovered_count == 3
        assert metrics.discovery.recall == 0.75
        discovered = next(e for e in events if e.kind == "discovery_complete")
        assert idle not in discovered.detail["clients"]

        deauths_to_idle = [
            e for e in events
            if e.kind == "deliver" and e.node == idle
            and e.detail["frame"]["kind"] == "deauth"]
        assert deauths_to_idle == [], "idle client must never receive a deauth"
        assert metrics.per_client[idle].time_to_first_disconnect_us is None


def test_criterion_4_activity_monotonicity():
    rates = [0.1, 0.5, 2.0, 10.0]
    seeds = list(range(1, 31))
    with criterion(4, "mean discovery recall non-decreasing in activity rate"):
        means = []
        for rate in rates:
            total = 0.0
            for seed in seeds:
                nodes = [handler_node(attack_duration_s=5, autoselect="TestNet"),
                         ap_node()]
                nodes += [client_node(mac, rate=rate)
                          for mac in CLIENT_MACS + ["02:00:00:00:00:04"]]
                nodes += [bot_node(BOT_MACS[0])]
                config = build_scenario(nodes, seed=seed, horizon_s=13.0)
                _, metrics = run(config)
                assert metrics.discovery is not None
                assert metrics.discovery.true_client_count == 4
                total += metrics.discovery.recall
            means.append(total / len(seeds))
        print(f"\n[acceptance] criterion 4 mean recall by rate: "
              f"{dict(zip(rates, [round(m, 3) for m in means]))}")
        assert all(a <= b + 1e-12 for a, b in zip(means, means[1:])), \
            f"recall means not monotone: {means}"
        assert means[0] < means[-1], "recall should grow with activity"


def _bot_emission_schedule(events, macs):
    schedule = {mac: [] for mac in macs}
    for e in events:
        if (e.kind == "transmit" and e.node in schedule
                and e.detail["frame"]["kind"] in ("deauth", "beacon")):
            schedule[e.node].append((e.t_us, e.detail["frame"]["kind"],
                                     e.detail["frame"].get("a1")))
    return schedule


def test_criterion_5_bot_resilience():
    with criterion(5, "losing bots mid-attack leaves survivors untouched"):
        baseline_cfg = suppression_scenario(n_bots=2, attack_s=30, horizon_s=50.0)
        baseline_events, _ = run(baseline_cfg)

        nodes = [handler_node(attack_duration_s=30, autoselect="TestNet"),
                 ap_node()]
        nodes += [client_node(mac) for mac in CLIENT_MACS]
        nodes += [bot_node(BOT_MACS[i]) for i in range(4)]
        for entry in nodes:
            if entry["mac"] in BOT_MACS[2:]:
                entry["off_at_s"] = 27.0  # mid-attack (runs 12.6 .. 42.6)
        removal_cfg = build_scenario(nodes, horizon_s=50.0)
        removal_events, _ = run(removal_cfg)

        survivors = BOT_MACS[:2]
        assert (_bot_emission_schedule(removal_events, survivors)
                == _bot_emission_schedule(baseline_events, survivors)), \
            "survivor emission schedules diverged from the 2-bot baseline"

        # A bot booted out of range never attacks, then joins once moved close.
        far_bot = bot_node(BOT_MACS[0])
        far_bot["position"] = [100_000.0, 0.0]
        far_bot["moves"] = [{"at_s": 20.0, "position": [5.0, 5.0]}]
        nodes = [handler_node(attack_duration_s=10, autoselect="TestNet"),
                 ap_node(), client_node(CLIENT_MACS[0]), far_bot]
        config = build_scenario(nodes, horizon_s=40.0)
        events, metrics = run(config)
        bot_frames = _bot_emission_schedule(events, [BOT_MACS[0]])[BOT_MACS[0]]
        assert bot_frames == [], "out-of-range bot must emit zero attack frames"
        joined = [e for e in events if e.kind == "joined_handler"
                  and e.node == BOT_MACS[0]]
        assert joined and joined[0].t_us > 20 * S, "bot joins after moving in range"


def test_criterion_6_retargeting():
    with criterion(6, "mid-attack retarget flips bots within one send cycle"):
        nodes = [handler_node(), ap_node(),
                 ap_node(mac=AP2_MAC, ssid="Second", channel=11),
                 client_node(CLIENT_MACS[0]),
                 client_node(CLIENT_MACS[1], ssid="Second"),
                 bot_node(BOT_MACS[0])]
        config = build_scenario(nodes, horizon_s=80.0)
        events, metrics = run_scripted(config, [
            (3.0, ScanCommand()),
            (6.0, AttackCommand(bssid=AP_MAC, duration_s=40)),
            (20.0, AttackCommand(bssid=AP2_MAC, duration_s=30)),
        ])
        dispatches = [e for e in events if e.kind == "task_dispatched"
                      and not e.detail["stop"]]
        assert len(dispatches) == 2
        flip = dispatches[1].t_us

        schedule = _bot_emission_schedule(events, [BOT_MACS[0]])[BOT_MACS[0]]
        ap1_deauths = [t for t, kind, a1 in schedule
                       if kind == "deauth" and a1 == CLIENT_MACS[0]]
        ap2_deauths = [t for t, kind, a1 in schedule
                       if kind == "deauth" and a1 == CLIENT_MACS[1]]
        assert ap1_deauths and ap2_deauths
        assert max(ap1_deauths) <= flip + 100_000, \
            "first target still deauthed more than one cycle after retarget"
        assert min(ap2_deauths) >= flip, "second target hit before retarget"

        recovered = [e for e in events if e.kind == "connected"
                     and e.node == CLIENT_MACS[0] and e.t_us > flip]
        assert recovered, "first AP's client must recover after the retarget"
        assert metrics.attack.target_bssid == AP2_MAC


def test_criterion_7_determinism_and_metric_consistency():
    with criterion(7, "same seed, same digest; metrics match event-log recompute"):
        config = suppression_scenario(horizon_s=60.0)
        events_a, metrics_a = run(config)
        events_b, metrics_b = run(config)
        assert event_log_digest(events_a) == event_log_digest(events_b)
        assert metrics_a.to_dict() == metrics_b.to_dict()

        recomputed = recompute_metrics(
            [json.loads(e.to_json()) for e in events_a], metrics_a.horizon_us)
        assert recomputed == metrics_a.to_dict()
