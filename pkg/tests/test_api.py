from __future__ import annotations

import json
import time

import pytest
from fastapi.testclient import TestClient

from deauthsim.api import create_app

from conftest import AP_MAC, CLIENT_MACS, suppression_scenario


@pytest.fixture
def client():
    config = suppression_scenario(autoselect=False, horizon_s=120.0,
                                  time_scale=50.0)
    app = create_app(config)
    with TestClient(app) as test_client:
        yield test_client


def wait_for(client, predicate, timeout_s=15.0, what="condition"):
    deadline = time.monotonic() + timeout_s
    while time.monotonic() < deadline:
        snap = client.get("/api/status").json()
        if predicate(snap):
            return snap
        time.sleep(0.05)
    raise AssertionError(f"timed out waiting for {what}; last status: {snap}")


def test_status_before_any_command(client):
    snap = client.get("/api/status").json()
    assert snap["phase"] == "serving"
    assert snap["target"] is None
    assert snap["scanned"] is False
    assert {c["mac"] for c in snap["clients"]} == set(CLIENT_MACS)
    assert all(not c["connected"] or True for c in snap["clients"])


def test_attack_before_scan_is_409(client):
    response = client.post("/api/attack", json={"bssid": AP_MAC, "duration_s": 10})
    assert response.status_code == 409


def test_scan_then_attack_workflow(client):
    assert client.post("/api/scan").json() == {"ok": True}
    snap = wait_for(client, lambda s: s["scanned"], what="scan to finish")
    aps = client.get("/api/aps").json()
    assert {ap["bssid"] for ap in aps} == {AP_MAC}
    assert aps[0]["ssid"] == "TestNet"
    assert aps[0]["channel"] == 6

    missing = client.post("/api/attack",
                          json={"bssid": "00:11:22:33:44:55", "duration_s": 10})
    assert missing.status_code == 404

    # A dispatch only reaches bots that are tuned in; wait like an operator
    # watching the bot table before pulling the trigger.
    wait_for(client,
             lambda s: s["bots"] and all(b["phase"] == "awaiting_task"
                                         for b in s["bots"]),
             what="bots to join the handler")
    ok = client.post("/api/attack", json={"bssid": AP_MAC, "duration_s": 8})
    assert ok.status_code == 200
    snap = wait_for(client, lambda s: s["phase"] == "attack_running",
                    what="attack to start")
    assert snap["target"]["bssid"] == AP_MAC

    snap = wait_for(client,
                    lambda s: all(not c["connected"] for c in s["clients"]),
                    what="clients to disconnect")
    assert all(c["downtime_s"] >= 0 for c in snap["clients"])
    bots = snap["bots"]
    assert bots and all(b["phase"] == "attacking" for b in bots)
    assert any(b["frames_sent"] > 0 for b in bots)

    stopped = client.post("/api/stop")
    assert stopped.status_code == 200
    wait_for(client, lambda s: s["phase"] == "serving", what="stop to land")


def test_event_stream_replays_from_start(client):
    collected = []
    with client.stream("GET", "/api/events?limit=10") as stream:
        for line in stream.iter_lines():
            if line.startswith("data: "):
                collected.append(json.loads(line[len("data: "):]))
    assert len(collected) == 10
    assert collected[0]["kind"] == "boot"
    seqs = [e["seq"] for e in collected]
    assert seqs == sorted(seqs)


def test_event_stream_resumes_from_sequence(client):
    with client.stream("GET", "/api/events?from_seq=5&limit=3") as stream:
        got = [json.loads(line[len("data: "):]) for line in stream.iter_lines()
               if line.startswith("data: ")]
    assert [e["seq"] for e in got] == [5, 6, 7]


def test_commands_after_horizon_are_409():
    config = suppression_scenario(autoselect=False, horizon_s=0.5,
                                  time_scale=50.0)
    app = create_app(config)
    with TestClient(app) as c:
        wait_for(c, lambda s: not s["running"], what="horizon to pass")
        assert c.post("/api/scan").status_code == 409
        assert c.post("/api/stop").status_code == 409
        response = c.post("/api/attack", json={"bssid": AP_MAC, "duration_s": 5})
        assert response.status_code == 409
