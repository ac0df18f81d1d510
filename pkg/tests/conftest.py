from __future__ import annotations

import json

import pytest

from deauthsim import load_scenario

HANDLER_MAC = "02:00:00:00:AA:01"
AP_MAC = "AA:BB:CC:DD:EE:01"
AP2_MAC = "AA:BB:CC:DD:EE:02"
CLIENT_MACS = ["02:00:00:00:00:01", "02:00:00:00:00:02", "02:00:00:00:00:03"]
BOT_MACS = ["02:00:00:00:B0:01", "02:00:00:00:B0:02",
            "02:00:00:00:B0:03", "02:00:00:00:B0:04"]


def handler_node(**kw) -> dict:
    return {"kind": "handler", "mac": HANDLER_MAC, "position": [0, 5],
            "channel": 1, **kw}


def ap_node(mac=AP_MAC, ssid="TestNet", channel=6, **kw) -> dict:
    return {"kind": "ap", "mac": mac, "position": [0, 0], "ssid": ssid,
            "channel": channel, **kw}


def client_node(mac, ssid="TestNet", rate=2.0, **kw) -> dict:
    return {"kind": "client", "mac": mac, "position": [10, 0],
            "target_ssid": ssid, "activity_rate": rate, **kw}


def bot_node(mac, **kw) -> dict:
    return {"kind": "bot", "mac": mac, "position": [5, 5], **kw}


def build_scenario(nodes, *, seed=42, horizon_s=60.0, loss=0.0, range_m=400.0,
                   time_scale=1.0):
    doc = {"seed": seed, "horizon_s": horizon_s, "loss_probability": loss,
           "range_m": range_m, "time_scale": time_scale, "nodes": nodes}
    return load_scenario(json.dumps(doc))


def suppression_scenario(*, seed=42, n_clients=3, n_bots=1, attack_s=30,
                         horizon_s=60.0, rate=2.0, autoselect=True,
                         time_scale=1.0, loss=0.0, **handler_kw):
    """The canonical bench: one victim AP, active clients, handler, bots."""
    nodes = [handler_node(attack_duration_s=attack_s,
                          autoselect="TestNet" if autoselect else None,
                          **handler_kw),
             ap_node()]
    nodes += [client_node(CLIENT_MACS[i], rate=rate) for i in range(n_clients)]
    nodes += [bot_node(BOT_MACS[i]) for i in range(n_bots)]
    return build_scenario(nodes, seed=seed, horizon_s=horizon_s,
                          time_scale=time_scale, loss=loss)


@pytest.fixture
def basic_config():
    return suppression_scenario()


def events_to_dicts(events) -> list[dict]:
    return [json.loads(e.to_json()) for e in events]
