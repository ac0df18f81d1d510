from __future__ import annotations

import json

import pytest

from deauthsim.scenario import (
    ApSpec,
    BotSpec,
    ClientSpec,
    HandlerSpec,
    ParseError,
    TestBenchSpec,
    ValidationError,
    load_scenario,
)

from conftest import ap_node, bot_node, client_node, handler_node


def doc(nodes, **top):
    return json.dumps({"seed": 1, "nodes": nodes, **top})


def test_minimal_scenario_fills_defaults():
    config = load_scenario(doc([
        handler_node(), ap_node(),
        client_node("02:00:00:00:00:01"), bot_node("02:00:00:00:B0:01")]))
    assert config.range_m == 400.0
    assert config.loss_probability == 0.0
    assert config.horizon_s == 60.0
    kinds = [type(n) for n in config.nodes]
    assert kinds == [HandlerSpec, ApSpec, ClientSpec, BotSpec]
    handler = config.handler
    assert handler.ssid == "esp_ap"
    assert handler.capture_window_s == 5.0
    assert handler.dwell_ms == 200
    client = config.nodes[2]
    assert client.backoff_s == 1.0
    assert client.auth_timeout_s == 0.5
    assert client.auth_retries == 3
    bot = config.nodes[3]
    assert bot.cycle_ms == 100
    assert bot.handler_ssid == "esp_ap"


def test_not_json_is_parse_error():
    with pytest.raises(ParseError):
        load_scenario("{nope")


def test_two_handlers_rejected():
    second = handler_node()
    second["mac"] = "02:00:00:00:AA:02"
    with pytest.raises(ValidationError, match="exactly one handler"):
        load_scenario(doc([handler_node(), second, ap_node()]))


def test_zero_handlers_rejected():
    with pytest.raises(ValidationError, match="exactly one handler"):
        load_scenario(doc([ap_node()]))


def test_duplicate_mac_rejected():
    with pytest.raises(ValidationError, match="duplicate"):
        load_scenario(doc([handler_node(),
                           ap_node(), ap_node(ssid="Other", channel=2)]))


def test_loss_probability_out_of_range_rejected():
    with pytest.raises(ValidationError, match="loss_probability"):
        load_scenario(doc([handler_node(), ap_node()], loss_probability=1.5))


def test_bad_channel_rejected():
    with pytest.raises(ValidationError, match="channel"):
        load_scenario(doc([handler_node(), ap_node(channel=14)]))


def test_unknown_node_kind_rejected():
    with pytest.raises(ValidationError, match="unknown node kind"):
        load_scenario(doc([handler_node(), {"kind": "router",
                                            "mac": "02:00:00:00:00:01",
                                            "position": [0, 0]}]))


def test_unknown_key_rejected():
    bad = ap_node()
    bad["activity_rate"] = 3
    with pytest.raises(ValidationError, match="unknown keys"):
        load_scenario(doc([handler_node(), bad]))


def test_autoselect_must_name_a_declared_ap():
    with pytest.raises(ValidationError, match="autoselect"):
        load_scenario(doc([handler_node(autoselect="Ghost"), ap_node()]))


def test_multicast_node_mac_rejected():
    bad = ap_node(mac="01:00:5E:00:00:01")
    with pytest.raises(ValidationError, match="unicast"):
        load_scenario(doc([handler_node(), bad]))


def test_moves_and_off_at_parse():
    bot = bot_node("02:00:00:00:B0:01")
    bot["moves"] = [{"at_s": 5.0, "position": [1, 2]}]
    bot["off_at_s"] = 9.0
    config = load_scenario(doc([handler_node(), bot]))
    spec = config.nodes[1]
    assert spec.off_at_s == 9.0
    assert spec.moves[0].at_s == 5.0
    assert spec.moves[0].position.x == 1.0


def test_test_bench_modes_validated():
    bench = {"kind": "test_bench", "mac": "02:00:00:00:BE:01",
             "position": [0, 0], "target_ssid": "TestNet", "mode": "weird"}
    with pytest.raises(ValidationError, match="mode"):
        load_scenario(doc([handler_node(), bench]))
    bench["mode"] = "station"
    config = load_scenario(doc([handler_node(), bench]))
    assert isinstance(config.nodes[1], TestBenchSpec)


def test_ssid_must_be_ascii_for_dispatch():
    with pytest.raises(ValidationError, match="SSID"):
        load_scenario(doc([handler_node(), ap_node(ssid="café")]))
