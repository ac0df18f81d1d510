"""Command line front end: batch runs, the live API server, and frame tools."""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from . import __version__
from .engine import event_log_digest, run, write_outputs
from .frames import (
    AssocRequest,
    AuthRequest,
    Beacon,
    Channel,
    Data,
    FrameError,
    MacAddress,
    decode_frame,
    encode_frame,
    make_deauth,
    make_fake_beacon,
    summarize,
)
from .scenario import ScenarioError, load_scenario_file
from .taskproto import MalformedTask, TaskPacket, decode_task, encode_task


def _cmd_run(args: argparse.Namespace) -> int:
    config = load_scenario_file(args.scenario)
    if args.seed is not None:
        config = dataclasses.replace(config, seed=args.seed)
    events, metrics = run(config)
    write_outputs(events, metrics, events_path=args.events, metrics_path=args.metrics)
    summary = metrics.to_dict()
    print(json.dumps(summary, indent=2, sort_keys=True))
    print(f"events: {len(events)}  digest: {event_log_digest(events)}",
          file=sys.stderr)
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .api import create_app

    config = load_scenario_file(args.scenario)
    if args.seed is not None:
        config = dataclasses.replace(config, seed=args.seed)
    if args.time_scale is not None:
        config = dataclasses.replace(config, time_scale=args.time_scale)
    app = create_app(config, assets_dir=args.assets)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _parse_mac(text: str) -> MacAddress:
    try:
        return MacAddress.parse(text)
    except FrameError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _cmd_craft(args: argparse.Namespace) -> int:
    if args.frame == "deauth":
        frame = make_deauth(args.ap, args.client, args.reason)
    elif args.frame == "beacon":
        frame = Beacon(addr2=args.bssid, addr3=args.bssid, ssid=args.ssid,
                       ds_channel=Channel(args.channel))
    elif args.frame == "fake-beacon":
        import random

        frame = make_fake_beacon(args.ssid, random.Random(args.seed))
    elif args.frame == "auth-req":
        frame = AuthRequest(addr1=args.bssid, addr2=args.station, addr3=args.bssid)
    elif args.frame == "assoc-req":
        frame = AssocRequest(addr1=args.bssid, addr2=args.station, addr3=args.bssid,
                             ssid=args.ssid)
    elif args.frame == "data":
        frame = Data(addr1=args.to, addr2=args.frm, addr3=args.frm,
                     port=args.port, payload=bytes.fromhex(args.payload))
    else:  # pragma: no cover - argparse restricts choices
        raise SystemExit(f"unknown frame kind {args.frame}")
    print(encode_frame(frame).hex())
    return 0


def _cmd_dissect(args: argparse.Namespace) -> int:
    raw = args.hex if args.hex is not None else sys.stdin.read().strip()
    try:
        data = bytes.fromhex(raw)
    except ValueError:
        print("input is not valid hex", file=sys.stderr)
        return 2
    try:
        frame = decode_frame(data)
    except FrameError as exc:
        print(f"decode failed: {exc}", file=sys.stderr)
        return 1
    print(json.dumps({**summarize(frame), "duration": frame.duration,
                      "seq": frame.seq}, sort_keys=True))
    return 0


def _cmd_encode_task(args: argparse.Namespace) -> int:
    try:
        task = TaskPacket(channel=Channel(args.channel), duration_s=args.time,
                          ssid=args.ssid, ap_mac=args.ap,
                          client_macs=tuple(args.client))
    except (ValueError, FrameError) as exc:
        print(f"bad task: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(encode_task(task).decode("ascii") + "\n")
    return 0


def _cmd_decode_task(args: argparse.Namespace) -> int:
    text = args.text if args.text is not None else sys.stdin.read().strip()
    try:
        task = decode_task(text.encode("ascii", errors="replace"))
    except MalformedTask as exc:
        print(f"decode failed: {exc}", file=sys.stderr)
        return 1
    print(json.dumps({
        "channel": int(task.channel),
        "duration_s": task.duration_s,
        "ssid": task.ssid,
        "ap_mac": str(task.ap_mac),
        "client_macs": [str(m) for m in task.client_macs],
    }, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="deauthsim",
        description="Simulate a 2.4 GHz deauthentication botnet end to end")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario to its horizon")
    p_run.add_argument("scenario")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--metrics", default=None, help="write metrics JSON here")
    p_run.add_argument("--events", default=None, help="write event JSONL here")
    p_run.set_defaults(func=_cmd_run)

    p_serve = sub.add_parser("serve", help="run live with the operator HTTP API")
    p_serve.add_argument("scenario")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8080)
    p_serve.add_argument("--seed", type=int, default=None)
    p_serve.add_argument("--time-scale", type=float, default=None,
                         help="sim seconds per wall second")
    p_serve.add_argument("--assets", default=None,
                         help="directory of console assets to host at /")
    p_serve.set_defaults(func=_cmd_serve)

    p_craft = sub.add_parser("craft", help="build a frame and print it as hex")
    craft_sub = p_craft.add_subparsers(dest="frame", required=True)
    c = craft_sub.add_parser("deauth")
    c.add_argument("--ap", type=_parse_mac, required=True)
    c.add_argument("--client", type=_parse_mac, required=True)
    c.add_argument("--reason", type=int, default=7)
    c = craft_sub.add_parser("beacon")
    c.add_argument("--bssid", type=_parse_mac, required=True)
    c.add_argument("--ssid", required=True)
    c.add_argument("--channel", type=int, required=True)
    c = craft_sub.add_parser("fake-beacon")
    c.add_argument("--ssid", required=True)
    c.add_argument("--seed", type=int, default=0)
    c = craft_sub.add_parser("auth-req")
    c.add_argument("--bssid", type=_parse_mac, required=True)
    c.add_argument("--station", type=_parse_mac, required=True)
    c = craft_sub.add_parser("assoc-req")
    c.add_argument("--bssid", type=_parse_mac, required=True)
    c.add_argument("--station", type=_parse_mac, required=True)
    c.add_argument("--ssid", required=True)
    c = craft_sub.add_parser("data")
    c.add_argument("--to", type=_parse_mac, required=True)
    c.add_argument("--frm", type=_parse_mac, required=True)
    c.add_argument("--port", type=int, default=0)
    c.add_argument("--payload", default="", help="payload as hex")
    p_craft.set_defaults(func=_cmd_craft)

    p_dissect = sub.add_parser("dissect", help="parse a hex frame")
    p_dissect.add_argument("hex", nargs="?", default=None,
                           help="hex bytes; stdin when omitted")
    p_dissect.set_defaults(func=_cmd_dissect)

    p_enc = sub.add_parser("encode-task", help="encode a handler task packet")
    p_enc.add_argument("--channel", type=int, required=True)
    p_enc.add_argument("--time", type=int, required=True, help="attack seconds")
    p_enc.add_argument("--ssid", required=True)
    p_enc.add_argument("--ap", type=_parse_mac, required=True)
    p_enc.add_argument("--client", type=_parse_mac, action="append", default=[])
    p_enc.set_defaults(func=_cmd_encode_task)

    p_dec = sub.add_parser("decode-task", help="decode a task packet")
    p_dec.add_argument("text", nargs="?", default=None,
                       help="packet text; stdin when omitted")
    p_dec.set_defaults(func=_cmd_decode_task)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return 2
    except FrameError as exc:
        print(f"frame error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
