"""Discrete-event simulator of a 2.4 GHz deauthentication botnet.

A handler node scans for access points, sniffs their clients in promiscuous
mode, and broadcasts a plain-text task to bot nodes, which flood spoofed
deauthentication frames and cache-poisoning fake beacons until a deadline.
Everything runs over a modeled radio medium; nothing touches real hardware.
"""

from .engine import (
    AttackCommand,
    EventRecord,
    ScanCommand,
    Simulation,
    StopCommand,
    event_log_digest,
    run,
    run_scripted,
    write_outputs,
)
from .frames import (
    AddressClass,
    AssocRequest,
    AssocResponse,
    AuthRequest,
    AuthResponse,
    BROADCAST,
    BadSsid,
    Beacon,
    Channel,
    Data,
    Deauth,
    Frame,
    FrameError,
    MacAddress,
    NonUnicastTarget,
    TruncatedFrame,
    UnknownFrameKind,
    classify_address,
    decode_frame,
    encode_frame,
    make_deauth,
    make_fake_beacon,
)
from .medium import Medium, Position, RadioMode, RadioState
from .metrics import Metrics
from .scenario import ScenarioConfig, ScenarioError, load_scenario, load_scenario_file
from .taskproto import MalformedTask, TaskPacket, decode_task, encode_task

__version__ = "0.1.0"
