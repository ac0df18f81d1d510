"""Modeled IEEE 802.11 management/data frames with byte-exact encode/decode.

Only the frame kinds the simulated attack touches are modeled: beacons,
open-system authentication, association, deauthentication, and data frames
whose payload header carries a UDP-style port tag. The byte layout follows
standard 802.11 management framing (2-byte frame control, 2-byte duration,
three addresses, 2-byte sequence control, then the variant body) so encoded
frames can be cross-checked against third-party dissectors. The FCS is
omitted: the simulated medium delivers or drops, it never corrupts.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from enum import Enum
from random import Random

MGMT_HEADER = struct.Struct("<HH6s6s6sH")
MGMT_HEADER_LEN = MGMT_HEADER.size  # 24

# Frame-control values (protocol version 0, flags 0), little-endian u16.
FC_ASSOC_REQ = 0x0000
FC_ASSOC_RESP = 0x0010
FC_BEACON = 0x0080
FC_AUTH = 0x00B0
FC_DEAUTH = 0x00C0
FC_DATA = 0x0008

# Tagged parameter ids used in beacon / association bodies.
TAG_SSID = 0
TAG_DS_PARAMS = 3

AUTH_ALG_OPEN = 0
AUTH_SEQ_REQUEST = 1
AUTH_SEQ_RESPONSE = 2

# Reason 7: class-3 frame received from nonassociated station.
DEFAULT_DEAUTH_REASON = 7

MIN_CHANNEL = 1
MAX_CHANNEL = 13

SSID_MAX_BYTES = 32


class FrameError(ValueError):
    """Base error for frame construction and codec failures."""


class TruncatedFrame(FrameError):
    """Byte input too short for its declared frame kind."""


class UnknownFrameKind(FrameError):
    """Frame-control value does not match any modeled frame kind."""


class NonUnicastTarget(FrameError):
    """A deauthentication target must be a unicast address."""


class BadSsid(FrameError):
    """SSID empty or longer than 32 bytes."""


class AddressClass(Enum):
    BROADCAST = "broadcast"
    MULTICAST = "multicast"
    UNICAST = "unicast"


@dataclass(frozen=True)
class MacAddress:
    """A 48-bit MAC address held as 6 raw octets."""

    octets: bytes

    def __post_init__(self) -> None:
        if not isinstance(self.octets, bytes):
            object.__setattr__(self, "octets", bytes(self.octets))
        if len(self.octets) != 6:
            raise FrameError(f"MAC address needs exactly 6 octets, got {len(self.octets)}")

    @classmethod
    def parse(cls, text: str) -> "MacAddress":
        parts = text.split(":")
        if len(parts) != 6 or any(len(p) != 2 for p in parts):
            raise FrameError(f"bad MAC address text: {text!r}")
        try:
            return cls(bytes(int(p, 16) for p in parts))
        except ValueError as exc:
            raise FrameError(f"bad MAC address text: {text!r}") from exc

    @property
    def is_broadcast(self) -> bool:
        return self.octets == b"\xff\xff\xff\xff\xff\xff"

    @property
    def is_multicast(self) -> bool:
        # Broadcast is the all-ones special case of multicast.
        return bool(self.octets[0] & 0x01)

    @property
    def is_unicast(self) -> bool:
        return not self.is_multicast

    def __str__(self) -> str:
        return ":".join(f"{b:02X}" for b in self.octets)

    def __repr__(self) -> str:
        return f"MacAddress('{self}')"


BROADCAST = MacAddress(b"\xff\xff\xff\xff\xff\xff")


def classify_address(addr: MacAddress) -> AddressClass:
    if addr.is_broadcast:
        return AddressClass.BROADCAST
    if addr.is_multicast:
        return AddressClass.MULTICAST
    return AddressClass.UNICAST


class Channel(int):
    """A 2.4 GHz channel index, restricted to 1..13."""

    def __new__(cls, index: int) -> "Channel":
        index = int(index)
        if not MIN_CHANNEL <= index <= MAX_CHANNEL:
            raise FrameError(f"channel {index} outside {MIN_CHANNEL}..{MAX_CHANNEL}")
        return super().__new__(cls, index)


def _check_u16(value: int, what: str) -> None:
    if not 0 <= value <= 0xFFFF:
        raise FrameError(f"{what} {value} does not fit in 16 bits")


def _check_ssid(ssid: str) -> bytes:
    raw = ssid.encode("utf-8")
    if not 1 <= len(raw) <= SSID_MAX_BYTES:
        raise BadSsid(f"SSID must be 1..{SSID_MAX_BYTES} bytes, got {len(raw)}")
    return raw


@dataclass(frozen=True, kw_only=True)
class Frame:
    """Common 24-byte management/data header model."""

    addr1: MacAddress  # receiver
    addr2: MacAddress  # transmitter
    addr3: MacAddress  # BSSID
    duration: int = 0
    seq: int = 0

    def __post_init__(self) -> None:
        _check_u16(self.duration, "duration")
        if not 0 <= self.seq <= 0xFFF:
            raise FrameError(f"sequence number {self.seq} does not fit in 12 bits")


@dataclass(frozen=True, kw_only=True)
class Beacon(Frame):
    ssid: str
    ds_channel: Channel
    beacon_interval_tu: int = 100
    capabilities: int = 0
    timestamp: int = 0
    addr1: MacAddress = BROADCAST

    def __post_init__(self) -> None:
        super().__post_init__()
        if not self.addr1.is_broadcast:
            raise FrameError("beacons are always addressed to broadcast")
        if self.addr2 != self.addr3:
            raise FrameError("beacon transmitter and BSSID must match")
        _check_ssid(self.ssid)
        _check_u16(self.beacon_interval_tu, "beacon interval")
        _check_u16(self.capabilities, "capabilities")
        if not 0 <= self.timestamp <= 0xFFFF_FFFF_FFFF_FFFF:
            raise FrameError("timestamp does not fit in 64 bits")
        if not isinstance(self.ds_channel, Channel):
            object.__setattr__(self, "ds_channel", Channel(self.ds_channel))

    @property
    def bssid(self) -> MacAddress:
        return self.addr3


@dataclass(frozen=True, kw_only=True)
class Deauth(Frame):
    reason_code: int = DEFAULT_DEAUTH_REASON

    def __post_init__(self) -> None:
        super().__post_init__()
        if self.addr2 != self.addr3:
            raise FrameError("deauth is sent on behalf of the AP: addr2 must equal addr3")
        _check_u16(self.reason_code, "reason code")


@dataclass(frozen=True, kw_only=True)
class AuthRequest(Frame):
    pass


@dataclass(frozen=True, kw_only=True)
class AuthResponse(Frame):
    status: int = 0

    def __post_init__(self) -> None:
        super().__post_init__()
        _check_u16(self.status, "status")


@dataclass(frozen=True, kw_only=True)
class AssocRequest(Frame):
    ssid: str

    def __post_init__(self) -> None:
        super().__post_init__()
        _check_ssid(self.ssid)


@dataclass(frozen=True, kw_only=True)
class AssocResponse(Frame):
    status: int = 0
    association_id: int = 0

    def __post_init__(self) -> None:
        super().__post_init__()
        _check_u16(self.status, "status")
        _check_u16(self.association_id, "association id")


@dataclass(frozen=True, kw_only=True)
class Data(Frame):
    """Data frame; `port` models the UDP destination port of the payload."""

    port: int = 0
    payload: bytes = b""

    def __post_init__(self) -> None:
        super().__post_init__()
        _check_u16(self.port, "port")
        if not isinstance(self.payload, bytes):
            object.__setattr__(self, "payload", bytes(self.payload))


def make_deauth(ap: MacAddress, client: MacAddress,
                reason: int = DEFAULT_DEAUTH_REASON) -> Deauth:
    """Build a deauthentication frame spoofed from the AP toward one client."""
    if not client.is_unicast:
        raise NonUnicastTarget(f"deauth target must be unicast, got {client}")
    return Deauth(addr1=client, addr2=ap, addr3=ap, reason_code=reason)


def make_fake_beacon(ssid: str, rng: Random) -> Beacon:
    """Build a beacon advertising `ssid` with randomized everything else.

    The BSSID is always unicast and locally administered; capabilities,
    DS channel and sequence number are drawn from `rng` (in that order,
    after the BSSID bytes). The beacon interval stays at the usual 100 TU.
    """
    raw = _check_ssid(ssid)
    del raw
    octets = bytearray(rng.randrange(256) for _ in range(6))
    octets[0] = (octets[0] & 0xFC) | 0x02  # unicast + locally administered
    bssid = MacAddress(bytes(octets))
    capabilities = rng.randrange(0x10000)
    ds_channel = Channel(rng.randrange(MIN_CHANNEL, MAX_CHANNEL + 1))
    seq = rng.randrange(0x1000)
    return Beacon(addr2=bssid, addr3=bssid, ssid=ssid, ds_channel=ds_channel,
                  capabilities=capabilities, seq=seq)


# ---------------------------------------------------------------------------
# codec

_BEACON_FIXED = struct.Struct("<QHH")
_DEAUTH_BODY = struct.Struct("<H")
_AUTH_BODY = struct.Struct("<HHH")
_ASSOC_REQ_FIXED = struct.Struct("<HH")
_ASSOC_RESP_BODY = struct.Struct("<HHH")
_DATA_PORT = struct.Struct(">H")  # ports ride in network byte order


def _pack_ie(tag: int, value: bytes) -> bytes:
    return bytes((tag, len(value))) + value


def encode_frame(frame: Frame) -> bytes:
    """Serialize a frame to its canonical byte form."""
    if isinstance(frame, Beacon):
        fc = FC_BEACON
        body = _BEACON_FIXED.pack(frame.timestamp, frame.beacon_interval_tu,
                                  frame.capabilities)
        body += _pack_ie(TAG_SSID, frame.ssid.encode("utf-8"))
        body += _pack_ie(TAG_DS_PARAMS, bytes([frame.ds_channel]))
    elif isinstance(frame, Deauth):
        fc = FC_DEAUTH
        body = _DEAUTH_BODY.pack(frame.reason_code)
    elif isinstance(frame, AuthRequest):
        fc = FC_AUTH
        body = _AUTH_BODY.pack(AUTH_ALG_OPEN, AUTH_SEQ_REQUEST, 0)
    elif isinstance(frame, AuthResponse):
        fc = FC_AUTH
        body = _AUTH_BODY.pack(AUTH_ALG_OPEN, AUTH_SEQ_RESPONSE, frame.status)
    elif isinstance(frame, AssocRequest):
        fc = FC_ASSOC_REQ
        body = _ASSOC_REQ_FIXED.pack(0, 0)
        body += _pack_ie(TAG_SSID, frame.ssid.encode("utf-8"))
    elif isinstance(frame, AssocResponse):
        fc = FC_ASSOC_RESP
        body = _ASSOC_RESP_BODY.pack(0, frame.status, frame.association_id)
    elif isinstance(frame, Data):
        fc = FC_DATA
        body = _DATA_PORT.pack(frame.port) + frame.payload
    else:
        raise FrameError(f"cannot encode {type(frame).__name__}")
    header = MGMT_HEADER.pack(fc, frame.duration, frame.addr1.octets,
                              frame.addr2.octets, frame.addr3.octets,
                              (frame.seq & 0xFFF) << 4)
    return header + body


def _split_ies(buf: bytes) -> list[tuple[int, bytes]]:
    ies = []
    pos = 0
    while pos < len(buf):
        if pos + 2 > len(buf):
            raise TruncatedFrame("tagged parameter header runs past the buffer")
        tag, length = buf[pos], buf[pos + 1]
        pos += 2
        if pos + length > len(buf):
            raise TruncatedFrame("tagged parameter value runs past the buffer")
        ies.append((tag, buf[pos:pos + length]))
        pos += length
    return ies


def _decode_ssid(raw: bytes) -> str:
    if not 1 <= len(raw) <= SSID_MAX_BYTES:
        raise BadSsid(f"SSID element must be 1..{SSID_MAX_BYTES} bytes")
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise FrameError("SSID is not valid UTF-8") from exc


def decode_frame(data: bytes) -> Frame:
    """Parse bytes produced by encode_frame back into a frame.

    Raises TruncatedFrame for inputs too short for their declared kind and
    UnknownFrameKind for frame-control values outside the modeled set.
    """
    if len(data) < MGMT_HEADER_LEN:
        raise TruncatedFrame(f"need at least {MGMT_HEADER_LEN} header bytes, got {len(data)}")
    fc, duration, a1, a2, a3, seq_ctl = MGMT_HEADER.unpack_from(data)
    if seq_ctl & 0xF:
        raise FrameError("fragment number must be zero")
    common = dict(addr1=MacAddress(a1), addr2=MacAddress(a2), addr3=MacAddress(a3),
                  duration=duration, seq=seq_ctl >> 4)
    body = data[MGMT_HEADER_LEN:]

    if fc == FC_BEACON:
        if len(body) < _BEACON_FIXED.size:
            raise TruncatedFrame("beacon body too short")
        timestamp, interval, caps = _BEACON_FIXED.unpack_from(body)
        ies = _split_ies(body[_BEACON_FIXED.size:])
        if [tag for tag, _ in ies] != [TAG_SSID, TAG_DS_PARAMS]:
            raise FrameError("beacon must carry exactly an SSID and a DS-params element")
        ssid = _decode_ssid(ies[0][1])
        if len(ies[1][1]) != 1:
            raise FrameError("DS-params element must be a single byte")
        return Beacon(ssid=ssid, ds_channel=Channel(ies[1][1][0]), timestamp=timestamp,
                      beacon_interval_tu=interval, capabilities=caps, **common)
    if fc == FC_DEAUTH:
        if len(body) < _DEAUTH_BODY.size:
            raise TruncatedFrame("deauth body too short")
        if len(body) != _DEAUTH_BODY.size:
            raise FrameError("trailing bytes after deauth body")
        return Deauth(reason_code=_DEAUTH_BODY.unpack(body)[0], **common)
    if fc == FC_AUTH:
        if len(body) < _AUTH_BODY.size:
            raise TruncatedFrame("auth body too short")
        if len(body) != _AUTH_BODY.size:
            raise FrameError("trailing bytes after auth body")
        alg, auth_seq, status = _AUTH_BODY.unpack(body)
        if alg != AUTH_ALG_OPEN:
            raise FrameError(f"only open-system auth is modeled, got algorithm {alg}")
        if auth_seq == AUTH_SEQ_REQUEST:
            return AuthRequest(**common)
        if auth_seq == AUTH_SEQ_RESPONSE:
            return AuthResponse(status=status, **common)
        raise FrameError(f"bad auth transaction number {auth_seq}")
    if fc == FC_ASSOC_REQ:
        if len(body) < _ASSOC_REQ_FIXED.size:
            raise TruncatedFrame("association request body too short")
        ies = _split_ies(body[_ASSOC_REQ_FIXED.size:])
        if [tag for tag, _ in ies] != [TAG_SSID]:
            raise FrameError("association request must carry exactly an SSID element")
        return AssocRequest(ssid=_decode_ssid(ies[0][1]), **common)
    if fc == FC_ASSOC_RESP:
        if len(body) < _ASSOC_RESP_BODY.size:
            raise TruncatedFrame("association response body too short")
        if len(body) != _ASSOC_RESP_BODY.size:
            raise FrameError("trailing bytes after association response body")
        _, status, aid = _ASSOC_RESP_BODY.unpack(body)
        return AssocResponse(status=status, association_id=aid, **common)
    if fc == FC_DATA:
        if len(body) < _DATA_PORT.size:
            raise TruncatedFrame("data body too short for the port tag")
        return Data(port=_DATA_PORT.unpack_from(body)[0],
                    payload=body[_DATA_PORT.size:], **common)
    raise UnknownFrameKind(f"frame control 0x{fc:04X} is not modeled")


def summarize(frame: Frame) -> dict:
    """Compact JSON-able description of a frame, used in event records."""
    out: dict = {"a1": str(frame.addr1), "a2": str(frame.addr2), "a3": str(frame.addr3)}
    if isinstance(frame, Beacon):
        out.update(kind="beacon", ssid=frame.ssid, ds_channel=int(frame.ds_channel))
    elif isinstance(frame, Deauth):
        out.update(kind="deauth", reason=frame.reason_code)
    elif isinstance(frame, AuthRequest):
        out.update(kind="auth_req")
    elif isinstance(frame, AuthResponse):
        out.update(kind="auth_resp", status=frame.status)
    elif isinstance(frame, AssocRequest):
        out.update(kind="assoc_req", ssid=frame.ssid)
    elif isinstance(frame, AssocResponse):
        out.update(kind="assoc_resp", status=frame.status, aid=frame.association_id)
    elif isinstance(frame, Data):
        out.update(kind="data", port=frame.port, length=len(frame.payload))
    else:
        out.update(kind="unknown")
    return out
