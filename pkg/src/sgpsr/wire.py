"""Bit-exact codec for secured GPSR packets.

Layout (big-endian, 48-byte fixed header)::

    byte  0      version (high nibble) | command (low nibble)
    byte  1      reserved, zero
    bytes 2-3    packet length in bytes, auth field included
    bytes 4-11   source position            (x, y as int32 centimeters)
    bytes 12-19  perimeter entry position   (zero outside perimeter mode)
    bytes 20-27  destination position
    bytes 28-43  edge endpoints P1, P2      (zero outside perimeter mode)
    bytes 44-45  port
    bytes 46-47  reserved, zero
    0..250       data
    16           authentication tag
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, replace
from enum import IntEnum

from .geo import ORIGIN, Position

__all__ = [
    "Command",
    "GpsrPacket",
    "WireError",
    "EncodeError",
    "DecodeError",
    "TruncatedError",
    "LengthMismatchError",
    "UnknownCommandError",
    "ReservedFieldError",
    "VersionError",
    "DataTooLongError",
    "UnusedFieldError",
    "encode",
    "decode",
    "signed_region",
    "HEADER_SIZE",
    "AUTH_SIZE",
    "MAX_DATA",
    "MIN_PACKET",
    "MAX_PACKET",
    "VERSION",
]

VERSION = 1
HEADER_SIZE = 48
AUTH_SIZE = 16
MAX_DATA = 250
MIN_PACKET = HEADER_SIZE + AUTH_SIZE
MAX_PACKET = HEADER_SIZE + MAX_DATA + AUTH_SIZE

_HEADER = struct.Struct(">BBH10iHH")
assert _HEADER.size == HEADER_SIZE

ZERO_AUTH = bytes(AUTH_SIZE)
ZERO_EDGE = (ORIGIN, ORIGIN)


class Command(IntEnum):
    BEACON_REQUEST = 0b0001
    BEACON_RESPONSE = 0b0010
    GREEDY_DATA = 0b0011
    PERIMETER_DATA = 0b0100

    @property
    def is_beacon(self) -> bool:
        return self in (Command.BEACON_REQUEST, Command.BEACON_RESPONSE)

    @property
    def is_data(self) -> bool:
        return not self.is_beacon


class WireError(ValueError):
    """Base class for codec failures. ``field`` names the offending field."""

    field = "packet"

    def __init__(self, message: str, field: str | None = None):
        if field is not None:
            self.field = field
        super().__init__(f"{self.field}: {message}")


class EncodeError(WireError):
    pass


class DecodeError(WireError):
    pass


class TruncatedError(DecodeError):
    field = "packet"


class LengthMismatchError(DecodeError):
    field = "packet_length"


class UnknownCommandError(DecodeError, EncodeError):
    field = "command"


class ReservedFieldError(DecodeError, EncodeError):
    field = "reserved"


class VersionError(DecodeError, EncodeError):
    field = "version"


class DataTooLongError(DecodeError, EncodeError):
    field = "data"


class UnusedFieldError(DecodeError, EncodeError):
    """Perimeter-only fields set on a packet that is not in perimeter mode."""


@dataclass(frozen=True)
class GpsrPacket:
    command: Command
    source_pos: Position = ORIGIN
    dest_pos: Position = ORIGIN
    perimeter_pos: Position = ORIGIN
    edge: tuple[Position, Position] = ZERO_EDGE
    port: int = 0
    data: bytes = b""
    auth: bytes = ZERO_AUTH
    version: int = VERSION
    reserved1: int = 0
    reserved2: int = 0

    @property
    def packet_length(self) -> int:
        return HEADER_SIZE + len(self.data) + AUTH_SIZE

    def with_auth(self, auth: bytes) -> "GpsrPacket":
        return replace(self, auth=bytes(auth))

    def replace(self, **changes) -> "GpsrPacket":
        return replace(self, **changes)


def _check(pkt: GpsrPacket) -> None:
    if pkt.version != VERSION:
        raise VersionError(f"only version {VERSION} is supported, got {pkt.version}")
    try:
        Command(pkt.command)
    except ValueError:
        raise UnknownCommandError(f"illegal command code {pkt.command!r}") from None
    if pkt.reserved1:
        raise ReservedFieldError("must be zero", "reserved1")
    if pkt.reserved2:
        raise ReservedFieldError("must be zero", "reserved2")
    if len(pkt.data) > MAX_DATA:
        raise DataTooLongError(f"{len(pkt.data)} bytes exceeds the {MAX_DATA}-byte limit")
    if len(pkt.auth) != AUTH_SIZE:
        raise EncodeError(f"auth must be {AUTH_SIZE} bytes, got {len(pkt.auth)}", "auth")
    if not 0 <= pkt.port <= 0xFFFF:
        raise EncodeError(f"port {pkt.port} does not fit 16 bits", "port")
    if pkt.command != Command.PERIMETER_DATA:
        if not pkt.perimeter_pos.is_zero():
            raise UnusedFieldError("must be zero outside perimeter mode", "perimeter_pos")
        if not (pkt.edge[0].is_zero() and pkt.edge[1].is_zero()):
            raise UnusedFieldError("must be zero outside perimeter mode", "edge")


def encode(pkt: GpsrPacket) -> bytes:
    _check(pkt)
    e0, e1 = pkt.edge
    header = _HEADER.pack(
        (pkt.version << 4) | int(pkt.command),
        pkt.reserved1,
        pkt.packet_length,
        pkt.source_pos.x, pkt.source_pos.y,
        pkt.perimeter_pos.x, pkt.perimeter_pos.y,
        pkt.dest_pos.x, pkt.dest_pos.y,
        e0.x, e0.y, e1.x, e1.y,
        pkt.port,
        pkt.reserved2,
    )
    return header + bytes(pkt.data) + bytes(pkt.auth)


def decode(raw: bytes) -> GpsrPacket:
    raw = bytes(raw)
    if len(raw) < MIN_PACKET:
        raise TruncatedError(f"{len(raw)} bytes is shorter than the {MIN_PACKET}-byte minimum")
    (vc, res1, length, sx, sy, px, py, dx, dy, e0x, e0y, e1x, e1y, port, res2) = _HEADER.unpack_from(raw)
    if length != len(raw):
        raise LengthMismatchError(f"header says {length} bytes, got {len(raw)}")
    version, code = vc >> 4, vc & 0x0F
    if version != VERSION:
        raise VersionError(f"only version {VERSION} is supported, got {version}")
    try:
        command = Command(code)
    except ValueError:
        raise UnknownCommandError(f"unknown command nibble {code:04b}") from None
    if res1:
        raise ReservedFieldError(f"nonzero value {res1:#04x}", "reserved1")
    if res2:
        raise ReservedFieldError(f"nonzero value {res2:#06x}", "reserved2")
    data = raw[HEADER_SIZE:-AUTH_SIZE]
    if len(data) > MAX_DATA:
        raise DataTooLongError(f"{len(data)} bytes exceeds the {MAX_DATA}-byte limit")
    pkt = GpsrPacket(
        command=command,
        source_pos=Position(sx, sy),
        dest_pos=Position(dx, dy),
        perimeter_pos=Position(px, py),
        edge=(Position(e0x, e0y), Position(e1x, e1y)),
        port=port,
        data=data,
        auth=raw[-AUTH_SIZE:],
    )
    if command != Command.PERIMETER_DATA:
        if not pkt.perimeter_pos.is_zero():
            raise UnusedFieldError("must be zero outside perimeter mode", "perimeter_pos")
        if not (pkt.edge[0].is_zero() and pkt.edge[1].is_zero()):
            raise UnusedFieldError("must be zero outside perimeter mode", "edge")
    return pkt


def signed_region(raw: bytes) -> bytes:
    """Every byte covered by the signature: header and data, auth excluded."""
    if len(raw) < MIN_PACKET:
        raise TruncatedError(f"{len(raw)} bytes is shorter than the {MIN_PACKET}-byte minimum")
    return bytes(raw[:-AUTH_SIZE])
