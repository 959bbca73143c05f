"""Beaconing, neighbor-table upkeep and on-discovery key agreement.

Every node owns one Diffie-Hellman key pair for its lifetime and advertises
the public half in its beacon requests. A neighbor that hears a request from
an unknown node derives the pair key right away and answers with a beacon
response carrying its own public value; the requester completes the pair
from that response. Because both sides always combine the same two key
pairs, simultaneous discovery or re-discovery after expiry converges to one
key without any tie-breaking.
"""

from __future__ import annotations

import random
import struct
from dataclasses import dataclass, field

from .crypto.dh import (
    DhKeyPair,
    DhParams,
    HandshakeRejected,
    SigningKey,
    derive_key,
    dh_generate,
    dh_shared,
    int_to_bytes,
)
from .geo import Position
from .wire import MAX_DATA, Command, GpsrPacket

__all__ = [
    "NeighborEntry",
    "NeighborTable",
    "GroupTooLargeError",
    "MalformedPayload",
    "encode_public",
    "decode_public",
    "make_beacon_request",
    "make_beacon_response",
    "handle_beacon",
    "expire_neighbors",
]

DEFAULT_BEACON_INTERVAL = 1.0
DEFAULT_TIMEOUT = 4.5

_LEN = struct.Struct(">H")


class GroupTooLargeError(ValueError):
    """The DH public value does not fit the beacon data field."""


class MalformedPayload(ValueError):
    pass


@dataclass
class NeighborEntry:
    id: int
    pos: Position
    last_heard: float
    key: SigningKey | None = None
    peer_public: int | None = None


@dataclass
class NeighborTable:
    entries: dict[int, NeighborEntry] = field(default_factory=dict)
    beacon_interval: float = DEFAULT_BEACON_INTERVAL
    timeout: float = DEFAULT_TIMEOUT
    # key pair advertised in our own requests; None until the first request
    own_dh: DhKeyPair | None = None

    def key_for(self, nid: int) -> SigningKey | None:
        entry = self.entries.get(nid)
        return entry.key if entry else None

    def neighbor_list(self) -> list[tuple[int, Position]]:
        return sorted((nid, e.pos) for nid, e in self.entries.items())

    def __len__(self):
        return len(self.entries)

    def __contains__(self, nid):
        return nid in self.entries


def encode_public(value: int) -> bytes:
    raw = int_to_bytes(value)
    data = _LEN.pack(len(raw)) + raw
    if len(data) > MAX_DATA:
        raise GroupTooLargeError(
            f"DH public value needs {len(data)} bytes; beacon data holds {MAX_DATA}"
        )
    return data


def decode_public(data: bytes) -> int:
    if len(data) < 2:
        raise MalformedPayload("beacon payload shorter than its length prefix")
    (n,) = _LEN.unpack_from(data)
    if n == 0 or len(data) != 2 + n:
        raise MalformedPayload(f"length prefix {n} does not match {len(data) - 2} payload bytes")
    return int.from_bytes(data[2:], "big")


def make_beacon_request(
    self_id: int,
    self_pos: Position,
    params: DhParams | None,
    rng: random.Random | None = None,
    keypair: DhKeyPair | None = None,
):
    """Build a request beacon; returns ``(packet, keypair)``.

    With ``params`` None (security off) the beacon carries no DH payload.
    ``keypair`` reuses an existing pair instead of drawing a fresh one.
    """
    if params is None:
        return GpsrPacket(Command.BEACON_REQUEST, source_pos=self_pos), None
    if keypair is None:
        keypair = dh_generate(params, rng)
    pkt = GpsrPacket(Command.BEACON_REQUEST, source_pos=self_pos, data=encode_public(keypair.public))
    return pkt, keypair


def make_beacon_response(self_pos: Position, keypair: DhKeyPair | None) -> GpsrPacket:
    data = encode_public(keypair.public) if keypair is not None else b""
    return GpsrPacket(Command.BEACON_RESPONSE, source_pos=self_pos, data=data)


def _establish(entry: NeighborEntry, params: DhParams, own: DhKeyPair, peer: int) -> bool:
    try:
        shared = dh_shared(params, own, peer)
    except HandshakeRejected:
        return False
    entry.key = derive_key(shared)
    entry.peer_public = peer
    return True


def handle_beacon(
    table: NeighborTable,
    pkt: GpsrPacket,
    sender_id: int,
    self_id: int,
    self_pos: Position,
    params: DhParams | None,
    rng: random.Random | None,
    now: float,
):
    """Process a received beacon; returns ``(table, reply or None)``.

    ``params`` None runs the plain (unsecured) protocol: neighbors are still
    recorded and new ones still get a response, but no keys are made.
    """
    if pkt.command not in (Command.BEACON_REQUEST, Command.BEACON_RESPONSE):
        raise ValueError(f"not a beacon: {pkt.command!r}")
    if sender_id == self_id:
        return table, None

    entry = table.entries.get(sender_id)
    is_new = entry is None
    if is_new:
        entry = NeighborEntry(sender_id, pkt.source_pos, now)
        table.entries[sender_id] = entry
    else:
        entry.pos = pkt.source_pos
        entry.last_heard = now

    if params is None:
        if pkt.command == Command.BEACON_REQUEST and is_new:
            return table, make_beacon_response(self_pos, None)
        return table, None

    try:
        peer = decode_public(pkt.data)
    except MalformedPayload:
        return table, None

    if pkt.command == Command.BEACON_REQUEST:
        if entry.key is not None and entry.peer_public == peer:
            return table, None
        if table.own_dh is None:
            table.own_dh = dh_generate(params, rng)
        if not _establish(entry, params, table.own_dh, peer):
            return table, None
        return table, make_beacon_response(self_pos, table.own_dh)

    # response: completes the exchange started by our request, if any
    if table.own_dh is not None and (entry.key is None or entry.peer_public != peer):
        _establish(entry, params, table.own_dh, peer)
    return table, None


def expire_neighbors(table: NeighborTable, now: float) -> NeighborTable:
    """Drop entries not heard for longer than the timeout, keys included."""
    stale = [nid for nid, e in table.entries.items() if now - e.last_heard > table.timeout]
    for nid in stale:
        del table.entries[nid]
    return table
