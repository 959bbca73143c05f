"""Secured GPSR forwarding decision.

Each relay checks the tag with the key it shares with the upstream neighbor,
picks the next hop (greedy, or right-hand-rule perimeter walk on the local
Gabriel graph), then re-signs with the key it shares with the downstream one.

In perimeter mode the ``perimeter_pos`` field holds the point where the
packet entered its current face. On entry that is the node where greedy
failed; at each face change it advances to the crossing with the line toward
the destination. Since every such point lies on the original entry-to-
destination segment, the line test and the resume-greedy test both use it.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .auth import sign_packet, verify_packet
from .geo import (
    ORIGIN,
    Position,
    distance_sq,
    crossing_point,
    greedy_next,
    local_gabriel_neighbors,
    right_hand_next,
    segments_intersect,
)
from .neighbors import NeighborTable
from .wire import ZERO_EDGE, Command, GpsrPacket

__all__ = [
    "DropReason",
    "Deliver",
    "Forward",
    "Drop",
    "forward_decision",
    "enter_perimeter",
    "maybe_resume_greedy",
    "to_greedy",
]


class DropReason(str, Enum):
    AUTH_FAILURE = "auth-failure"
    NO_ROUTE = "no-route"
    NO_NEIGHBORS = "no-neighbors"
    TTL = "ttl"
    BLACKHOLE = "blackhole"


@dataclass(frozen=True)
class Deliver:
    packet: GpsrPacket


@dataclass(frozen=True)
class Forward:
    next_hop: int
    command: Command
    packet: GpsrPacket


@dataclass(frozen=True)
class Drop:
    reason: DropReason


ForwardAction = Deliver | Forward | Drop


def to_greedy(pkt: GpsrPacket) -> GpsrPacket:
    return pkt.replace(command=Command.GREEDY_DATA, perimeter_pos=ORIGIN, edge=ZERO_EDGE)


def maybe_resume_greedy(pkt: GpsrPacket, self_pos: Position) -> GpsrPacket | None:
    """Back to greedy once strictly closer to the destination than the face entry point."""
    if distance_sq(self_pos, pkt.dest_pos) < distance_sq(pkt.perimeter_pos, pkt.dest_pos):
        return to_greedy(pkt)
    return None


def _face_change(pkt, self_pos, planar, nxt):
    """Apply the face-change rule until the chosen edge no longer crosses
    the entry-point -> destination segment closer to the destination."""
    pos = dict(planar)
    lf = pkt.perimeter_pos
    dest = pkt.dest_pos
    changed = False
    for _ in range(len(planar) + 1):
        npos = pos[nxt]
        if not segments_intersect(self_pos, npos, lf, dest):
            break
        p = crossing_point(self_pos, npos, lf, dest)
        if p is None or distance_sq(p, dest) >= distance_sq(lf, dest):
            break
        lf = p
        changed = True
        nxt = right_hand_next(npos, self_pos, planar)
    return nxt, lf, changed


def enter_perimeter(pkt: GpsrPacket, self_pos: Position, planar_neighbors) -> ForwardAction:
    """Switch a packet stuck at a local maximum into perimeter mode."""
    if not planar_neighbors:
        return Drop(DropReason.NO_NEIGHBORS)
    nxt = right_hand_next(pkt.dest_pos, self_pos, planar_neighbors)
    npos = dict(planar_neighbors)[nxt]
    out = pkt.replace(
        command=Command.PERIMETER_DATA,
        perimeter_pos=self_pos,
        edge=(self_pos, npos),
    )
    return Forward(nxt, Command.PERIMETER_DATA, out)


def _is_destination(self_pos: Position, dest: Position, neighbors, radio_range: float | None) -> bool:
    if self_pos == dest:
        return True
    if radio_range is None:
        return False
    limit = radio_range * 100
    own = distance_sq(self_pos, dest)
    if own > limit * limit:
        return False
    return all(distance_sq(p, dest) >= own for _, p in neighbors)


def _perimeter_step(pkt, self_pos, planar, prev_pos):
    nxt = right_hand_next(prev_pos, self_pos, planar)
    nxt, lf, changed = _face_change(pkt, self_pos, planar, nxt)
    npos = dict(planar)[nxt]
    if changed:
        return Forward(nxt, Command.PERIMETER_DATA, pkt.replace(perimeter_pos=lf, edge=(self_pos, npos)))
    if pkt.edge == (self_pos, npos):
        # about to repeat the first edge of this face: destination unreachable
        return Drop(DropReason.NO_ROUTE)
    return Forward(nxt, Command.PERIMETER_DATA, pkt)


def forward_decision(
    self_id: int,
    self_pos: Position,
    table: NeighborTable,
    pkt: GpsrPacket,
    security_on: bool,
    prev_hop: int | None = None,
    radio_range: float | None = None,
) -> ForwardAction:
    """Decide what a node does with a data packet.

    ``prev_hop`` is the link-layer sender (None when originating here);
    ``radio_range`` enables delivery at the node nearest to ``dest_pos``
    when no node sits exactly on it.
    """
    if pkt.command not in (Command.GREEDY_DATA, Command.PERIMETER_DATA):
        raise ValueError(f"not a data packet: {pkt.command!r}")

    if security_on and prev_hop is not None:
        key = table.key_for(prev_hop)
        if key is None or not verify_packet(key, pkt):
            return Drop(DropReason.AUTH_FAILURE)

    neighbors = table.neighbor_list()
    if _is_destination(self_pos, pkt.dest_pos, neighbors, radio_range):
        return Deliver(pkt)
    if not neighbors:
        return Drop(DropReason.NO_NEIGHBORS)

    if pkt.command == Command.PERIMETER_DATA:
        resumed = maybe_resume_greedy(pkt, self_pos)
        if resumed is not None:
            pkt = resumed

    if pkt.command == Command.GREEDY_DATA:
        nxt = greedy_next(self_pos, pkt.dest_pos, neighbors)
        if nxt is not None:
            action = Forward(nxt, Command.GREEDY_DATA, to_greedy(pkt))
        else:
            action = enter_perimeter(pkt, self_pos, local_gabriel_neighbors(self_pos, neighbors))
    else:
        planar = local_gabriel_neighbors(self_pos, neighbors)
        prev_entry = table.entries.get(prev_hop) if prev_hop is not None else None
        if prev_entry is None:
            # no arrival direction known; restart the walk from here
            action = enter_perimeter(pkt, self_pos, planar)
        else:
            action = _perimeter_step(pkt, self_pos, planar, prev_entry.pos)

    if isinstance(action, Forward) and security_on:
        key = table.key_for(action.next_hop)
        if key is None:
            return Drop(DropReason.NO_ROUTE)
        action = Forward(action.next_hop, action.command, sign_packet(key, action.packet))
    return action
