"""Pluggable misbehavior for simulated nodes.

These hooks are the only place the simulator lets a node break protocol
rules: black-hole dropping, in-flight tampering, position spoofing in
beacons, and beacon flooding.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from enum import Enum

from .geo import Position
from .wire import AUTH_SIZE, GpsrPacket

__all__ = [
    "AttackKind",
    "AttackProfile",
    "RelayDrop",
    "ForwardModified",
    "ForwardUnchanged",
    "apply_on_relay",
    "apply_on_beacon",
    "flood_schedule",
]


class AttackKind(str, Enum):
    BLACK_HOLE = "blackhole"
    TAMPER = "tamper"
    SPOOF_POSITION = "spoof"
    FLOOD_BEACONS = "flood"


@dataclass(frozen=True)
class AttackProfile:
    kind: AttackKind
    drop_fraction: float = 1.0
    tamper_bits: int = 8
    tamper_auth: bool = False
    spoof_offset: float = 0.0
    flood_multiplier: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", AttackKind(self.kind))
        if not 0.0 <= self.drop_fraction <= 1.0:
            raise ValueError("drop_fraction must lie in [0, 1]")
        if self.flood_multiplier < 1:
            raise ValueError("flood_multiplier must be >= 1")
        if self.tamper_bits < 0:
            raise ValueError("tamper_bits must be >= 0")
        if self.spoof_offset < 0:
            raise ValueError("spoof_offset must be >= 0")


@dataclass(frozen=True)
class RelayDrop:
    pass


@dataclass(frozen=True)
class ForwardModified:
    packet: GpsrPacket


@dataclass(frozen=True)
class ForwardUnchanged:
    pass


def _flip_bits(buf: bytes, count: int, rng: random.Random) -> bytes:
    out = bytearray(buf)
    nbits = 8 * len(out)
    for bit in rng.sample(range(nbits), min(count, nbits)):
        out[bit // 8] ^= 0x80 >> (bit % 8)
    return bytes(out)


def apply_on_relay(profile: AttackProfile, pkt: GpsrPacket, rng: random.Random):
    if profile.kind == AttackKind.BLACK_HOLE:
        if profile.drop_fraction >= 1.0 or rng.random() < profile.drop_fraction:
            return RelayDrop()
        return ForwardUnchanged()
    if profile.kind == AttackKind.TAMPER and profile.tamper_bits:
        if profile.tamper_auth:
            return ForwardModified(pkt.with_auth(_flip_bits(pkt.auth, min(profile.tamper_bits, 8 * AUTH_SIZE), rng)))
        if pkt.data:
            return ForwardModified(pkt.replace(data=_flip_bits(pkt.data, profile.tamper_bits, rng)))
    return ForwardUnchanged()


def apply_on_beacon(
    profile: AttackProfile | None,
    true_pos: Position,
    dest_hint: Position | None,
    rng: random.Random | None = None,
    area_center: Position | None = None,
) -> Position:
    """Position to advertise in a beacon.

    Spoofers move their advertised position ``spoof_offset`` meters toward
    ``dest_hint`` (or the area center), stopping on the target itself.
    """
    if profile is None or profile.kind != AttackKind.SPOOF_POSITION or profile.spoof_offset == 0:
        return true_pos
    target = dest_hint if dest_hint is not None else area_center
    if target is None:
        return true_pos
    dx, dy = target.x_m - true_pos.x_m, target.y_m - true_pos.y_m
    dist = math.hypot(dx, dy)
    if dist <= profile.spoof_offset:
        return target
    scale = profile.spoof_offset / dist
    return Position.from_meters(true_pos.x_m + dx * scale, true_pos.y_m + dy * scale)


def flood_schedule(profile: AttackProfile, base_interval: float) -> float:
    if profile.kind != AttackKind.FLOOD_BEACONS:
        return base_interval
    return base_interval / profile.flood_multiplier
