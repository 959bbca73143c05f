"""Secured GPSR: greedy perimeter stateless routing with hop-by-hop packet
signatures keyed by Diffie-Hellman pairwise keys."""

from .auth import compute_tag, sign_packet, verify_packet
from .wire import Command, GpsrPacket, decode, encode

__version__ = "0.1.0"

__all__ = [
    "Command",
    "GpsrPacket",
    "compute_tag",
    "decode",
    "encode",
    "sign_packet",
    "verify_packet",
]
