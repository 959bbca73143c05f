"""Packet signatures: AES-128 encryption of the MD5 digest of the signed region."""

from .crypto.aes import aes128_decrypt_block, aes128_encrypt_block
from .crypto.dh import SigningKey
from .crypto.md5 import md5_digest
from .wire import GpsrPacket, encode, signed_region

__all__ = ["compute_tag", "sign_packet", "verify_packet"]


def _digest(pkt: GpsrPacket) -> bytes:
    return md5_digest(signed_region(encode(pkt)))


def compute_tag(key: SigningKey, pkt: GpsrPacket) -> bytes:
    return aes128_encrypt_block(bytes(key), _digest(pkt))


def sign_packet(key: SigningKey, pkt: GpsrPacket) -> GpsrPacket:
    """Return ``pkt`` with its auth field set; any existing tag is ignored."""
    return pkt.with_auth(compute_tag(key, pkt))


def verify_packet(key: SigningKey, pkt: GpsrPacket) -> bool:
    """Decrypt the tag and compare it with a fresh digest of the packet."""
    try:
        expected = _digest(pkt)
        recovered = aes128_decrypt_block(bytes(key), pkt.auth)
    except ValueError:
        return False
    diff = 0
    for a, b in zip(recovered, expected):
        diff |= a ^ b
    return diff == 0
