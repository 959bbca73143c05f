"""Blowfish block cipher (ECB), pure Python.

Only the benchmark harness uses this; the protocol signs with AES.  The
initial P-array and S-boxes are the hexadecimal fraction digits of pi,
computed here with Machin's formula instead of being pasted in as tables.
"""

import struct
from functools import lru_cache

BLOCK_SIZE = 8
_MASK = 0xFFFFFFFF
_N_WORDS = 18 + 4 * 256
_PAIR = struct.Struct(">2I")


def _arctan_inv(x: int, one: int) -> int:
    total = term = one // x
    x2 = x * x
    n = 1
    sign = -1
    while term:
        term //= x2
        total += sign * (term // (2 * n + 1))
        sign = -sign
        n += 1
    return total


@lru_cache(maxsize=1)
def pi_words() -> tuple[int, ...]:
    """The first 1042 32-bit words of pi's hexadecimal fraction."""
    bits = 32 * _N_WORDS
    guard = 64
    one = 1 << (bits + guard)
    pi = 16 * _arctan_inv(5, one) - 4 * _arctan_inv(239, one)
    frac = (pi - 3 * one) >> guard
    return tuple((frac >> (32 * (_N_WORDS - 1 - i))) & _MASK for i in range(_N_WORDS))


class Blowfish:
    """Blowfish with a 4 to 56 byte key."""

    def __init__(self, key: bytes):
        key = bytes(key)
        if not 4 <= len(key) <= 56:
            raise ValueError(f"Blowfish key must be 4..56 bytes, got {len(key)}")
        words = pi_words()
        p = list(words[:18])
        s = [list(words[18 + 256 * i:18 + 256 * (i + 1)]) for i in range(4)]
        self.p, self.s = p, s

        klen = len(key)
        j = 0
        for i in range(18):
            d = 0
            for _ in range(4):
                d = (d << 8) | key[j]
                j = (j + 1) % klen
            p[i] ^= d

        left = right = 0
        for i in range(0, 18, 2):
            left, right = self._encrypt_words(left, right)
            p[i], p[i + 1] = left, right
        for box in s:
            for i in range(0, 256, 2):
                left, right = self._encrypt_words(left, right)
                box[i], box[i + 1] = left, right

    def _encrypt_words(self, left, right):
        p = self.p
        s0, s1, s2, s3 = self.s
        for i in range(16):
            left ^= p[i]
            right ^= ((((s0[left >> 24] + s1[(left >> 16) & 255]) & _MASK) ^ s2[(left >> 8) & 255]) + s3[left & 255]) & _MASK
            left, right = right, left
        left, right = right, left
        right ^= p[16]
        left ^= p[17]
        return left, right

    def _decrypt_words(self, left, right):
        p = self.p
        s0, s1, s2, s3 = self.s
        for i in range(17, 1, -1):
            left ^= p[i]
            right ^= ((((s0[left >> 24] + s1[(left >> 16) & 255]) & _MASK) ^ s2[(left >> 8) & 255]) + s3[left & 255]) & _MASK
            left, right = right, left
        left, right = right, left
        right ^= p[1]
        left ^= p[0]
        return left, right

    def encrypt_block(self, block: bytes) -> bytes:
        if len(block) != BLOCK_SIZE:
            raise ValueError(f"Blowfish block must be 8 bytes, got {len(block)}")
        return _PAIR.pack(*self._encrypt_words(*_PAIR.unpack(block)))

    def decrypt_block(self, block: bytes) -> bytes:
        if len(block) != BLOCK_SIZE:
            raise ValueError(f"Blowfish block must be 8 bytes, got {len(block)}")
        return _PAIR.pack(*self._decrypt_words(*_PAIR.unpack(block)))

    def encrypt_ecb(self, data: bytes) -> bytes:
        if len(data) % BLOCK_SIZE:
            raise ValueError("Blowfish input must be a multiple of 8 bytes")
        enc, unpack, pack = self._encrypt_words, _PAIR.unpack_from, _PAIR.pack
        return b"".join(pack(*enc(*unpack(data, i))) for i in range(0, len(data), 8))

    def decrypt_ecb(self, data: bytes) -> bytes:
        if len(data) % BLOCK_SIZE:
            raise ValueError("Blowfish input must be a multiple of 8 bytes")
        dec, unpack, pack = self._decrypt_words, _PAIR.unpack_from, _PAIR.pack
        return b"".join(pack(*dec(*unpack(data, i))) for i in range(0, len(data), 8))


def blowfish_encrypt(key: bytes, data: bytes) -> bytes:
    return Blowfish(key).encrypt_ecb(data)


def blowfish_decrypt(key: bytes, data: bytes) -> bytes:
    return Blowfish(key).decrypt_ecb(data)
