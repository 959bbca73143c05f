"""AES-128 block cipher (FIPS-197), table-driven pure Python.

The S-box and the round tables are generated at import time from the
GF(2^8) arithmetic rather than pasted in, and checked against the standard's
worked examples by the test suite.
"""

import struct
from functools import lru_cache

BLOCK_SIZE = 16
KEY_SIZE = 16
ROUNDS = 10

_WORDS = struct.Struct(">4I")


def _xtime(a):
    a <<= 1
    return (a ^ 0x11B) if a & 0x100 else a


def _gmul(a, b):
    r = 0
    while b:
        if b & 1:
            r ^= a
        a = _xtime(a)
        b >>= 1
    return r


def _build_sbox():
    inv = [0] * 256
    for a in range(1, 256):
        for b in range(1, 256):
            if _gmul(a, b) == 1:
                inv[a] = b
                break
    sbox = []
    for x in range(256):
        b = inv[x]
        s = b
        for shift in range(1, 5):
            s ^= ((b << shift) | (b >> (8 - shift))) & 0xFF
        sbox.append(s ^ 0x63)
    return sbox


SBOX = _build_sbox()
INV_SBOX = [0] * 256
for _i, _s in enumerate(SBOX):
    INV_SBOX[_s] = _i


def _ror8(w):
    return ((w >> 8) | (w << 24)) & 0xFFFFFFFF


def _tables(box, coeffs):
    t0 = []
    for x in range(256):
        s = box[x]
        c = [_gmul(s, k) for k in coeffs]
        t0.append((c[0] << 24) | (c[1] << 16) | (c[2] << 8) | c[3])
    t1 = [_ror8(w) for w in t0]
    t2 = [_ror8(w) for w in t1]
    t3 = [_ror8(w) for w in t2]
    return t0, t1, t2, t3


_TE0, _TE1, _TE2, _TE3 = _tables(SBOX, (2, 1, 1, 3))
_TD0, _TD1, _TD2, _TD3 = _tables(INV_SBOX, (14, 9, 13, 11))

_RCON = []
_r = 1
for _ in range(ROUNDS):
    _RCON.append(_r << 24)
    _r = _xtime(_r)


def _sub_word(w):
    return (
        (SBOX[w >> 24] << 24)
        | (SBOX[(w >> 16) & 255] << 16)
        | (SBOX[(w >> 8) & 255] << 8)
        | SBOX[w & 255]
    )


def expand_key(key: bytes) -> list[int]:
    """44-word encryption key schedule."""
    if len(key) != KEY_SIZE:
        raise ValueError(f"AES-128 key must be 16 bytes, got {len(key)}")
    w = list(_WORDS.unpack(key))
    for i in range(4, 4 * (ROUNDS + 1)):
        t = w[i - 1]
        if i % 4 == 0:
            t = _sub_word(((t << 8) | (t >> 24)) & 0xFFFFFFFF) ^ _RCON[i // 4 - 1]
        w.append(w[i - 4] ^ t)
    return w


def _inv_mix_word(w):
    return (
        _TD0[SBOX[w >> 24]]
        ^ _TD1[SBOX[(w >> 16) & 255]]
        ^ _TD2[SBOX[(w >> 8) & 255]]
        ^ _TD3[SBOX[w & 255]]
    )


def expand_decrypt_key(enc: list[int]) -> list[int]:
    """Equivalent-inverse-cipher schedule derived from the encryption schedule."""
    dk = []
    for r in range(ROUNDS, -1, -1):
        words = enc[4 * r:4 * r + 4]
        if 0 < r < ROUNDS:
            words = [_inv_mix_word(x) for x in words]
        dk.extend(words)
    return dk


class AES128:
    """AES-128 with a precomputed key schedule."""

    def __init__(self, key: bytes):
        self.key = bytes(key)
        self._ek = expand_key(self.key)
        self._dk = expand_decrypt_key(self._ek)

    def encrypt_block(self, block: bytes) -> bytes:
        if len(block) != BLOCK_SIZE:
            raise ValueError(f"AES block must be 16 bytes, got {len(block)}")
        te0, te1, te2, te3, sb = _TE0, _TE1, _TE2, _TE3, SBOX
        k = self._ek
        s0, s1, s2, s3 = _WORDS.unpack(block)
        s0 ^= k[0]
        s1 ^= k[1]
        s2 ^= k[2]
        s3 ^= k[3]
        for r in range(1, ROUNDS):
            o = 4 * r
            t0 = te0[s0 >> 24] ^ te1[(s1 >> 16) & 255] ^ te2[(s2 >> 8) & 255] ^ te3[s3 & 255] ^ k[o]
            t1 = te0[s1 >> 24] ^ te1[(s2 >> 16) & 255] ^ te2[(s3 >> 8) & 255] ^ te3[s0 & 255] ^ k[o + 1]
            t2 = te0[s2 >> 24] ^ te1[(s3 >> 16) & 255] ^ te2[(s0 >> 8) & 255] ^ te3[s1 & 255] ^ k[o + 2]
            t3 = te0[s3 >> 24] ^ te1[(s0 >> 16) & 255] ^ te2[(s1 >> 8) & 255] ^ te3[s2 & 255] ^ k[o + 3]
            s0, s1, s2, s3 = t0, t1, t2, t3
        o = 4 * ROUNDS
        return _WORDS.pack(
            ((sb[s0 >> 24] << 24) | (sb[(s1 >> 16) & 255] << 16) | (sb[(s2 >> 8) & 255] << 8) | sb[s3 & 255]) ^ k[o],
            ((sb[s1 >> 24] << 24) | (sb[(s2 >> 16) & 255] << 16) | (sb[(s3 >> 8) & 255] << 8) | sb[s0 & 255]) ^ k[o + 1],
            ((sb[s2 >> 24] << 24) | (sb[(s3 >> 16) & 255] << 16) | (sb[(s0 >> 8) & 255] << 8) | sb[s1 & 255]) ^ k[o + 2],
            ((sb[s3 >> 24] << 24) | (sb[(s0 >> 16) & 255] << 16) | (sb[(s1 >> 8) & 255] << 8) | sb[s2 & 255]) ^ k[o + 3],
        )

    def decrypt_block(self, block: bytes) -> bytes:
        if len(block) != BLOCK_SIZE:
            raise ValueError(f"AES block must be 16 bytes, got {len(block)}")
        td0, td1, td2, td3, sb = _TD0, _TD1, _TD2, _TD3, INV_SBOX
        k = self._dk
        s0, s1, s2, s3 = _WORDS.unpack(block)
        s0 ^= k[0]
        s1 ^= k[1]
        s2 ^= k[2]
        s3 ^= k[3]
        for r in range(1, ROUNDS):
            o = 4 * r
            t0 = td0[s0 >> 24] ^ td1[(s3 >> 16) & 255] ^ td2[(s2 >> 8) & 255] ^ td3[s1 & 255] ^ k[o]
            t1 = td0[s1 >> 24] ^ td1[(s0 >> 16) & 255] ^ td2[(s3 >> 8) & 255] ^ td3[s2 & 255] ^ k[o + 1]
            t2 = td0[s2 >> 24] ^ td1[(s1 >> 16) & 255] ^ td2[(s0 >> 8) & 255] ^ td3[s3 & 255] ^ k[o + 2]
            t3 = td0[s3 >> 24] ^ td1[(s2 >> 16) & 255] ^ td2[(s1 >> 8) & 255] ^ td3[s0 & 255] ^ k[o + 3]
            s0, s1, s2, s3 = t0, t1, t2, t3
        o = 4 * ROUNDS
        return _WORDS.pack(
            ((sb[s0 >> 24] << 24) | (sb[(s3 >> 16) & 255] << 16) | (sb[(s2 >> 8) & 255] << 8) | sb[s1 & 255]) ^ k[o],
            ((sb[s1 >> 24] << 24) | (sb[(s0 >> 16) & 255] << 16) | (sb[(s3 >> 8) & 255] << 8) | sb[s2 & 255]) ^ k[o + 1],
            ((sb[s2 >> 24] << 24) | (sb[(s1 >> 16) & 255] << 16) | (sb[(s0 >> 8) & 255] << 8) | sb[s3 & 255]) ^ k[o + 2],
            ((sb[s3 >> 24] << 24) | (sb[(s2 >> 16) & 255] << 16) | (sb[(s1 >> 8) & 255] << 8) | sb[s0 & 255]) ^ k[o + 3],
        )

    def encrypt_ecb(self, data: bytes) -> bytes:
        if len(data) % BLOCK_SIZE:
            raise ValueError("ECB input must be a multiple of 16 bytes")
        enc = self.encrypt_block
        return b"".join(enc(data[i:i + 16]) for i in range(0, len(data), 16))

    def decrypt_ecb(self, data: bytes) -> bytes:
        if len(data) % BLOCK_SIZE:
            raise ValueError("ECB input must be a multiple of 16 bytes")
        dec = self.decrypt_block
        return b"".join(dec(data[i:i + 16]) for i in range(0, len(data), 16))


@lru_cache(maxsize=4096)
def _cipher(key: bytes) -> AES128:
    return AES128(key)


def aes128_encrypt_block(key: bytes, block: bytes) -> bytes:
    return _cipher(bytes(key)).encrypt_block(block)


def aes128_decrypt_block(key: bytes, block: bytes) -> bytes:
    return _cipher(bytes(key)).decrypt_block(block)
