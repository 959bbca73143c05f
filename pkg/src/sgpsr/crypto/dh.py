"""Diffie-Hellman key agreement and the pairwise signing-key derivation."""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path

try:
    import gmpy2
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    gmpy2 = None

from .md5 import md5_digest

__all__ = [
    "DhParams",
    "DhKeyPair",
    "SharedSecret",
    "SigningKey",
    "HandshakeRejected",
    "mod_exp",
    "is_probable_prime",
    "dh_generate",
    "dh_shared",
    "derive_key",
    "int_to_bytes",
    "GROUPS",
    "get_group",
    "load_dh_params",
]


class HandshakeRejected(ValueError):
    """A peer public value that would force a degenerate shared secret."""


def mod_exp(base: int, exp: int, modulus: int) -> int:
    """``base ** exp % modulus`` by left-to-right square-and-multiply.

    Exponent bits are consumed four at a time against a table of the first
    sixteen powers, which cuts the multiplications roughly in half.
    """
    if modulus < 2:
        raise ValueError("modulus must be >= 2")
    if exp < 0:
        raise ValueError("exponent must be non-negative")
    if gmpy2 is not None:
        m = gmpy2.mpz(modulus)
        b = gmpy2.mpz(base) % m
        r = gmpy2.mpz(1)
    else:
        m, b, r = modulus, base % modulus, 1
    table = [r]
    for _ in range(15):
        table.append(table[-1] * b % m)
    nibbles = f"{exp:x}" if exp else ""
    for i, digit in enumerate(nibbles):
        if i:
            for _ in range(4):
                r = r * r % m
        d = int(digit, 16)
        if d:
            r = r * table[d] % m
    return int(r % m)


_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def is_probable_prime(n: int, rounds: int = 24, rng: random.Random | None = None) -> bool:
    """Miller-Rabin; deterministic for n < 3.3e24 thanks to the fixed bases."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    rng = rng or random.Random(n)
    bases = list(_SMALL_PRIMES[:13]) + [rng.randrange(2, n - 1) for _ in range(max(0, rounds - 13))]
    for a in bases:
        x = mod_exp(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class DhParams:
    """Public group: prime modulus ``p`` and generator ``w``."""

    p: int
    w: int

    def __post_init__(self):
        if self.p < 5 or not is_probable_prime(self.p):
            raise ValueError("DH modulus must be a prime >= 5")
        if not 1 < self.w < self.p:
            raise ValueError("DH generator must satisfy 1 < W < P")

    @property
    def byte_length(self) -> int:
        return (self.p.bit_length() + 7) // 8


@dataclass(frozen=True)
class DhKeyPair:
    secret: int
    public: int

    def __repr__(self):
        return f"DhKeyPair(public={self.public})"


@dataclass(frozen=True)
class SharedSecret:
    s: int


@dataclass(frozen=True)
class SigningKey:
    key: bytes

    def __post_init__(self):
        if len(self.key) != 16:
            raise ValueError("signing key must be exactly 16 bytes")

    @classmethod
    def from_hex(cls, text: str) -> "SigningKey":
        return cls(bytes.fromhex(text.strip()))

    def hex(self) -> str:
        return self.key.hex()

    def __bytes__(self):
        return self.key


def _check_secret(params: DhParams, secret: int) -> None:
    if not 2 <= secret <= params.p - 2:
        raise ValueError(f"secret must lie in [2, P-2] = [2, {params.p - 2}]")


def dh_generate(params: DhParams, rng: random.Random, secret: int | None = None) -> DhKeyPair:
    """Draw a secret in [2, P-2] (or use ``secret``) and compute W^secret mod P.

    Drawn secrets whose public value is 1 or P-1 are redrawn, since peers
    refuse those; an explicit ``secret`` is used as given.
    """
    if secret is not None:
        _check_secret(params, secret)
        return DhKeyPair(secret, mod_exp(params.w, secret, params.p))
    while True:
        secret = rng.randint(2, params.p - 2)
        public = mod_exp(params.w, secret, params.p)
        if 1 < public < params.p - 1:
            return DhKeyPair(secret, public)


def dh_shared(params: DhParams, own: DhKeyPair, peer_public: int) -> SharedSecret:
    # 0, 1 and P-1 would pin S to a value an eavesdropper can guess
    if not 1 < peer_public < params.p - 1:
        raise HandshakeRejected(f"peer public value {peer_public} outside (1, P-1)")
    return SharedSecret(mod_exp(peer_public, own.secret, params.p))


def int_to_bytes(n: int) -> bytes:
    """Minimal big-endian encoding; zero encodes as the empty string."""
    return n.to_bytes((n.bit_length() + 7) // 8, "big")


def derive_key(shared: SharedSecret) -> SigningKey:
    return SigningKey(md5_digest(int_to_bytes(shared.s)))


# RFC 3526 group 14
_MODP_2048 = int(
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74"
    "020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F1437"
    "4FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3DC2007CB8A163BF05"
    "98DA48361C55D39A69163FA8FD24CF5F83655D23DCA3AD961C62F356208552BB"
    "9ED529077096966D670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B"
    "E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9DE2BCBF695581718"
    "3995497CEA956AE515D2261898FA051015728E5A8AACAA68FFFFFFFFFFFFFFFF",
    16,
)

# RFC 3526 group 5; the largest standard group whose public value fits a beacon
_MODP_1536 = int(
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74"
    "020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F1437"
    "4FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3DC2007CB8A163BF05"
    "98DA48361C55D39A69163FA8FD24CF5F83655D23DCA3AD961C62F356208552BB"
    "9ED529077096966D670C354E4ABC9804F1746C08CA237327FFFFFFFFFFFFFFFF",
    16,
)

GROUPS = {
    "modp2048": (_MODP_2048, 2),
    "modp1536": (_MODP_1536, 2),
    # largest 64-bit safe prime; fast group for large simulations and tests
    "safe64": (0xFFFFFFFFFFFFFA43, 2),
    "toy23": (23, 5),
}

_group_cache: dict[str, DhParams] = {}


def get_group(name: str) -> DhParams:
    if name not in GROUPS:
        raise KeyError(f"unknown DH group {name!r}; known: {', '.join(sorted(GROUPS))}")
    if name not in _group_cache:
        _group_cache[name] = DhParams(*GROUPS[name])
    return _group_cache[name]


def load_dh_params(path: str | Path) -> DhParams:
    """Read ``p = <hex>`` and ``w = <hex>`` lines (``#`` comments allowed)."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = hex'")
        key, val = (part.strip() for part in line.split("=", 1))
        key = key.lower()
        if key not in ("p", "w"):
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = int(val.replace(" ", "").removeprefix("0x"), 16)
    missing = {"p", "w"} - values.keys()
    if missing:
        raise ValueError(f"{path}: missing {', '.join(sorted(missing))}")
    return DhParams(values["p"], values["w"])
