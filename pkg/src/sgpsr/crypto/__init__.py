"""Primitives the secured protocol is built from."""

from .aes import AES128, aes128_decrypt_block, aes128_encrypt_block
from .blowfish import Blowfish, blowfish_decrypt, blowfish_encrypt
from .dh import (
    GROUPS,
    DhKeyPair,
    DhParams,
    HandshakeRejected,
    SharedSecret,
    SigningKey,
    derive_key,
    dh_generate,
    dh_shared,
    get_group,
    int_to_bytes,
    is_probable_prime,
    load_dh_params,
    mod_exp,
)
from .md5 import md5_digest

__all__ = [
    "AES128",
    "Blowfish",
    "DhKeyPair",
    "DhParams",
    "GROUPS",
    "HandshakeRejected",
    "SharedSecret",
    "SigningKey",
    "aes128_decrypt_block",
    "aes128_encrypt_block",
    "blowfish_decrypt",
    "blowfish_encrypt",
    "derive_key",
    "dh_generate",
    "dh_shared",
    "get_group",
    "int_to_bytes",
    "is_probable_prime",
    "load_dh_params",
    "md5_digest",
    "mod_exp",
]
