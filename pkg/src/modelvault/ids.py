"""Entry identifier generation.

Entry ids are 26-character Crockford base32 tokens: 48 bits of millisecond
timestamp followed by 80 random bits. Lexicographic order therefore follows
creation time, which keeps directory listings and id-ordered queries stable.
"""

from __future__ import annotations

import secrets
import time

_ALPHABET = "0123456789ABCDEFGHJKMNPQRSTVWXYZ"
ID_LENGTH = 26


def new_entry_id(timestamp_ms: int | None = None) -> str:
    """Return a fresh sortable 26-character identifier."""
    ts = int(time.time() * 1000) if timestamp_ms is None else timestamp_ms
    value = (ts & ((1 << 48) - 1)) << 80 | secrets.randbits(80)
    chars = []
    for _ in range(ID_LENGTH):
        chars.append(_ALPHABET[value & 0x1F])
        value >>= 5
    return "".join(reversed(chars))


def is_entry_id(text: str) -> bool:
    return len(text) == ID_LENGTH and all(c in _ALPHABET for c in text)
