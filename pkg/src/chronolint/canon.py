"""Canonical JSON serialization and content digests.

All persisted records and all fingerprint material go through these two
functions so that identical data always yields identical bytes: keys sorted,
UTF-8, newline-terminated, no locale- or time-dependent content.
"""

from __future__ import annotations

import hashlib
import json


def canonical_bytes(obj: object) -> bytes:
    """Human-diffable canonical form used for on-disk records."""
    return (json.dumps(obj, sort_keys=True, ensure_ascii=False, indent=2) + "\n").encode("utf-8")


def compact_bytes(obj: object) -> bytes:
    """Compact canonical form used as hash material."""
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":")).encode(
        "utf-8"
    )


def digest(obj: object) -> str:
    """64-char hex SHA-256 over the compact canonical form of *obj*."""
    return hashlib.sha256(compact_bytes(obj)).hexdigest()
