"""Canonical JSON encoding and stable hashing.

Everything that gets persisted or hashed goes through this module so the
same logical value always produces the same bytes: UTF-8, sorted object
keys (with an optional fixed prefix order at the top level), compact
separators, and floats rendered by ``repr`` (shortest round-trip form).
Replay determinism and byte-identical re-serialization both lean on this.
"""

from __future__ import annotations

import hashlib
import json
import math
from typing import Any


def _normalize(value: Any) -> Any:
    """Recursively sort dict keys and reject non-finite floats."""
    if isinstance(value, dict):
        return {k: _normalize(value[k]) for k in sorted(value)}
    if isinstance(value, (list, tuple)):
        return [_normalize(v) for v in value]
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError("non-finite float in canonical value: %r" % value)
        return value
    return value


def canonical_dumps(value: Any, first_keys: tuple[str, ...] = ()) -> str:
    """Serialize ``value`` canonically.

    ``first_keys`` lets a top-level mapping pin named fields ahead of the
    sorted remainder (the document format puts ``schema_version`` first).
    """
    if first_keys and isinstance(value, dict):
        head = {k: _normalize(value[k]) for k in first_keys if k in value}
        tail = {
            k: _normalize(value[k])
            for k in sorted(value)
            if k not in first_keys
        }
        parts = [
            "%s:%s" % (json.dumps(k, ensure_ascii=False), _dumps_sorted(v))
            for k, v in {**head, **tail}.items()
        ]
        return "{" + ",".join(parts) + "}"
    return _dumps_sorted(_normalize(value))


def _dumps_sorted(value: Any) -> str:
    return json.dumps(
        value, ensure_ascii=False, sort_keys=True, separators=(",", ":")
    )


def canonical_bytes(value: Any, first_keys: tuple[str, ...] = ()) -> bytes:
    return canonical_dumps(value, first_keys).encode("utf-8")


def request_hash(endpoint: str, params: dict) -> str:
    """Stable fixture filename stem for a provider request."""
    payload = canonical_bytes({"endpoint": endpoint, "params": params})
    return hashlib.blake2b(payload, digest_size=10).hexdigest()


def stable_hash64(*parts: str | int) -> int:
    """Deterministic 64-bit hash of a tuple of strings/ints.

    Used wherever randomness must be a pure function of identity: position
    jitter, seeded direction phases. Never use Python's built-in ``hash``
    (randomized per process).
    """
    h = hashlib.blake2b(digest_size=8)
    for part in parts:
        if isinstance(part, int):
            h.update(b"i")
            h.update(part.to_bytes(8, "little", signed=True))
        else:
            h.update(b"s")
            h.update(part.encode("utf-8"))
        h.update(b"\x00")
    return int.from_bytes(h.digest(), "little")


def unit_floats(*parts: str | int, count: int = 3) -> list[float]:
    """``count`` floats in [0, 1), each an independent stable hash of parts."""
    return [
        (stable_hash64(*parts, i) >> 11) / float(1 << 53) for i in range(count)
    ]
