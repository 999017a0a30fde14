"""Shared exception taxonomy.

Every error carries a machine-readable ``code`` used by the service for
error bodies and by the CLI to map onto process exit codes.
"""

from __future__ import annotations


class ForageError(Exception):
    """Base class for all package errors."""

    code = "error"

    def __init__(self, message: str, detail: dict | None = None):
        super().__init__(message)
        self.message = message
        self.detail = detail or {}


class ValidationError(ForageError):
    """Malformed input: empty ids, out-of-range parameters, bad payloads."""

    code = "validation"


class IntegrityError(ForageError):
    """Referential-integrity breach, e.g. an edge to an absent node."""

    code = "integrity"


class NotFoundError(ForageError):
    """A referenced entity does not exist in the document or store."""

    code = "not_found"


class NumericError(ForageError):
    """Non-finite values fed to or produced by the simulation."""

    code = "numeric"


class CapacityError(ForageError):
    """A guard limit exceeded (e.g. exact force evaluation on a huge graph)."""

    code = "capacity"


class OrderingError(ForageError):
    """Event timestamp regression in an append-only log."""

    code = "ordering"


class ParseError(ForageError):
    """Malformed persisted data (truncated file, bad JSON line)."""

    code = "parse"


class MigrationError(ForageError):
    """Persisted document written by an unsupported schema version."""

    code = "migration"


class ProviderError(ForageError):
    """Base class for scholarly-metadata provider failures."""

    code = "provider"


class ProviderNotFound(ProviderError):
    """The provider does not know the requested paper/author."""

    code = "not_found"


class RateLimitError(ProviderError):
    """Provider throttled us and retries were exhausted."""

    code = "rate_limit"


class TransportError(ProviderError):
    """Network-level failure talking to the provider."""

    code = "transport"


class FixtureMissError(ProviderError):
    """Fixture mode had no recorded response for a request."""

    code = "fixture_miss"


class ReplayIncompleteError(ForageError):
    """Replay hit an event whose provider response is not in the fixtures."""

    code = "replay_incomplete"


class ReplayMismatchError(ForageError):
    """Replayed document differs from the recorded final document."""

    code = "replay_mismatch"


class ProtocolError(ForageError):
    """Malformed service command or frame."""

    code = "protocol"


class StartupError(ForageError):
    """Service failed to start (e.g. port already bound)."""

    code = "startup"


# CLI exit codes: 0 success, 2 validation, 3 not-found, 4 provider/transport,
# 5 replay mismatch.
EXIT_CODES = {
    "validation": 2,
    "integrity": 2,
    "protocol": 2,
    "numeric": 2,
    "ordering": 2,
    "parse": 2,
    "migration": 2,
    "capacity": 2,
    "not_found": 3,
    "provider": 4,
    "rate_limit": 4,
    "transport": 4,
    "fixture_miss": 4,
    "replay_incomplete": 4,
    "replay_mismatch": 5,
    "startup": 4,
    "error": 1,
}


def exit_code_for(err: ForageError) -> int:
    return EXIT_CODES.get(err.code, 1)
