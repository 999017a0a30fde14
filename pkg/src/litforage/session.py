"""Session persistence: documents, snapshots, the interaction log, replay.

A session directory holds:

    session.json        final document (canonical JSON)
    events.jsonl        append-only interaction log, one event per line
    snapshots/<ts>.json full-document snapshots
    fixtures/           recorded provider responses

Every line of the event log is flushed on append and parses on its own,
so a crashed session still replays up to its last completed action.
Replaying a log against the recorded fixtures reproduces the final
document exactly; that identity is the backbone the rest of the tooling
trusts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import IO

from .canonical import canonical_bytes
from .errors import (
    OrderingError,
    ParseError,
    ReplayIncompleteError,
    ValidationError,
)
from .graph import DOCUMENT_FIRST_KEYS, GraphDocument


class Modality(str, Enum):
    MENU = "menu"
    POINTER_GESTURE = "pointer_gesture"
    VOICE = "voice"  # kept for schema compatibility; never emitted here
    API = "api"
    SYSTEM = "system"


class Feature(str, Enum):
    RECOMMENDATION = "recommendation"
    CLUSTERING = "clustering"
    CONTENT_ANALYSIS = "content_analysis"
    SPATIAL = "spatial"
    ANNOTATION = "annotation"
    LINKING = "linking"
    NAVIGATION = "navigation"


@dataclass
class InteractionEvent:
    ts: int
    session_id: str
    modality: Modality
    feature: Feature
    action: str
    payload: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "ts": self.ts,
            "session_id": self.session_id,
            "modality": self.modality.value,
            "feature": self.feature.value,
            "action": self.action,
            "payload": self.payload,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "InteractionEvent":
        return cls(
            ts=int(d["ts"]),
            session_id=d["session_id"],
            modality=Modality(d["modality"]),
            feature=Feature(d["feature"]),
            action=d["action"],
            payload=d.get("payload", {}),
        )


class EventLog:
    """Append-only, line-oriented JSON log with non-decreasing timestamps."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.last_ts = 0
        self.count = 0
        if self.path.exists():
            for event in read_events(self.path):
                self.last_ts = event.ts
                self.count += 1
        self._fh: IO[str] = open(self.path, "a", encoding="utf-8")

    def append(self, event: InteractionEvent) -> None:
        if event.ts < self.last_ts:
            raise OrderingError(
                "event ts %d precedes last logged ts %d"
                % (event.ts, self.last_ts))
        line = canonical_bytes(event.to_dict()).decode("utf-8")
        self._fh.write(line + "\n")
        self._fh.flush()
        self.last_ts = event.ts
        self.count += 1

    def close(self) -> None:
        self._fh.close()

    def __enter__(self) -> "EventLog":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def read_events(path: str | Path) -> list[InteractionEvent]:
    """Strictly parse a log; errors name the offending 1-based line."""
    out: list[InteractionEvent] = []
    path = Path(path)
    if not path.exists():
        return out
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
                out.append(InteractionEvent.from_dict(data))
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise ParseError(
                    "bad event at line %d of %s: %s" % (lineno, path, exc),
                    {"line": lineno, "path": str(path)}) from exc
    return out


@dataclass
class Snapshot:
    ts: int
    document: GraphDocument


class SnapshotPolicy:
    """Time-based cadence: one snapshot per interval of active session."""

    def __init__(self, interval_ms: int = 60_000, start: int = 0):
        self.interval_ms = interval_ms
        self.last = start

    def due(self, now: int) -> bool:
        return now - self.last >= self.interval_ms

    def mark(self, now: int) -> None:
        self.last = now


class SessionStore:
    """Filesystem layout of one session directory."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    @property
    def document_path(self) -> Path:
        return self.root / "session.json"

    @property
    def events_path(self) -> Path:
        return self.root / "events.jsonl"

    @property
    def snapshots_dir(self) -> Path:
        return self.root / "snapshots"

    @property
    def fixtures_dir(self) -> Path:
        return self.root / "fixtures"

    def save_document(self, doc: GraphDocument) -> None:
        save(doc, self.document_path)

    def load_document(self) -> GraphDocument:
        return load(self.document_path)

    def snapshot(self, doc: GraphDocument, now: int) -> Snapshot:
        violations = doc.validate()
        if violations:
            raise ValidationError(
                "refusing to snapshot an invalid document",
                {"violations": [v.message for v in violations]})
        self.snapshots_dir.mkdir(parents=True, exist_ok=True)
        path = self.snapshots_dir / ("%d.json" % now)
        path.write_bytes(doc.to_canonical_json() + b"\n")
        return Snapshot(ts=now, document=doc)

    def snapshot_times(self) -> list[int]:
        if not self.snapshots_dir.exists():
            return []
        return sorted(int(p.stem) for p in self.snapshots_dir.glob("*.json"))

    def load_snapshot(self, ts: int) -> GraphDocument:
        return load(self.snapshots_dir / ("%d.json" % ts))


def save(doc: GraphDocument, path: str | Path) -> None:
    violations = doc.validate()
    if violations:
        raise ValidationError(
            "refusing to save an invalid document",
            {"violations": [v.message for v in violations]})
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(doc.to_canonical_json() + b"\n")


def load(path: str | Path) -> GraphDocument:
    path = Path(path)
    if not path.exists():
        from .errors import NotFoundError

        raise NotFoundError("no document at %s" % path, {"path": str(path)})
    try:
        data = json.loads(path.read_bytes())
    except json.JSONDecodeError as exc:
        raise ParseError("malformed document at %s: %s" % (path, exc)) from exc
    if not isinstance(data, dict):
        raise ParseError("document at %s is not an object" % path)
    return GraphDocument.from_dict(data)


def clone(doc: GraphDocument) -> GraphDocument:
    """Deep copy through the wire format; keeps value semantics honest."""
    return GraphDocument.from_dict(doc.to_dict())


# Actions that mutate document state and therefore must replay; anything
# else (insights lookups, navigation pings) is observational.
MUTATING_ACTIONS = frozenset(
    {"expand", "cluster", "pin", "unpin", "move", "link", "annotate",
     "remove"})


def replay(initial_doc: GraphDocument, events: list[InteractionEvent],
           provider_fixtures: str | Path) -> GraphDocument:
    """Re-execute the mutating events against the engine stack.

    ``initial_doc`` is the state before the first event in ``events``.
    Layout runs use the tick counts recorded in each event, so the result
    is independent of wall clocks and convergence policy changes.
    """
    from .driver import SessionDriver

    driver = SessionDriver.for_replay(clone(initial_doc), provider_fixtures)
    for event in events:
        if event.action == "session_created":
            continue
        if event.action not in MUTATING_ACTIONS:
            continue
        try:
            driver.apply_event(event)
        except ReplayIncompleteError:
            raise
        except Exception as exc:
            from .errors import ProviderError

            if isinstance(exc, ProviderError):
                raise ReplayIncompleteError(
                    "no fixture for %s event at ts %d: %s"
                    % (event.action, event.ts, exc),
                    {"action": event.action, "ts": event.ts}) from exc
            raise
    return driver.doc


def canonical_document_bytes(doc: GraphDocument) -> bytes:
    return canonical_bytes(doc.to_dict(), DOCUMENT_FIRST_KEYS)
