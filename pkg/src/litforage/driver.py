"""Session orchestration: one command pipeline for CLI, service and replay.

A driver owns a document, its layout, the event log, the provider client
and the insight engine. Every command is validated, executed against the
engine stack, logged as exactly one interaction event (with the layout
tick count it triggered), and optionally broadcast as stream frames.
Replay re-runs the same pipeline from recorded events with recorded tick
counts, which is what makes record/replay an identity.
"""

from __future__ import annotations

import uuid
from pathlib import Path
from typing import Callable

from . import expansion, layout
from .errors import NotFoundError, ProtocolError, ValidationError
from .graph import GraphDocument, new_document
from .insights import InsightEngine, InsightProvider
from .metadata import ProviderConfig, ScholarClient
from .session import (
    EventLog,
    Feature,
    InteractionEvent,
    Modality,
    SessionStore,
    SnapshotPolicy,
)

COMMAND_FEATURES: dict[str, Feature] = {
    "expand": Feature.RECOMMENDATION,
    "cluster": Feature.CLUSTERING,
    "insights": Feature.CONTENT_ANALYSIS,
    "pin": Feature.SPATIAL,
    "unpin": Feature.SPATIAL,
    "move": Feature.SPATIAL,
    "annotate": Feature.ANNOTATION,
    "link": Feature.LINKING,
    "remove": Feature.NAVIGATION,
}

# Spoken-command aliases for a future speech frontend; each maps 1:1 onto
# a protocol command. Speech recognition itself is out of scope.
VOICE_ALIASES: dict[str, dict] = {
    "Summarize paper": {"type": "insights", "kind": "tldr"},
    "Recommend papers by thematic similarities": {"type": "expand",
                                                  "mode": "thematic"},
    "Recommend papers by citations": {"type": "expand", "mode": "citations"},
    "Recommend papers by references": {"type": "expand", "mode": "references"},
    "Cluster papers": {"type": "cluster"},
    "Start annotating": {"type": "annotate"},
    "Stop annotating": {"type": "annotate"},
}

FrameSink = Callable[[str, dict], None]


class SessionDriver:
    """Exclusive writer for one session."""

    def __init__(self, session_id: str, doc: GraphDocument,
                 client: ScholarClient,
                 insight_engine: InsightEngine | None = None,
                 store: SessionStore | None = None,
                 log: EventLog | None = None,
                 force_config: layout.ForceConfig | None = None,
                 run_cap: int = 1000,
                 replaying: bool = False):
        self.session_id = session_id
        self.doc = doc
        self.client = client
        self.insights = insight_engine or InsightEngine()
        self.store = store
        self.log = log
        self.config = force_config or layout.ForceConfig()
        self.run_cap = run_cap
        self.replaying = replaying
        self.frame_sink: FrameSink | None = None
        self.snapshots = SnapshotPolicy(start=doc.created_at)
        self.on_tick: Callable[[layout.LayoutState, int], None] | None = None

    # -- constructors -----------------------------------------------------

    @classmethod
    def create(cls, seed_ids: list[str], topic: str | None,
               client: ScholarClient, now: int,
               store: SessionStore | None = None,
               session_id: str | None = None,
               rng_seed: int | None = None,
               insight_engine: InsightEngine | None = None,
               force_config: layout.ForceConfig | None = None,
               run_cap: int = 1000) -> "SessionDriver":
        """Seed a new session; resolution is atomic across all seed ids."""
        if not seed_ids:
            raise ValidationError("at least one seed paper id is required")
        session_id = session_id or uuid.uuid4().hex[:12]
        if rng_seed is None:
            from .canonical import stable_hash64

            rng_seed = stable_hash64("session", session_id) & 0x7FFFFFFF

        # Resolve every seed before touching any state: one bad id fails
        # the whole creation and names itself in the error.
        records = [client.get_paper(seed_id) for seed_id in seed_ids]

        doc = new_document(topic=topic, created_at=now, rng_seed=rng_seed)
        for record in records:
            doc.add_node(record.to_node(is_seed=True), now)
        doc.layout = layout.init_positions(doc, rng_seed)

        log = EventLog(store.events_path) if store is not None else None
        driver = cls(session_id, doc, client, insight_engine, store, log,
                     force_config, run_cap)
        ticks = driver._run_layout()
        driver._log_event(
            now, Modality.SYSTEM, Feature.NAVIGATION, "session_created",
            {"seed_ids": list(seed_ids), "topic": topic,
             "rng_seed": rng_seed, "ticks_run": ticks})
        driver._persist()
        return driver

    @classmethod
    def open(cls, store: SessionStore, client: ScholarClient,
             insight_engine: InsightEngine | None = None,
             force_config: layout.ForceConfig | None = None,
             run_cap: int = 1000) -> "SessionDriver":
        """Resume a persisted session directory."""
        from .session import read_events

        doc = store.load_document()
        events = read_events(store.events_path)
        session_id = events[0].session_id if events else uuid.uuid4().hex[:12]
        log = EventLog(store.events_path)
        return cls(session_id, doc, client, insight_engine, store, log,
                   force_config, run_cap)

    @classmethod
    def for_replay(cls, doc: GraphDocument,
                   fixtures: str | Path) -> "SessionDriver":
        client = ScholarClient(ProviderConfig.fixtures(fixtures))
        return cls("replay", doc, client, replaying=True)

    @classmethod
    def reconstruct_initial(cls, created_event: InteractionEvent,
                            fixtures: str | Path) -> GraphDocument:
        """Rebuild the seeded document a session_created event describes."""
        payload = created_event.payload
        client = ScholarClient(ProviderConfig.fixtures(fixtures))
        doc = new_document(topic=payload.get("topic"),
                           created_at=created_event.ts,
                           rng_seed=int(payload["rng_seed"]))
        for seed_id in payload["seed_ids"]:
            record = client.get_paper(seed_id)
            doc.add_node(record.to_node(is_seed=True), created_event.ts)
        doc.layout = layout.init_positions(doc, int(payload["rng_seed"]))
        layout.run(doc.layout, doc, layout.ForceConfig(),
                   max_ticks=int(payload.get("ticks_run", 0)))
        return doc

    # -- command pipeline ---------------------------------------------------

    def execute(self, command: dict, modality: Modality, now: int) -> dict:
        """Run one command; log one event before returning its result."""
        if not isinstance(command, dict) or "type" not in command:
            raise ProtocolError("command must be an object with a 'type'")
        ctype = command["type"]
        handler = getattr(self, "_cmd_%s" % ctype, None)
        if handler is None or ctype not in COMMAND_FEATURES:
            raise ProtocolError("unknown command type %r" % ctype)

        result, payload, frames = handler(command, now)
        self._log_event(now, modality, COMMAND_FEATURES[ctype], ctype, payload)
        self._emit_frames(frames)
        self._persist(now)
        return result

    def apply_event(self, event: InteractionEvent) -> None:
        """Replay one recorded mutating event with its recorded tick count."""
        handler = getattr(self, "_cmd_%s" % event.action)
        command = dict(event.payload)
        command["type"] = event.action
        handler(command, event.ts)

    # -- handlers -----------------------------------------------------------
    # Each returns (result, event_payload, frames). The payload must be
    # sufficient to re-execute the action during replay.

    def _cmd_expand(self, command: dict, now: int):
        mode = command.get("mode")
        k = int(command.get("k", expansion.DEFAULT_BUDGET))
        if mode == "thematic":
            seeds = command.get("seeds") or []
            result = expansion.expand_thematic(self.doc, self.client, seeds,
                                               k, now)
        elif mode in ("citations", "references"):
            paper_id = command.get("id")
            if not paper_id:
                raise ProtocolError("expand %s needs an 'id'" % mode)
            direction = "forward" if mode == "citations" else "backward"
            result = expansion.expand_citations(self.doc, self.client,
                                                paper_id, direction, k, now)
        elif mode == "author":
            anchor = command.get("id")
            author_id = command.get("author_id")
            if not anchor or not author_id:
                raise ProtocolError("expand author needs 'id' and 'author_id'")
            result = expansion.expand_author(self.doc, self.client, anchor,
                                             author_id, k, now)
        else:
            raise ProtocolError("unknown expansion mode %r" % mode)

        ticks = self._run_layout(command.get("ticks_run")) if result.changed else 0
        payload = {key: command[key] for key in command if key != "type"}
        payload["ticks_run"] = ticks
        frames = ["graph", "positions"] if result.changed else []
        out = result.to_dict()
        out["ticks_run"] = ticks
        return out, payload, frames

    def _cmd_cluster(self, command: dict, now: int):
        k = command.get("k")
        clusters = self.insights.cluster(self.doc, int(k) if k else None)
        self.doc.set_clusters(clusters, now)
        layout.reheat(self.doc.layout)
        ticks = self._run_layout(command.get("ticks_run"))
        payload = {"k": k, "ticks_run": ticks}
        result = {
            "clusters": [c.to_dict() for c in clusters],
            "ticks_run": ticks,
        }
        return result, payload, ["clusters", "positions"]

    def _cmd_pin(self, command: dict, now: int):
        node_id, pos = command.get("id"), command.get("pos")
        if not node_id or pos is None:
            raise ProtocolError("pin needs 'id' and 'pos'")
        layout.pin(self.doc.layout, node_id, tuple(pos))
        self.doc._touch(now)
        payload = {"id": node_id, "pos": list(pos)}
        return {"pinned": node_id}, payload, ["positions"]

    def _cmd_unpin(self, command: dict, now: int):
        node_id = command.get("id")
        if not node_id:
            raise ProtocolError("unpin needs 'id'")
        layout.unpin(self.doc.layout, node_id)
        self.doc._touch(now)
        return {"unpinned": node_id}, {"id": node_id}, ["positions"]

    def _cmd_move(self, command: dict, now: int):
        node_id, pos = command.get("id"), command.get("pos")
        if not node_id or pos is None:
            raise ProtocolError("move needs 'id' and 'pos'")
        state = self.doc.layout
        if node_id not in state.positions:
            raise NotFoundError("no node %r in layout" % node_id,
                                {"id": node_id})
        vec = tuple(float(x) for x in pos)
        if node_id in state.pins:
            layout.pin(state, node_id, vec)
        else:
            state.positions[node_id] = vec
            state.velocities[node_id] = layout.ZERO3
        self.doc._touch(now)
        payload = {"id": node_id, "pos": list(pos)}
        return {"moved": node_id}, payload, ["positions"]

    def _cmd_link(self, command: dict, now: int):
        a, b = command.get("a"), command.get("b")
        if not a or not b:
            raise ProtocolError("link needs 'a' and 'b'")
        report = self.doc.create_custom_link(a, b, now)
        ticks = 0
        if report.action == "inserted":
            layout.reheat(self.doc.layout)
            ticks = self._run_layout(command.get("ticks_run"))
        payload = {"a": a, "b": b, "ticks_run": ticks}
        frames = ["graph", "positions"] if report.action == "inserted" else []
        return {"link": report.action, "ticks_run": ticks}, payload, frames

    def _cmd_annotate(self, command: dict, now: int):
        node_id, text = command.get("id"), command.get("text")
        if not node_id:
            raise ProtocolError("annotate needs 'id'")
        ann = self.doc.add_annotation(node_id, text or "", now)
        payload = {"id": node_id, "text": text}
        return {"annotation": ann.to_dict()}, payload, ["graph"]

    def _cmd_remove(self, command: dict, now: int):
        node_id = command.get("id")
        if not node_id:
            raise ProtocolError("remove needs 'id'")
        report = self.doc.remove_node(node_id, now)
        layout.reheat(self.doc.layout)
        ticks = self._run_layout(command.get("ticks_run"))
        payload = {"id": node_id, "ticks_run": ticks}
        result = {"removed": node_id,
                  "edges_removed": report.detail.get("edges_removed", 0),
                  "ticks_run": ticks}
        return result, payload, ["graph", "positions"]

    def _cmd_insights(self, command: dict, now: int):
        node_id = command.get("id")
        kind = command.get("kind", "tldr")
        if not node_id or node_id not in self.doc.nodes:
            raise NotFoundError("no paper %r" % node_id, {"id": node_id})
        paper = self.doc.nodes[node_id]
        if kind == "tldr":
            answer = self.insights.summarize(paper)
            result = {"tldr": answer.value, "fallback": answer.fallback}
        elif kind == "keywords":
            answer = self.insights.extract_keywords(
                paper, int(command.get("k", 5)))
            result = {"keywords": answer.value, "fallback": answer.fallback}
        else:
            raise ProtocolError("unknown insights kind %r" % kind)
        payload = {"id": node_id, "kind": kind}
        return result, payload, []

    # -- shared plumbing -------------------------------------------------------

    def _run_layout(self, recorded_ticks: int | None = None) -> int:
        cap = self.run_cap if recorded_ticks is None else int(recorded_ticks)
        return layout.run(self.doc.layout, self.doc, self.config,
                          max_ticks=cap, on_tick=self.on_tick)

    def _log_event(self, now: int, modality: Modality, feature: Feature,
                   action: str, payload: dict) -> InteractionEvent:
        event = InteractionEvent(
            ts=now, session_id=self.session_id, modality=modality,
            feature=feature, action=action, payload=payload)
        if self.log is not None and not self.replaying:
            self.log.append(event)
        if self.frame_sink is not None:
            self.frame_sink("event", event.to_dict())
        return event

    def _emit_frames(self, frames: list[str]) -> None:
        if self.frame_sink is None:
            return
        for kind in frames:
            if kind == "graph":
                self.frame_sink("graph", {"doc": self.doc.to_dict()})
            elif kind == "clusters":
                self.frame_sink("clusters", {
                    "clusters": [c.to_dict() for c in self.doc.clusters]})
            elif kind == "positions":
                self.frame_sink("positions", {
                    "alpha": self.doc.layout.alpha,
                    "positions": {k: list(v) for k, v in
                                  self.doc.layout.positions.items()}})

    def _persist(self, now: int = 0) -> None:
        if self.store is None or self.replaying:
            return
        self.store.save_document(self.doc)
        if now and self.snapshots.due(now):
            self.store.snapshot(self.doc, now)
            self.snapshots.mark(now)

    def close(self, now: int = 0) -> None:
        """Session end: persist the final document and a closing snapshot."""
        if self.store is not None and not self.replaying:
            self.store.save_document(self.doc)
            if now:
                self.store.snapshot(self.doc, now)
        if self.log is not None:
            self.log.close()
