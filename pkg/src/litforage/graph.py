"""Typed literature-graph document model.

A GraphDocument holds papers as nodes, four kinds of typed edges with
fixed display colors (thematic=white, citation=magenta, authorship=yellow,
custom=green), free-text annotations, labeled clusters with spatial
anchors, and the 3D layout state. Mutations go through the operations
below, which keep referential integrity and report what they did.

The document is a value with exclusive-writer semantics: one mutator at a
time, snapshots are cheap via ``to_dict``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .canonical import canonical_bytes, canonical_dumps
from .errors import IntegrityError, NotFoundError, ValidationError
from .layout import LayoutState, spiral_position

SCHEMA_VERSION = 1

# Top-level key order of the canonical document serialization.
DOCUMENT_FIRST_KEYS = ("schema_version",)


class EdgeKind(str, Enum):
    THEMATIC = "thematic"
    CITATION = "citation"
    AUTHORSHIP = "authorship"
    CUSTOM = "custom"

    @property
    def color(self) -> str:
        return EDGE_COLORS[self]


# Fixed, total display-color mapping; one color per kind.
EDGE_COLORS: dict[EdgeKind, str] = {
    EdgeKind.THEMATIC: "white",
    EdgeKind.CITATION: "magenta",
    EdgeKind.AUTHORSHIP: "yellow",
    EdgeKind.CUSTOM: "green",
}


class Provenance(str, Enum):
    PROVIDER_RECOMMENDATION = "provider_recommendation"
    CITATION_GRAPH = "citation_graph"
    AUTHOR_GRAPH = "author_graph"
    USER_CREATED = "user_created"


@dataclass
class Author:
    name: str
    author_id: str | None = None

    def to_dict(self) -> dict:
        d: dict = {"name": self.name}
        if self.author_id is not None:
            d["author_id"] = self.author_id
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Author":
        return cls(name=d["name"], author_id=d.get("author_id"))


@dataclass
class PaperNode:
    """One academic paper with provider metadata."""

    id: str
    title: str
    authors: list[Author] = field(default_factory=list)
    abstract: str | None = None
    year: int | None = None
    venue: str | None = None
    citation_count: int | None = None
    external_ids: dict[str, str] = field(default_factory=dict)
    is_seed: bool = False

    def text(self) -> str:
        """Title plus abstract, the content-analysis input for this paper."""
        if self.abstract:
            return self.title + " " + self.abstract
        return self.title

    def to_dict(self) -> dict:
        d: dict = {
            "id": self.id,
            "title": self.title,
            "authors": [a.to_dict() for a in self.authors],
            "external_ids": dict(self.external_ids),
            "is_seed": self.is_seed,
        }
        for key in ("abstract", "year", "venue", "citation_count"):
            value = getattr(self, key)
            if value is not None:
                d[key] = value
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PaperNode":
        return cls(
            id=d["id"],
            title=d["title"],
            authors=[Author.from_dict(a) for a in d.get("authors", [])],
            abstract=d.get("abstract"),
            year=d.get("year"),
            venue=d.get("venue"),
            citation_count=d.get("citation_count"),
            external_ids=dict(d.get("external_ids", {})),
            is_seed=bool(d.get("is_seed", False)),
        )


@dataclass
class TypedEdge:
    source: str
    target: str
    kind: EdgeKind
    weight: float = 1.0
    provenance: Provenance = Provenance.USER_CREATED

    @property
    def color(self) -> str:
        return self.kind.color

    def pair_key(self) -> tuple[str, str, str]:
        """Uniqueness key: unordered endpoint pair plus kind."""
        a, b = sorted((self.source, self.target))
        return (a, b, self.kind.value)

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "target": self.target,
            "kind": self.kind.value,
            "weight": self.weight,
            "provenance": self.provenance.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TypedEdge":
        return cls(
            source=d["source"],
            target=d["target"],
            kind=EdgeKind(d["kind"]),
            weight=float(d["weight"]),
            provenance=Provenance(d["provenance"]),
        )


@dataclass
class Annotation:
    id: str
    paper_id: str
    text: str
    created_at: int

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "paper_id": self.paper_id,
            "text": self.text,
            "created_at": self.created_at,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Annotation":
        return cls(d["id"], d["paper_id"], d["text"], int(d["created_at"]))


@dataclass
class ClusterAssignment:
    cluster_id: int
    label: str
    member_ids: list[str]
    anchor: tuple[float, float, float]

    def to_dict(self) -> dict:
        return {
            "cluster_id": self.cluster_id,
            "label": self.label,
            "member_ids": list(self.member_ids),
            "anchor": list(self.anchor),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ClusterAssignment":
        return cls(
            cluster_id=int(d["cluster_id"]),
            label=d["label"],
            member_ids=list(d["member_ids"]),
            anchor=tuple(float(x) for x in d["anchor"]),
        )


@dataclass
class ChangeReport:
    """What a mutating operation did: inserted/enriched/merged/removed/..."""

    action: str
    subject: str
    detail: dict = field(default_factory=dict)


@dataclass
class Violation:
    code: str
    subject: str
    message: str


# Node fields that a re-insert may fill in when previously absent.
_ENRICHABLE = ("abstract", "year", "venue", "citation_count")


@dataclass
class GraphDocument:
    schema_version: int = SCHEMA_VERSION
    topic: str | None = None
    created_at: int = 0
    updated_at: int = 0
    nodes: dict[str, PaperNode] = field(default_factory=dict)
    edges: list[TypedEdge] = field(default_factory=list)
    annotations: list[Annotation] = field(default_factory=list)
    clusters: list[ClusterAssignment] = field(default_factory=list)
    layout: LayoutState = field(default_factory=LayoutState)

    # -- queries ----------------------------------------------------------

    def node_ids(self) -> list[str]:
        return list(self.nodes)

    def find_edge(self, a: str, b: str, kind: EdgeKind) -> TypedEdge | None:
        key = TypedEdge(a, b, kind).pair_key()
        for edge in self.edges:
            if edge.pair_key() == key:
                return edge
        return None

    def edges_of(self, node_id: str) -> list[TypedEdge]:
        return [
            e for e in self.edges if node_id in (e.source, e.target)
        ]

    def cluster_of(self, node_id: str) -> ClusterAssignment | None:
        for cluster in self.clusters:
            if node_id in cluster.member_ids:
                return cluster
        return None

    # -- operations --------------------------------------------------------

    def add_node(self, node: PaperNode, now: int = 0) -> ChangeReport:
        """Insert a paper, or enrich the stored one where fields were absent.

        Existing values are never overwritten; only previously-missing
        optional fields are filled from the new record.
        """
        if not node.id or not isinstance(node.id, str):
            raise ValidationError("paper id must be a non-empty string")
        if not node.title:
            raise ValidationError(
                "paper %r has an empty title" % node.id,
                {"id": node.id},
            )
        if node.citation_count is not None and node.citation_count < 0:
            raise ValidationError(
                "negative citation count for %r" % node.id, {"id": node.id}
            )

        existing = self.nodes.get(node.id)
        if existing is None:
            index = len(self.nodes)
            self.nodes[node.id] = node
            self.layout.place(node.id, spiral_position(index, self.layout.rng_seed))
            self._touch(now)
            return ChangeReport("inserted", node.id)

        filled = []
        for key in _ENRICHABLE:
            if getattr(existing, key) is None and getattr(node, key) is not None:
                setattr(existing, key, getattr(node, key))
                filled.append(key)
        if not existing.authors and node.authors:
            existing.authors = list(node.authors)
            filled.append("authors")
        for scheme, value in node.external_ids.items():
            if scheme not in existing.external_ids:
                existing.external_ids[scheme] = value
                filled.append("external_ids." + scheme)
        if node.is_seed and not existing.is_seed:
            existing.is_seed = True
            filled.append("is_seed")

        if filled:
            self._touch(now)
            return ChangeReport("enriched", node.id, {"fields": filled})
        return ChangeReport("already_present", node.id)

    def add_edge(self, edge: TypedEdge, now: int = 0) -> ChangeReport:
        """Insert an edge; a duplicate (pair, kind) merges by max weight."""
        if edge.source == edge.target:
            raise ValidationError(
                "self-loop on %r" % edge.source, {"id": edge.source}
            )
        for endpoint in (edge.source, edge.target):
            if endpoint not in self.nodes:
                raise IntegrityError(
                    "edge endpoint %r is not in the document" % endpoint,
                    {"id": endpoint},
                )
        if not (0.0 <= edge.weight <= 1.0):
            raise ValidationError(
                "edge weight %r outside [0, 1]" % edge.weight
            )

        stored = self.find_edge(edge.source, edge.target, edge.kind)
        if stored is not None:
            # Keep the first stored orientation; strongest signal wins.
            if edge.weight > stored.weight:
                stored.weight = edge.weight
                self._touch(now)
            return ChangeReport(
                "merged", "%s--%s" % (edge.source, edge.target),
                {"kind": edge.kind.value, "weight": stored.weight},
            )
        self.edges.append(edge)
        self._touch(now)
        return ChangeReport(
            "inserted", "%s--%s" % (edge.source, edge.target),
            {"kind": edge.kind.value},
        )

    def create_custom_link(self, a: str, b: str, now: int = 0) -> ChangeReport:
        """User-created green link between two papers; idempotent."""
        if a == b:
            raise ValidationError("cannot link %r to itself" % a, {"id": a})
        edge = TypedEdge(a, b, EdgeKind.CUSTOM, 1.0, Provenance.USER_CREATED)
        return self.add_edge(edge, now)

    def remove_node(self, node_id: str, now: int = 0) -> ChangeReport:
        """Remove a paper with its edges, annotations and cluster membership."""
        if node_id not in self.nodes:
            raise NotFoundError("no paper %r in the document" % node_id,
                                {"id": node_id})
        removed_edges = len(self.edges_of(node_id))
        self.edges = [
            e for e in self.edges if node_id not in (e.source, e.target)
        ]
        self.annotations = [
            a for a in self.annotations if a.paper_id != node_id
        ]
        for cluster in self.clusters:
            if node_id in cluster.member_ids:
                cluster.member_ids.remove(node_id)
        self.clusters = [c for c in self.clusters if c.member_ids]
        self.layout.forget(node_id)
        del self.nodes[node_id]
        self._touch(now)
        return ChangeReport("removed", node_id, {"edges_removed": removed_edges})

    def add_annotation(self, paper_id: str, text: str, now: int = 0) -> Annotation:
        """Attach a free-text note to a paper."""
        if paper_id not in self.nodes:
            raise NotFoundError("no paper %r to annotate" % paper_id,
                                {"id": paper_id})
        if not text or not text.strip():
            raise ValidationError("annotation text is empty")
        # Deterministic id given the event timestamp and append position,
        # so replay reproduces it.
        ann = Annotation(
            id="ann-%d-%d" % (now, len(self.annotations)),
            paper_id=paper_id,
            text=text,
            created_at=now,
        )
        self.annotations.append(ann)
        self._touch(now)
        return ann

    def set_clusters(self, clusters: list[ClusterAssignment], now: int = 0) -> None:
        """Replace all cluster assignments (re-clustering semantics)."""
        self.clusters = list(clusters)
        self._touch(now)

    def _touch(self, now: int) -> None:
        if now:
            self.updated_at = now

    # -- validation ---------------------------------------------------------

    def validate(self) -> list[Violation]:
        """Check every structural invariant; violations are data, not errors."""
        out: list[Violation] = []
        for node_id, node in self.nodes.items():
            if not node_id:
                out.append(Violation("empty_id", node_id, "empty paper id"))
            if node.id != node_id:
                out.append(Violation(
                    "id_mismatch", node_id,
                    "node keyed %r carries id %r" % (node_id, node.id)))
            if not node.title:
                out.append(Violation("empty_title", node_id, "empty title"))
            if node.citation_count is not None and node.citation_count < 0:
                out.append(Violation(
                    "negative_citations", node_id,
                    "citation_count %r < 0" % node.citation_count))

        seen_pairs: set[tuple[str, str, str]] = set()
        for edge in self.edges:
            tag = "%s->%s[%s]" % (edge.source, edge.target, edge.kind.value)
            if edge.source == edge.target:
                out.append(Violation("self_loop", tag, "self loop"))
            for endpoint in (edge.source, edge.target):
                if endpoint not in self.nodes:
                    out.append(Violation(
                        "dangling_edge", tag,
                        "endpoint %r missing from document" % endpoint))
            if not (0.0 <= edge.weight <= 1.0):
                out.append(Violation(
                    "bad_weight", tag, "weight %r outside [0,1]" % edge.weight))
            key = edge.pair_key()
            if key in seen_pairs:
                out.append(Violation(
                    "duplicate_edge", tag,
                    "second edge for pair %r kind %s" % (key[:2], key[2])))
            seen_pairs.add(key)

        for ann in self.annotations:
            if ann.paper_id not in self.nodes:
                out.append(Violation(
                    "dangling_annotation", ann.id,
                    "annotation references absent paper %r" % ann.paper_id))
            if not ann.text:
                out.append(Violation("empty_annotation", ann.id, "empty text"))

        assigned: dict[str, int] = {}
        for cluster in self.clusters:
            subject = "cluster-%d" % cluster.cluster_id
            if not cluster.member_ids:
                out.append(Violation("empty_cluster", subject, "no members"))
            if not cluster.label:
                out.append(Violation("empty_label", subject, "empty label"))
            if not all(math.isfinite(x) for x in cluster.anchor):
                out.append(Violation("bad_anchor", subject, "non-finite anchor"))
            for member in cluster.member_ids:
                if member not in self.nodes:
                    out.append(Violation(
                        "dangling_member", subject,
                        "member %r missing from document" % member))
                if member in assigned:
                    out.append(Violation(
                        "overlapping_clusters", member,
                        "paper %r in clusters %d and %d"
                        % (member, assigned[member], cluster.cluster_id)))
                else:
                    assigned[member] = cluster.cluster_id

        out.extend(self.layout.validate(set(self.nodes)))
        return out

    # -- serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        d: dict = {
            "schema_version": self.schema_version,
            "created_at": self.created_at,
            "updated_at": self.updated_at,
            "nodes": [n.to_dict() for n in self.nodes.values()],
            "edges": [e.to_dict() for e in self.edges],
            "annotations": [a.to_dict() for a in self.annotations],
            "clusters": [c.to_dict() for c in self.clusters],
            "layout": self.layout.to_dict(),
        }
        if self.topic is not None:
            d["topic"] = self.topic
        return d

    def to_canonical_json(self) -> bytes:
        return canonical_bytes(self.to_dict(), DOCUMENT_FIRST_KEYS)

    @classmethod
    def from_dict(cls, d: dict) -> "GraphDocument":
        from .errors import MigrationError

        version = d.get("schema_version")
        if version != SCHEMA_VERSION:
            raise MigrationError(
                "unsupported schema_version %r (writer is %d)"
                % (version, SCHEMA_VERSION))
        doc = cls(
            schema_version=version,
            topic=d.get("topic"),
            created_at=int(d.get("created_at", 0)),
            updated_at=int(d.get("updated_at", 0)),
            layout=LayoutState.from_dict(d.get("layout", {})),
        )
        for nd in d.get("nodes", []):
            doc.nodes[nd["id"]] = PaperNode.from_dict(nd)
        doc.edges = [TypedEdge.from_dict(e) for e in d.get("edges", [])]
        doc.annotations = [
            Annotation.from_dict(a) for a in d.get("annotations", [])
        ]
        doc.clusters = [
            ClusterAssignment.from_dict(c) for c in d.get("clusters", [])
        ]
        return doc


def structurally_equal(a: GraphDocument, b: GraphDocument) -> bool:
    return a.to_dict() == b.to_dict()


def document_diff(a: GraphDocument, b: GraphDocument) -> dict:
    """Structured node/edge/pin differences, for replay verification output."""
    a_nodes, b_nodes = set(a.nodes), set(b.nodes)
    a_edges = {e.pair_key() for e in a.edges}
    b_edges = {e.pair_key() for e in b.edges}
    diff = {
        "nodes_only_in_recorded": sorted(a_nodes - b_nodes),
        "nodes_only_in_replayed": sorted(b_nodes - a_nodes),
        "edges_only_in_recorded": sorted(map(list, a_edges - b_edges)),
        "edges_only_in_replayed": sorted(map(list, b_edges - a_edges)),
        "pin_mismatches": sorted(
            set(a.layout.pins) ^ set(b.layout.pins)
        ),
    }
    if not any(diff.values()) and a.to_dict() != b.to_dict():
        diff["other"] = ["documents differ outside node/edge/pin sets"]
    return diff


def new_document(topic: str | None = None, created_at: int = 0,
                 rng_seed: int = 0) -> GraphDocument:
    doc = GraphDocument(topic=topic, created_at=created_at,
                        updated_at=created_at)
    doc.layout.rng_seed = rng_seed
    return doc


__all__ = [
    "SCHEMA_VERSION",
    "EdgeKind",
    "EDGE_COLORS",
    "Provenance",
    "Author",
    "PaperNode",
    "TypedEdge",
    "Annotation",
    "ClusterAssignment",
    "ChangeReport",
    "Violation",
    "GraphDocument",
    "structurally_equal",
    "document_diff",
    "new_document",
    "canonical_dumps",
]
