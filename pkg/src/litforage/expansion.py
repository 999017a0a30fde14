"""Recommendation-driven network expansion.

Three modes grow the document from a selected paper (or papers): thematic
recommendations that bridge one or more seeds with white edges weighted
by embedding cosine, forward-citation / backward-reference traversal with
directed magenta edges, and author-centric expansion with yellow edges.

All modes deduplicate against the document, reheat the layout when they
change anything, and are idempotent against a deterministic provider.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from . import insights
from .errors import ValidationError
from .graph import EdgeKind, GraphDocument, Provenance, TypedEdge
from .layout import reheat
from .metadata import PaperRecord, ScholarClient

DEFAULT_BUDGET = 5


class ExpansionMode(str, Enum):
    THEMATIC = "thematic"
    CITATIONS_FORWARD = "citations_forward"
    REFERENCES_BACKWARD = "references_backward"
    AUTHOR = "author"


@dataclass
class ExpansionResult:
    added_nodes: list[str] = field(default_factory=list)
    added_edges: list[TypedEdge] = field(default_factory=list)
    skipped_duplicates: int = 0

    @property
    def changed(self) -> bool:
        return bool(self.added_nodes or self.added_edges)

    def to_dict(self) -> dict:
        return {
            "added_nodes": list(self.added_nodes),
            "added_edges": [e.to_dict() for e in self.added_edges],
            "skipped_duplicates": self.skipped_duplicates,
        }


def _absorb(doc: GraphDocument, record: PaperRecord,
            result: ExpansionResult, now: int) -> None:
    if record.id in doc.nodes:
        result.skipped_duplicates += 1
        doc.add_node(record.to_node(), now)  # enrich only
        return
    doc.add_node(record.to_node(), now)
    result.added_nodes.append(record.id)


def _link(doc: GraphDocument, edge: TypedEdge, result: ExpansionResult,
          now: int) -> None:
    report = doc.add_edge(edge, now)
    if report.action == "inserted":
        result.added_edges.append(edge)


def _finish(doc: GraphDocument, result: ExpansionResult) -> ExpansionResult:
    if result.changed:
        reheat(doc.layout)
    return result


def expand_thematic(doc: GraphDocument, client: ScholarClient,
                    seeds: list[str], k: int = DEFAULT_BUDGET,
                    now: int = 0) -> ExpansionResult:
    """Provider recommendations for the seed set, bridged to every seed.

    Each accepted candidate gets a white thematic edge to each seed,
    weighted by the embedding cosine of the two papers (clamped to [0,1]).
    """
    if not seeds:
        raise ValidationError("thematic expansion needs at least one seed")
    for seed in seeds:
        if seed not in doc.nodes:
            raise ValidationError("seed %r is not in the document" % seed,
                                  {"id": seed})
    result = ExpansionResult()
    if k <= 0:
        return result
    seed_vecs = {s: insights.embed(doc.nodes[s].text()) for s in seeds}
    for record in client.get_recommendations(seeds, k):
        _absorb(doc, record, result, now)
        cand_vec = insights.embed(doc.nodes[record.id].text())
        for seed in seeds:
            weight = insights.cosine(cand_vec, seed_vecs[seed])
            weight = min(1.0, max(0.0, weight))
            _link(doc, TypedEdge(record.id, seed, EdgeKind.THEMATIC, weight,
                                 Provenance.PROVIDER_RECOMMENDATION),
                  result, now)
    return _finish(doc, result)


def expand_citations(doc: GraphDocument, client: ScholarClient,
                     paper_id: str, direction: str,
                     k: int = DEFAULT_BUDGET, now: int = 0) -> ExpansionResult:
    """Forward: papers citing this one (edge new->paper). Backward: papers
    it cites (edge paper->new). Citation edges read source-cites-target."""
    if paper_id not in doc.nodes:
        raise ValidationError("paper %r is not in the document" % paper_id,
                              {"id": paper_id})
    if direction not in ("forward", "backward"):
        raise ValidationError("direction must be 'forward' or 'backward'")
    result = ExpansionResult()
    if k <= 0:
        return result
    if direction == "forward":
        records = client.get_citations(paper_id, k)
    else:
        records = client.get_references(paper_id, k)
    for record in records:
        if record.id == paper_id:
            continue
        _absorb(doc, record, result, now)
        if direction == "forward":
            edge = TypedEdge(record.id, paper_id, EdgeKind.CITATION, 1.0,
                             Provenance.CITATION_GRAPH)
        else:
            edge = TypedEdge(paper_id, record.id, EdgeKind.CITATION, 1.0,
                             Provenance.CITATION_GRAPH)
        _link(doc, edge, result, now)
    return _finish(doc, result)


def expand_author(doc: GraphDocument, client: ScholarClient,
                  anchor_paper: str, author_id: str,
                  k: int = DEFAULT_BUDGET, now: int = 0) -> ExpansionResult:
    """Other papers by one of the anchor paper's authors, joined to it."""
    if anchor_paper not in doc.nodes:
        raise ValidationError(
            "paper %r is not in the document" % anchor_paper,
            {"id": anchor_paper})
    anchor = doc.nodes[anchor_paper]
    if author_id not in {a.author_id for a in anchor.authors}:
        raise ValidationError(
            "author %r is not on paper %r" % (author_id, anchor_paper),
            {"author_id": author_id, "id": anchor_paper})
    result = ExpansionResult()
    if k <= 0:
        return result
    accepted = 0
    # anchor itself may appear in the provider list; it never counts
    for record in client.get_author_papers(author_id, k + 1):
        if record.id == anchor_paper:
            continue
        if accepted >= k:
            break
        _absorb(doc, record, result, now)
        _link(doc, TypedEdge(anchor_paper, record.id, EdgeKind.AUTHORSHIP,
                             1.0, Provenance.AUTHOR_GRAPH), result, now)
        accepted += 1
    return _finish(doc, result)


def rank_candidates(candidates: list[PaperRecord], seeds: list[PaperRecord],
                    strategy: str = "provider_order") -> list[PaperRecord]:
    """Stable ordering of candidate records; ties break by paper id."""
    if strategy == "provider_order":
        return list(candidates)
    if strategy == "citation_count":
        return sorted(candidates,
                      key=lambda r: (-(r.citation_count or 0), r.id))
    if strategy == "similarity":
        import numpy as np

        if seeds:
            center = np.mean(
                [insights.embed(_record_text(s)) for s in seeds], axis=0)
        else:
            center = insights.embed("")
        return sorted(
            candidates,
            key=lambda r: (-insights.cosine(insights.embed(_record_text(r)),
                                            center), r.id))
    raise ValidationError("unknown ranking strategy %r" % strategy)


def _record_text(record: PaperRecord) -> str:
    if record.abstract:
        return record.title + " " + record.abstract
    return record.title
